#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "delayctl/config.hpp"
#include "delayctl/errors.hpp"
#include "delayctl/io.hpp"

namespace {

using namespace delayctl;

constexpr int kExitOk = 0;
constexpr int kExitEnvelope = 1;  // completed, but no clean decay envelope
constexpr int kExitDiverged = 2;
constexpr int kExitConfig = 3;

struct CommonOpts {
  std::string config_path;
  std::optional<double> h;
  std::optional<unsigned long long> seed;
  std::string out;
  std::string history;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_history) {
  // frees the short -h so the step-override flag --h can exist
  cmd->set_help_flag("--help", "print this help message and exit");
  cmd->add_option("config", opts.config_path, "JSON run description")
      ->required();
  cmd->add_option("--h", opts.h, "override loop.h");
  cmd->add_option("--seed", opts.seed, "override the config seed");
  cmd->add_option("--out", opts.out, "write the CSV/table to this file");
  if (with_history)
    cmd->add_option("--history", opts.history,
                    "initial input history CSV (theta,u_1..u_m on [-r,0])");
}

Config load_with_overrides(const CommonOpts& opts) {
  Config config = load_config_file(opts.config_path);
  if (opts.h) config.loop.h = *opts.h;
  if (opts.seed) config.seed = static_cast<unsigned long>(*opts.seed);
  return config;
}

int ring_intervals(const LoopOptions& loop) {
  return static_cast<int>(std::lround(loop.delay / loop.step));
}

/// --history file > config initial section > zero history.
HistorySegment initial_history(const RealizedConfig& rz,
                               const std::string& history_path) {
  if (!history_path.empty())
    return read_history_csv(history_path, rz.loop.delay);
  if (rz.w0) return *rz.w0;
  return HistorySegment::zero(rz.loop.delay, ring_intervals(rz.loop),
                              rz.model.input_dim);
}

SimulationResult run_configured_loop(const RealizedConfig& rz,
                                     const HistorySegment& w0) {
  const std::string& kind = rz.config.predictor.kind;
  if (kind == "static")
    return simulate_static_feedback(rz.model, rz.input_set, rz.feedback,
                                    rz.loop, rz.x0, w0);
  if (kind == "state") {
    const PredictorChoice& pc = rz.config.predictor;
    return simulate_state_predictor_feedback(
        rz.model, rz.feedback,
        config_for(rz.model, pc.l, pc.q, rz.loop.delay, pc.grid), rz.loop,
        rz.x0, w0);
  }
  return simulate_dynamic_feedback(rz.model, rz.input_set, build_scheme(rz),
                                   rz.loop, rz.x0, w0);
}

int cmd_simulate(const CommonOpts& opts) {
  const Config config = load_with_overrides(opts);
  const RealizedConfig rz = realize(config);
  const HistorySegment w0 = initial_history(rz, opts.history);
  const SimulationResult res = run_configured_loop(rz, w0);

  if (opts.out.empty())
    write_trajectory_csv(std::cout, res.traj);
  else
    write_trajectory_csv(opts.out, res.traj);

  // The report shares stdout with the CSV only when the CSV goes to a file.
  std::ostream& rep = opts.out.empty() ? std::cerr : std::cout;
  if (res.diverged) {
    rep << "diverged at t = " << format_double(res.blowup_time) << "\n";
    return kExitDiverged;
  }
  const DecayFit fit = estimate_decay(res.traj, 0.3, res.initial_scale);
  const bool ok = verify_envelope(res.traj, fit);
  if (fit.converged_to_zero) {
    rep << "fit: trajectory reached zero within the horizon\n";
  } else {
    rep << "fit: amplitude = " << format_double(fit.amplitude)
        << ", rate = " << format_double(fit.rate) << "\n";
  }
  rep << "envelope: " << (ok ? "ok" : "violated") << "\n";
  return ok ? kExitOk : kExitEnvelope;
}

void print_certificate_table(std::ostream& os,
                             const std::vector<Certificate>& certs) {
  os << "name                     lhs             rhs             margin      "
        "    pass  r_max\n";
  for (const auto& c : certs) {
    std::ostringstream row;
    auto col = [&row](const std::string& s, std::size_t width) {
      row << s;
      const std::size_t pad = s.size() + 2 > width ? 2 : width - s.size();
      for (std::size_t i = 0; i < pad; ++i) row << ' ';
    };
    col(c.name, 25);
    col(format_double(c.lhs), 16);
    col(format_double(c.rhs), 16);
    col(format_double(c.margin), 16);
    col(c.pass ? "yes" : "no", 6);
    row << (c.r_max ? format_double(*c.r_max) : "-");
    os << row.str() << "\n";
  }
}

int cmd_certify(const CommonOpts& opts) {
  const Config config = load_with_overrides(opts);
  const RealizedConfig rz = realize(config);
  const std::vector<Certificate> certs = applicable_certificates(rz);
  if (opts.out.empty()) {
    print_certificate_table(std::cout, certs);
  } else {
    std::ofstream out(opts.out);
    if (!out) throw ConfigError{"cannot open output file \"" + opts.out + "\""};
    print_certificate_table(out, certs);
  }
  return kExitOk;
}

std::vector<double> parse_value_list(const std::string& text,
                                     const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    // a:b expands to the integer range a..b
    const auto colon = item.find(':');
    char* end = nullptr;
    if (colon != std::string::npos) {
      const long a = std::strtol(item.c_str(), &end, 10);
      const long b = std::strtol(item.c_str() + colon + 1, &end, 10);
      if (a > b)
        throw ConfigError{"flag " + flag + ": empty range \"" + item + "\""};
      for (long v = a; v <= b; ++v) out.push_back(static_cast<double>(v));
      continue;
    }
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str())
      throw ConfigError{"flag " + flag + ": cannot parse \"" + item + "\""};
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError{"flag " + flag + ": empty list"};
  return out;
}

struct SweepOpts {
  std::string cert;
  std::string l_list, q_list, mu_list;
};

int cmd_rmax(const CommonOpts& opts, const SweepOpts& sweep) {
  const Config config = load_with_overrides(opts);
  const RealizedConfig rz = realize(config);

  std::vector<double> ls = {static_cast<double>(config.predictor.l)};
  std::vector<double> qs = {static_cast<double>(config.predictor.q)};
  std::vector<double> mus = {config.loop.mu};
  if (!sweep.l_list.empty()) ls = parse_value_list(sweep.l_list, "--l");
  if (!sweep.q_list.empty()) qs = parse_value_list(sweep.q_list, "--q");
  if (!sweep.mu_list.empty()) mus = parse_value_list(sweep.mu_list, "--mu");

  struct Cell {
    int l, q;
    double mu;
  };
  std::vector<Cell> cells;
  for (double l : ls)
    for (double q : qs)
      for (double mu : mus)
        cells.push_back({static_cast<int>(l), static_cast<int>(q), mu});

  // Independent cells fan out across hardware threads in fixed-size waves;
  // results are joined in grid order so the table stays deterministic.
  auto evaluate = [&rz](const Cell& cell) {
    RealizedConfig local = rz;
    local.config.predictor.l = cell.l;
    local.config.predictor.q = cell.q;
    local.loop.mu = cell.mu;
    local.config.loop.mu = cell.mu;
    return applicable_certificates(local);
  };
  const std::size_t workers =
      std::max<std::size_t>(1, std::thread::hardware_concurrency());
  std::vector<std::vector<Certificate>> results(cells.size());
  for (std::size_t base = 0; base < cells.size(); base += workers) {
    std::vector<std::future<std::vector<Certificate>>> wave;
    const std::size_t stop = std::min(cells.size(), base + workers);
    for (std::size_t i = base; i < stop; ++i)
      wave.push_back(std::async(std::launch::async, evaluate, cells[i]));
    for (std::size_t i = base; i < stop; ++i)
      results[i] = wave[i - base].get();
  }

  std::ostringstream table;
  table << "certificate,l,q,mu,r_max\n";
  bool cert_seen = false;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (const auto& cert : results[i]) {
      if (!sweep.cert.empty() && cert.name != sweep.cert) continue;
      cert_seen = true;
      table << cert.name << ',' << cells[i].l << ',' << cells[i].q << ','
            << format_double(cells[i].mu) << ','
            << (cert.r_max ? format_double(*cert.r_max) : "") << "\n";
    }
  }
  if (!sweep.cert.empty() && !cert_seen)
    throw ConfigError{"certificate \"" + sweep.cert +
                      "\" is not applicable to this configuration"};

  if (opts.out.empty()) {
    std::cout << table.str();
  } else {
    std::ofstream out(opts.out);
    if (!out) throw ConfigError{"cannot open output file \"" + opts.out + "\""};
    out << table.str();
  }
  return kExitOk;
}

void print_vector(std::ostream& os, const char* label, const Vec& v) {
  os << label << " = [";
  for (Eigen::Index i = 0; i < v.size(); ++i)
    os << (i ? ", " : "") << format_double(v(i));
  os << "]\n";
}

int cmd_predict(const CommonOpts& opts, const std::string& x_text) {
  const Config config = load_with_overrides(opts);
  const RealizedConfig rz = realize(config);
  const PredictorScheme scheme = build_scheme(rz);
  const HistorySegment u0 = initial_history(rz, opts.history);

  Vec x = rz.x0;
  if (!x_text.empty()) {
    const std::vector<double> vals = parse_value_list(x_text, "--x");
    if (static_cast<int>(vals.size()) != rz.model.state_dim)
      throw ConfigError{"flag --x: expected " +
                        std::to_string(rz.model.state_dim) + " entries"};
    x = Vec(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i)
      x(static_cast<Eigen::Index>(i)) = vals[i];
  }

  const double r = rz.loop.delay;
  const double h = r / std::max(1L, std::lround(r / 1e-4));
  const Vec phi = flow(rz.model, x, u0.as_signal(0.0), r, h);
  const Vec kphi = rz.feedback.k(phi);
  const Vec p = scheme.p(x, u0);

  std::ostream& os = std::cout;
  os << "scheme: " << scheme.name << "\n";
  print_vector(os, "p(x, u)", p);
  print_vector(os, "k(phi(r))  [oracle]", kphi);
  const double measured_p = (p - kphi).norm();
  os << "measured |p - k(phi)| = " << format_double(measured_p) << "\n";

  const PredictorChoice& pc = rz.config.predictor;
  const bool has_state_map = pc.kind == "picard" || pc.kind == "state" ||
                             pc.kind == "closed-form";
  if (has_state_map) {
    const PicardConfig cfg = config_for(rz.model, pc.l, pc.q, r, pc.grid);
    const Vec Phi = predict_state(rz.model, cfg, x, u0);
    print_vector(os, "Phi(x, u)", Phi);
    print_vector(os, "phi(r)     [oracle]", phi);
    const double measured_phi = (Phi - phi).norm();
    os << "measured |Phi - phi| = " << format_double(measured_phi) << "\n";
    if (cfg.contraction_ok()) {
      const double bound_phi =
          chained_error_bound(cfg, x.norm(), u0.sup_norm());
      os << "state prediction bound = " << format_double(bound_phi) << "\n";
      os << "feedback prediction bound = "
         << format_double(rz.feedback.bound * bound_phi) << "\n";
    } else {
      os << "state prediction bound: unavailable (L*T >= 1)\n";
    }
  } else if (scheme.kind == SchemeKind::Exact) {
    os << "prediction bound = 0 (exact scheme)\n";
  } else if (scheme.a1 && scheme.a2) {
    const double bound =
        std::max(*scheme.a1 * x.norm(), *scheme.a2 * u0.sup_norm());
    os << "delayed-reading bound = " << format_double(bound) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delayed-input stabilization workbench: simulate predictor "
               "feedback loops, evaluate stability certificates, solve "
               "maximum delays, and inspect predictor maps."};
  app.set_help_flag("--help", "print this help message and exit");
  app.require_subcommand(1);

  CommonOpts sim_opts, cert_opts, rmax_opts, pred_opts;
  SweepOpts sweep;
  std::string x_text;

  CLI::App* sim = app.add_subcommand(
      "simulate", "run the configured closed loop and write a CSV trajectory");
  add_common(sim, sim_opts, true);

  CLI::App* cert = app.add_subcommand(
      "certify", "evaluate every applicable stability certificate");
  add_common(cert, cert_opts, false);

  CLI::App* rmax = app.add_subcommand(
      "rmax", "solve maximum admissible delays over an l/q/mu sweep");
  add_common(rmax, rmax_opts, false);
  rmax->add_option("--cert", sweep.cert, "restrict to one certificate name");
  rmax->add_option("--l", sweep.l_list, "sweep values, e.g. 1:10 or 1,2,5");
  rmax->add_option("--q", sweep.q_list, "sweep values");
  rmax->add_option("--mu", sweep.mu_list, "sweep values, e.g. 1,10,100");

  CLI::App* pred = app.add_subcommand(
      "predict", "evaluate the predictor map against the integrated flow");
  add_common(pred, pred_opts, true);
  pred->add_option("--x", x_text, "state to predict from (comma separated)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(sim_opts);
    if (cert->parsed()) return cmd_certify(cert_opts);
    if (rmax->parsed()) return cmd_rmax(rmax_opts, sweep);
    if (pred->parsed()) return cmd_predict(pred_opts, x_text);
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
