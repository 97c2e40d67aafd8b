#include "delayctl/config.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>

#include "json.hpp"

#include "delayctl/errors.hpp"
#include "delayctl/expr.hpp"

namespace delayctl {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void bad_field(const std::string& where, const std::string& why) {
  throw ConfigError{"config field \"" + where + "\": " + why};
}

const json* find(const json& j, const char* key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) bad_field(where, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) bad_field(where, "expected an integer");
  return j.get<int>();
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) bad_field(where, "expected a string");
  return j.get<std::string>();
}

std::vector<double> as_vector(const json& j, const std::string& where) {
  if (!j.is_array()) bad_field(where, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::vector<double>> as_matrix(const json& j,
                                           const std::string& where) {
  if (!j.is_array()) bad_field(where, "expected an array of rows");
  std::vector<std::vector<double>> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_vector(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::string> as_strings(const json& j, const std::string& where) {
  if (!j.is_array()) bad_field(where, "expected an array of strings");
  std::vector<std::string> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_string(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

ModelConfig parse_model(const json& j) {
  ModelConfig m;
  if (const json* t = find(j, "type")) m.type = as_string(*t, "model.type");
  if (m.type == "scalar") {
    if (const json* v = find(j, "kappa"))
      m.kappa = as_number(*v, "model.kappa");
    if (const json* v = find(j, "f")) m.f = as_string(*v, "model.f");
    if (const json* v = find(j, "fprime"))
      m.fprime = as_string(*v, "model.fprime");
  } else if (m.type == "linear") {
    if (const json* v = find(j, "A")) m.A = as_matrix(*v, "model.A");
    if (const json* v = find(j, "B")) m.B = as_matrix(*v, "model.B");
  } else if (m.type == "triangular") {
    if (const json* v = find(j, "links"))
      m.links = as_strings(*v, "model.links");
    if (const json* v = find(j, "link_bound"))
      m.link_bound = as_number(*v, "model.link_bound");
  } else if (m.type == "additive") {
    if (const json* v = find(j, "a")) m.a = as_strings(*v, "model.a");
    if (const json* v = find(j, "b")) m.b = as_strings(*v, "model.b");
    if (const json* v = find(j, "lipschitz"))
      m.lipschitz = as_number(*v, "model.lipschitz");
  } else {
    bad_field("model.type", "unknown model type \"" + m.type +
                                "\" (expected scalar, linear, triangular, or "
                                "additive)");
  }
  return m;
}

InputSetConfig parse_input_set(const json& j) {
  InputSetConfig s;
  if (const json* v = find(j, "kind")) s.kind = as_string(*v, "input_set.kind");
  if (s.kind == "full") {
    // no parameters
  } else if (s.kind == "box") {
    if (const json* v = find(j, "lo"))
      s.lo = as_vector(*v, "input_set.lo");
    else
      bad_field("input_set.lo", "required for a box input set");
    if (const json* v = find(j, "hi"))
      s.hi = as_vector(*v, "input_set.hi");
    else
      bad_field("input_set.hi", "required for a box input set");
  } else if (s.kind == "ball") {
    if (const json* v = find(j, "radius"))
      s.radius = as_number(*v, "input_set.radius");
    else
      bad_field("input_set.radius", "required for a ball input set");
  } else {
    bad_field("input_set.kind", "unknown kind \"" + s.kind +
                                    "\" (expected full, box, or ball)");
  }
  return s;
}

PredictorChoice parse_predictor(const json& j) {
  PredictorChoice p;
  if (const json* v = find(j, "kind"))
    p.kind = as_string(*v, "predictor.kind");
  static const char* kinds[] = {"picard", "closed-form", "exact",
                                "none",   "state",       "static"};
  bool known = false;
  for (const char* k : kinds) known = known || p.kind == k;
  if (!known)
    bad_field("predictor.kind",
              "unknown kind \"" + p.kind +
                  "\" (expected picard, closed-form, exact, none, state, or "
                  "static)");
  if (const json* v = find(j, "l")) p.l = as_int(*v, "predictor.l");
  if (const json* v = find(j, "q")) p.q = as_int(*v, "predictor.q");
  if (const json* v = find(j, "grid")) p.grid = as_int(*v, "predictor.grid");
  return p;
}

LoopConfig parse_loop(const json& j) {
  LoopConfig l;
  if (const json* v = find(j, "mu")) l.mu = as_number(*v, "loop.mu");
  if (const json* v = find(j, "r")) l.r = as_number(*v, "loop.r");
  if (const json* v = find(j, "h")) l.h = as_number(*v, "loop.h");
  if (const json* v = find(j, "T_end")) l.T_end = as_number(*v, "loop.T_end");
  return l;
}

InitialConfig parse_initial(const json& j) {
  InitialConfig init;
  if (const json* v = find(j, "x0")) init.x0 = as_vector(*v, "initial.x0");
  if (const json* v = find(j, "w0")) init.w0 = as_vector(*v, "initial.w0");
  if (const json* v = find(j, "w0_expr"))
    init.w0_expr = as_strings(*v, "initial.w0_expr");
  if (const json* v = find(j, "random_x0"))
    init.random_x0 = as_number(*v, "initial.random_x0");
  if (const json* v = find(j, "random_w0"))
    init.random_w0 = as_number(*v, "initial.random_w0");
  if (!init.w0.empty() && !init.w0_expr.empty())
    bad_field("initial.w0_expr", "w0 and w0_expr are mutually exclusive");
  return init;
}

IssConfig parse_iss(const json& j) {
  IssConfig c;
  if (const json* v = find(j, "gamma")) c.gamma = as_number(*v, "iss.gamma");
  if (const json* v = find(j, "R")) c.R = as_number(*v, "iss.R");
  if (const json* v = find(j, "M")) c.M = as_number(*v, "iss.M");
  if (const json* v = find(j, "omega")) c.omega = as_number(*v, "iss.omega");
  if (const json* v = find(j, "eps")) c.eps = as_number(*v, "iss.eps");
  return c;
}

ojson dump_matrix(const std::vector<std::vector<double>>& rows) {
  ojson out = ojson::array();
  for (const auto& row : rows) out.push_back(row);
  return out;
}

Mat to_matrix(const std::vector<std::vector<double>>& rows,
              const std::string& where) {
  if (rows.empty()) bad_field(where, "matrix must have at least one row");
  const std::size_t cols = rows.front().size();
  if (cols == 0) bad_field(where, "matrix rows must be non-empty");
  Mat out(static_cast<Eigen::Index>(rows.size()),
          static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols)
      bad_field(where, "row " + std::to_string(i) + " has " +
                           std::to_string(rows[i].size()) +
                           " entries, expected " + std::to_string(cols));
    for (std::size_t k = 0; k < cols; ++k)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          rows[i][k];
  }
  return out;
}

Vec to_vector(const std::vector<double>& values) {
  Vec out(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = values[i];
  return out;
}

ISSConstants to_iss(const IssConfig& c) {
  return ISSConstants{c.gamma, c.R, c.M, c.omega, c.eps};
}

/// Wraps an expression over the first `count` coordinates of a vector.
std::function<double(const Vec&)> head_function(const std::string& text,
                                                int count,
                                                const std::string& where) {
  std::vector<std::string> vars;
  vars.reserve(static_cast<std::size_t>(count));
  for (int i = 1; i <= count; ++i) vars.push_back("x" + std::to_string(i));
  std::shared_ptr<Expression> ex;
  try {
    ex = std::make_shared<Expression>(text, vars);
  } catch (const ConfigError& e) {
    bad_field(where, e.what());
  }
  return [ex, count](const Vec& head) {
    std::vector<double> vals(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
      vals[static_cast<std::size_t>(i)] = head(i);
    return ex->eval(vals);
  };
}

/// Wraps per-row expressions over all coordinates (prefix `x` or `u`).
std::function<Vec(const Vec&)> rows_function(
    const std::vector<std::string>& rows, int dim, const std::string& prefix,
    const std::string& where) {
  std::vector<std::string> vars;
  vars.reserve(static_cast<std::size_t>(dim));
  for (int i = 1; i <= dim; ++i) vars.push_back(prefix + std::to_string(i));
  auto exprs = std::make_shared<std::vector<Expression>>();
  exprs->reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    try {
      exprs->emplace_back(rows[i], vars);
    } catch (const ConfigError& e) {
      bad_field(where + "[" + std::to_string(i) + "]", e.what());
    }
  }
  const auto out_dim = static_cast<Eigen::Index>(rows.size());
  return [exprs, dim, out_dim](const Vec& v) {
    std::vector<double> vals(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i)
      vals[static_cast<std::size_t>(i)] = v(i);
    Vec out(out_dim);
    for (Eigen::Index i = 0; i < out_dim; ++i)
      out(i) = (*exprs)[static_cast<std::size_t>(i)].eval(vals);
    return out;
  };
}

Vec random_direction(std::mt19937_64& rng, Eigen::Index dim, double norm) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(dim);
  do {
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = gauss(rng);
  } while (v.norm() < 1e-12);
  return v * (norm / v.norm());
}

}  // namespace

Config parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError{std::string{"config parse error: "} + e.what()};
  }
  if (!j.is_object()) throw ConfigError{"config root must be a JSON object"};

  Config c;
  if (const json* v = find(j, "model")) c.model = parse_model(*v);
  if (const json* v = find(j, "feedback")) {
    FeedbackConfig fb;
    if (const json* g = find(*v, "gain"))
      fb.gain = as_matrix(*g, "feedback.gain");
    else
      bad_field("feedback.gain", "required when a feedback section is given");
    c.feedback = fb;
  }
  if (const json* v = find(j, "input_set")) c.input_set = parse_input_set(*v);
  if (const json* v = find(j, "predictor")) c.predictor = parse_predictor(*v);
  if (const json* v = find(j, "loop")) c.loop = parse_loop(*v);
  if (const json* v = find(j, "initial")) c.initial = parse_initial(*v);
  if (const json* v = find(j, "iss")) c.iss = parse_iss(*v);
  if (const json* v = find(j, "certificates"))
    c.certificates = as_strings(*v, "certificates");
  if (const json* v = find(j, "seed")) {
    if (!v->is_number_integer() || v->get<long long>() < 0)
      bad_field("seed", "expected a non-negative integer");
    c.seed = v->get<unsigned long>();
  }
  return c;
}

Config load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError{"cannot open config file \"" + path + "\""};
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const Config& config) {
  ojson j;

  ojson model;
  model["type"] = config.model.type;
  if (config.model.type == "scalar") {
    model["kappa"] = config.model.kappa;
    model["f"] = config.model.f;
    if (!config.model.fprime.empty()) model["fprime"] = config.model.fprime;
  } else if (config.model.type == "linear") {
    model["A"] = dump_matrix(config.model.A);
    model["B"] = dump_matrix(config.model.B);
  } else if (config.model.type == "triangular") {
    model["links"] = config.model.links;
    model["link_bound"] = config.model.link_bound;
  } else if (config.model.type == "additive") {
    model["a"] = config.model.a;
    model["b"] = config.model.b;
    model["lipschitz"] = config.model.lipschitz;
  }
  j["model"] = model;

  if (config.feedback) {
    ojson fb;
    fb["gain"] = dump_matrix(config.feedback->gain);
    j["feedback"] = fb;
  }

  ojson input_set;
  input_set["kind"] = config.input_set.kind;
  if (config.input_set.kind == "box") {
    input_set["lo"] = config.input_set.lo;
    input_set["hi"] = config.input_set.hi;
  } else if (config.input_set.kind == "ball") {
    input_set["radius"] = config.input_set.radius;
  }
  j["input_set"] = input_set;

  ojson predictor;
  predictor["kind"] = config.predictor.kind;
  predictor["l"] = config.predictor.l;
  predictor["q"] = config.predictor.q;
  predictor["grid"] = config.predictor.grid;
  j["predictor"] = predictor;

  ojson loop;
  loop["mu"] = config.loop.mu;
  loop["r"] = config.loop.r;
  loop["h"] = config.loop.h;
  loop["T_end"] = config.loop.T_end;
  j["loop"] = loop;

  ojson initial;
  if (!config.initial.x0.empty()) initial["x0"] = config.initial.x0;
  if (!config.initial.w0.empty()) initial["w0"] = config.initial.w0;
  if (!config.initial.w0_expr.empty())
    initial["w0_expr"] = config.initial.w0_expr;
  if (config.initial.random_x0 > 0)
    initial["random_x0"] = config.initial.random_x0;
  if (config.initial.random_w0 > 0)
    initial["random_w0"] = config.initial.random_w0;
  j["initial"] = initial;

  if (config.iss) {
    ojson iss;
    iss["gamma"] = config.iss->gamma;
    iss["R"] = config.iss->R;
    iss["M"] = config.iss->M;
    iss["omega"] = config.iss->omega;
    iss["eps"] = config.iss->eps;
    j["iss"] = iss;
  }

  if (!config.certificates.empty()) j["certificates"] = config.certificates;
  j["seed"] = config.seed;

  return j.dump(2) + "\n";
}

RealizedConfig realize(const Config& config) {
  RealizedConfig rz;
  rz.config = config;

  const LoopConfig& lc = config.loop;
  if (!(lc.r > 0)) bad_field("loop.r", "delay must be positive");
  if (!(lc.h > 0)) bad_field("loop.h", "step must be positive");
  if (!(lc.T_end > 0)) bad_field("loop.T_end", "horizon must be positive");
  if (!(lc.mu > 0)) bad_field("loop.mu", "tracking rate must be positive");
  rz.loop = LoopOptions{lc.mu, lc.r, lc.h, lc.T_end};

  const ModelConfig& mc = config.model;
  try {
    if (mc.type == "scalar") {
      if (config.feedback)
        bad_field("feedback",
                  "the scalar model derives its feedback from kappa; omit "
                  "the feedback section");
      if (mc.f == "sin" || mc.f == "tanh") {
        rz.scalar = scalar_benchmark(mc.kappa, lc.r, mc.f);
      } else {
        if (mc.fprime.empty())
          bad_field("model.fprime",
                    "required when model.f is a custom expression");
        auto fe = std::make_shared<Expression>(mc.f,
                                               std::vector<std::string>{"x"});
        auto fpe = std::make_shared<Expression>(
            mc.fprime, std::vector<std::string>{"x"});
        rz.scalar = scalar_benchmark(
            mc.kappa, lc.r, [fe](double x) { return fe->eval({x}); },
            [fpe](double x) { return fpe->eval({x}); }, mc.f);
      }
      rz.model = rz.scalar->model;
      rz.feedback = rz.scalar->feedback;
      rz.has_feedback = true;
    } else if (mc.type == "linear") {
      const Mat A = to_matrix(mc.A, "model.A");
      const Mat B = to_matrix(mc.B, "model.B");
      if (!config.feedback)
        bad_field("feedback", "the linear model requires a gain matrix");
      const Mat gain = to_matrix(config.feedback->gain, "feedback.gain");
      rz.linear = linear_smith(A, B, gain, lc.r);
      if (config.iss) rz.linear->iss = to_iss(*config.iss);
      rz.model = rz.linear->model;
      rz.feedback = rz.linear->feedback;
      rz.has_feedback = true;
    } else if (mc.type == "triangular") {
      if (mc.links.empty())
        bad_field("model.links", "at least one link is required");
      if (!config.feedback)
        bad_field("feedback", "the triangular model requires a gain matrix");
      std::vector<std::function<double(const Vec&)>> links;
      links.reserve(mc.links.size());
      for (std::size_t i = 0; i < mc.links.size(); ++i)
        links.push_back(head_function(
            mc.links[i], static_cast<int>(i) + 1,
            "model.links[" + std::to_string(i) + "]"));
      const Mat gain = to_matrix(config.feedback->gain, "feedback.gain");
      std::optional<ISSConstants> iss;
      if (config.iss) iss = to_iss(*config.iss);
      rz.triangular =
          triangular_chain(std::move(links), mc.link_bound, gain, lc.r, iss);
      rz.model = rz.triangular->model;
      rz.feedback = rz.triangular->feedback;
      rz.has_feedback = true;
    } else if (mc.type == "additive") {
      if (mc.a.empty()) bad_field("model.a", "at least one row is required");
      if (mc.b.empty()) bad_field("model.b", "at least one row is required");
      const int n = static_cast<int>(mc.a.size());
      const int m = static_cast<int>(mc.b.size());
      if (m != n)
        bad_field("model.b",
                  "b must have as many rows as a (both map into the state)");
      if (!(mc.lipschitz > 0))
        bad_field("model.lipschitz", "a positive bound is required");
      rz.additive = additive_bundle(
          n, m, rows_function(mc.a, n, "x", "model.a"),
          rows_function(mc.b, m, "u", "model.b"), mc.lipschitz);
      rz.model = rz.additive->model;
      if (config.feedback) {
        const Mat gain = to_matrix(config.feedback->gain, "feedback.gain");
        if (gain.cols() != n || gain.rows() != m)
          bad_field("feedback.gain",
                    "expected a " + std::to_string(m) + "x" +
                        std::to_string(n) + " matrix");
        rz.feedback = FeedbackLaw::linear_gain(gain);
        rz.has_feedback = true;
      }
    } else {
      bad_field("model.type", "unknown model type \"" + mc.type + "\"");
    }
  } catch (const ScenarioRefused& e) {
    throw ConfigError{std::string{"model rejected: "} + e.what()};
  }

  const int m = rz.model.input_dim;
  const InputSetConfig& sc = config.input_set;
  if (sc.kind == "full") {
    rz.input_set = InputSet::full(m);
  } else if (sc.kind == "box") {
    if (static_cast<int>(sc.lo.size()) != m ||
        static_cast<int>(sc.hi.size()) != m)
      bad_field("input_set", "lo/hi must have " + std::to_string(m) +
                                 " entries to match the input dimension");
    for (int i = 0; i < m; ++i)
      if (!(sc.lo[static_cast<std::size_t>(i)] <
            sc.hi[static_cast<std::size_t>(i)]))
        bad_field("input_set", "lo must be strictly below hi");
    rz.input_set = InputSet::box(to_vector(sc.lo), to_vector(sc.hi));
  } else {
    if (!(sc.radius > 0))
      bad_field("input_set.radius", "radius must be positive");
    rz.input_set = InputSet::ball(m, sc.radius);
  }
  if (rz.scalar) rz.scalar->input_set = rz.input_set;
  if (rz.linear) rz.linear->input_set = rz.input_set;
  if (rz.triangular) rz.triangular->input_set = rz.input_set;

  std::mt19937_64 rng(config.seed);
  const int n = rz.model.state_dim;
  const InitialConfig& init = config.initial;
  if (!init.x0.empty()) {
    if (static_cast<int>(init.x0.size()) != n)
      bad_field("initial.x0", "expected " + std::to_string(n) + " entries");
    rz.x0 = to_vector(init.x0);
  } else if (init.random_x0 > 0) {
    rz.x0 = random_direction(rng, n, init.random_x0);
  } else {
    rz.x0 = Vec::Zero(n);
  }

  const double ratio = lc.r / lc.h;
  const auto intervals = static_cast<int>(std::lround(ratio));
  if (intervals < 1 || std::abs(ratio - intervals) > 1e-9 * ratio)
    throw ConfigError{"closed-loop step h does not divide the delay/horizon"};

  const bool wants_w0 = !init.w0.empty() || !init.w0_expr.empty() ||
                        init.random_w0 > 0;
  if (wants_w0) {
    Mat samples(m, intervals + 1);
    if (!init.w0.empty()) {
      if (static_cast<int>(init.w0.size()) != m)
        bad_field("initial.w0", "expected " + std::to_string(m) + " entries");
      samples.colwise() = to_vector(init.w0);
    } else if (!init.w0_expr.empty()) {
      if (static_cast<int>(init.w0_expr.size()) != m)
        bad_field("initial.w0_expr",
                  "expected " + std::to_string(m) + " expressions");
      std::vector<std::shared_ptr<Expression>> exprs;
      for (std::size_t i = 0; i < init.w0_expr.size(); ++i) {
        try {
          exprs.push_back(std::make_shared<Expression>(
              init.w0_expr[i], std::vector<std::string>{"t"}));
        } catch (const ConfigError& e) {
          bad_field("initial.w0_expr[" + std::to_string(i) + "]", e.what());
        }
      }
      for (int k = 0; k <= intervals; ++k) {
        const double t = -lc.r + lc.h * k;
        for (int i = 0; i < m; ++i)
          samples(i, k) = exprs[static_cast<std::size_t>(i)]->eval({t});
      }
    } else {
      samples.colwise() = random_direction(rng, m, init.random_w0);
    }
    rz.w0 = HistorySegment(lc.r, samples);
  }

  return rz;
}

PredictorScheme build_scheme(const RealizedConfig& rz) {
  const PredictorChoice& pc = rz.config.predictor;
  const double r = rz.loop.delay;
  if (pc.kind == "closed-form") {
    if (!rz.scalar)
      throw UnsupportedScheme{
          "closed-form predictors exist only for the scalar model"};
    return rz.scalar->closed_form_scheme(pc.l, pc.q);
  }
  if (pc.kind == "exact") {
    if (!rz.linear)
      throw UnsupportedScheme{
          "the exact predictor exists only for the linear model"};
    return rz.linear->scheme;
  }
  if (!rz.has_feedback)
    throw UnsupportedScheme{"the configured model declares no feedback law"};
  if (pc.kind == "picard")
    return make_picard_predictor(rz.model, rz.feedback,
                                 config_for(rz.model, pc.l, pc.q, r, pc.grid),
                                 rz.input_set);
  if (pc.kind == "state")
    return make_state_predictor_scheme(
        rz.model, rz.feedback, config_for(rz.model, pc.l, pc.q, r, pc.grid));
  if (pc.kind == "none") return no_predictor_scheme(rz.model, rz.feedback, r);
  throw UnsupportedScheme{"predictor kind \"" + pc.kind +
                          "\" does not define a scheme"};
}

std::vector<Certificate> applicable_certificates(const RealizedConfig& rz) {
  std::vector<Certificate> all;
  const PredictorChoice& pc = rz.config.predictor;
  const double mu = rz.loop.mu;
  if (rz.scalar) {
    all = scalar_certificates(*rz.scalar, pc.l, pc.q, mu);
  } else if (rz.linear) {
    all = linear_certificates(*rz.linear, mu);
  } else if (rz.triangular) {
    all = triangular_certificates(*rz.triangular, pc.l, pc.q, mu);
  }
  const auto& wanted = rz.config.certificates;
  if (wanted.empty()) return all;
  std::vector<Certificate> out;
  for (const auto& name : wanted) {
    bool found = false;
    for (const auto& cert : all) {
      if (cert.name == name) {
        out.push_back(cert);
        found = true;
      }
    }
    if (!found)
      throw ConfigError{"certificate \"" + name +
                        "\" is not applicable to this configuration"};
  }
  return out;
}

}  // namespace delayctl
