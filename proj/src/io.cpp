#include "delayctl/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "delayctl/errors.hpp"

namespace delayctl {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

void write_header(std::ostream& os, Eigen::Index n, Eigen::Index mu,
                  Eigen::Index mw) {
  os << 't';
  for (Eigen::Index i = 1; i <= n; ++i) os << ",x_" << i;
  for (Eigen::Index i = 1; i <= mu; ++i) os << ",u_" << i;
  for (Eigen::Index i = 1; i <= mw; ++i) os << ",w_" << i;
  os << ",norm\n";
}

std::vector<double> parse_row(const std::string& line, std::size_t lineno) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) comma = line.size();
    const std::string field = line.substr(pos, comma - pos);
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0')
      throw ConfigError{"history csv line " + std::to_string(lineno) +
                        ": cannot parse field \"" + field + "\""};
    out.push_back(v);
    pos = comma + 1;
    if (comma == line.size()) break;
  }
  return out;
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  if (traj.size() == 0) throw ContractViolation{"empty trajectory"};
  const Eigen::Index n = traj.x.front().size();
  const Eigen::Index mu = traj.u.empty() ? 0 : traj.u.front().size();
  const Eigen::Index mw = traj.w.empty() ? 0 : traj.w.front().size();
  write_header(os, n, mu, mw);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    os << format_double(traj.t[i]);
    for (Eigen::Index k = 0; k < n; ++k)
      os << ',' << format_double(traj.x[i](k));
    for (Eigen::Index k = 0; k < mu; ++k)
      os << ',' << format_double(traj.u[i](k));
    for (Eigen::Index k = 0; k < mw; ++k)
      os << ',' << format_double(traj.w[i](k));
    os << ',' << format_double(traj.norm_at(i)) << '\n';
  }
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw ConfigError{"cannot open output file \"" + path + "\""};
  write_trajectory_csv(out, traj);
}

HistorySegment read_history_csv(const std::string& path, double r) {
  std::ifstream in(path);
  if (!in) throw ConfigError{"cannot open history file \"" + path + "\""};
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 &&
        line.find_first_not_of("0123456789+-.eE, \t") != std::string::npos)
      continue;  // header
    rows.push_back(parse_row(line, lineno));
  }
  if (rows.size() < 2)
    throw ConfigError{"history csv needs at least two sample rows"};
  const std::size_t width = rows.front().size();
  if (width < 2)
    throw ConfigError{"history csv rows need a time column and at least one "
                      "input column"};
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].size() != width)
      throw ConfigError{"history csv row " + std::to_string(i + 1) + " has " +
                        std::to_string(rows[i].size()) +
                        " fields, expected " + std::to_string(width)};

  const double tol = 1e-9 * (1.0 + r);
  if (std::abs(rows.front()[0] + r) > tol)
    throw ConfigError{"history csv must start at -r = " + format_double(-r)};
  if (std::abs(rows.back()[0]) > tol)
    throw ConfigError{"history csv must end at 0"};
  const double dt = r / static_cast<double>(rows.size() - 1);
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (std::abs(rows[i][0] - (-r + dt * static_cast<double>(i))) > tol)
      throw ConfigError{"history csv must be sampled on a uniform grid"};

  Mat samples(static_cast<Eigen::Index>(width - 1),
              static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 1; k < width; ++k)
      samples(static_cast<Eigen::Index>(k - 1),
              static_cast<Eigen::Index>(i)) = rows[i][k];
  return HistorySegment(r, samples);
}

}  // namespace delayctl
