#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "delayctl/config.hpp"
#include "delayctl/errors.hpp"
#include "delayctl/io.hpp"

using namespace delayctl;

namespace {

const char* kScalarConfig = R"json({
  "model": {"type": "scalar", "kappa": 3.0, "f": "sin"},
  "predictor": {"kind": "closed-form", "l": 1, "q": 1},
  "loop": {"mu": 1.0, "r": 0.25, "h": 0.005, "T_end": 20.0},
  "initial": {"x0": [2.0], "w0": [0.5]},
  "seed": 42
})json";

std::string write_temp(const std::string& name, const std::string& body) {
  std::ofstream out(name);
  out << body;
  return name;
}

}  // namespace

TEST_CASE("scalar config parses with defaults") {
  const Config c = parse_config(kScalarConfig);
  CHECK(c.model.type == "scalar");
  CHECK(c.model.kappa == doctest::Approx(3.0));
  CHECK(c.model.f == "sin");
  CHECK(c.predictor.kind == "closed-form");
  CHECK(c.predictor.grid == 64);  // default
  CHECK(c.loop.r == doctest::Approx(0.25));
  CHECK(c.seed == 42);
  CHECK(c.input_set.kind == "full");  // default section
  CHECK(c.certificates.empty());
}

TEST_CASE("serialization is a fixed point of parsing") {
  const char* configs[] = {
      kScalarConfig,
      R"json({"model": {"type": "linear", "A": [[0,1],[0,0]], "B": [[0],[1]]},
          "feedback": {"gain": [[-1,-2]]},
          "predictor": {"kind": "exact"},
          "loop": {"mu": 2.0, "r": 0.5, "h": 0.0025, "T_end": 10.0}})json",
      R"json({"model": {"type": "triangular", "links": ["sin(x1)", "0"],
                    "link_bound": 1.0},
          "feedback": {"gain": [[-2,-2]]},
          "iss": {"gamma": 0.5, "R": 3.0, "M": 2.0, "omega": 0.5, "eps": 1.0},
          "predictor": {"kind": "picard", "l": 2, "q": 2},
          "loop": {"r": 0.2, "h": 0.002, "T_end": 8.0},
          "initial": {"random_x0": 5.0, "random_w0": 1.0}})json",
      R"json({"model": {"type": "additive", "a": ["-x1"], "b": ["tanh(u1)"],
                    "lipschitz": 1.0},
          "input_set": {"kind": "box", "lo": [-2], "hi": [2]},
          "predictor": {"kind": "none"},
          "loop": {"r": 0.1, "h": 0.001, "T_end": 5.0},
          "certificates": ["smallgain-2.13"]})json",
  };
  for (const char* text : configs) {
    const Config once = parse_config(text);
    const std::string s1 = serialize_config(once);
    const Config twice = parse_config(s1);
    const std::string s2 = serialize_config(twice);
    CHECK(s1 == s2);
  }
}

TEST_CASE("malformed configs raise field diagnostics") {
  CHECK_THROWS_AS(parse_config("{nope"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"json({"model": {"type": "banana"}})json"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"json({"predictor": {"kind": "banana"}})json"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_config(R"json({"input_set": {"kind": "box", "lo": [0]}})json"),
      ConfigError);
  CHECK_THROWS_AS(parse_config(R"json({"loop": {"r": "fast"}})json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"json({"seed": -4})json"), ConfigError);
  try {
    parse_config(R"json({"model": {"type": "scalar", "kappa": "big"}})json");
    FAIL("expected a field diagnostic");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("model.kappa") != std::string::npos);
  }
}

TEST_CASE("realize wires the scalar benchmark") {
  const RealizedConfig rz = realize(parse_config(kScalarConfig));
  REQUIRE(rz.scalar.has_value());
  CHECK(rz.model.state_dim == 1);
  CHECK(rz.model.input_dim == 1);
  CHECK(rz.feedback.bound == doctest::Approx(4.0));  // |-(1+kappa)|
  CHECK(rz.x0(0) == doctest::Approx(2.0));
  REQUIRE(rz.w0.has_value());
  CHECK(rz.w0->dim() == 1);
  CHECK(rz.w0->intervals() == 50);  // r/h
  CHECK(rz.w0->value(-0.1)(0) == doctest::Approx(0.5));
  // constrained input sets propagate into the bundle
  Config boxed = parse_config(kScalarConfig);
  boxed.input_set.kind = "box";
  boxed.input_set.lo = {-1.0};
  boxed.input_set.hi = {1.0};
  const RealizedConfig rzb = realize(boxed);
  CHECK_FALSE(rzb.input_set.is_full());
  CHECK(rzb.scalar->input_set.project(Vec::Constant(1, 7.0))(0) ==
        doctest::Approx(1.0));
}

TEST_CASE("realize rejects inconsistent shapes") {
  Config c = parse_config(kScalarConfig);
  c.initial.x0 = {1.0, 2.0};
  CHECK_THROWS_AS(realize(c), ConfigError);

  c = parse_config(kScalarConfig);
  c.loop.h = 0.003;  // does not divide r = 0.25
  CHECK_THROWS_AS(realize(c), ConfigError);

  c = parse_config(kScalarConfig);
  c.feedback = FeedbackConfig{{{-1.0}}};  // scalar model owns its gain
  CHECK_THROWS_AS(realize(c), ConfigError);

  CHECK_THROWS_AS(
      realize(parse_config(
          R"json({"model": {"type": "linear", "A": [[0,1],[0,0]],
                        "B": [[0],[1]]}})json")),
      ConfigError);  // missing feedback

  CHECK_THROWS_AS(
      realize(parse_config(
          R"json({"model": {"type": "scalar", "f": "x - 0.1*x*x*x"}})json")),
      ConfigError);  // custom f without fprime
}

TEST_CASE("custom scalar fields go through the expression evaluator") {
  const Config c = parse_config(
      R"json({"model": {"type": "scalar", "kappa": 2.0,
                    "f": "0.5*tanh(x)", "fprime": "0.5 - 0.5*tanh(x)*tanh(x)"},
          "loop": {"r": 0.2, "h": 0.002, "T_end": 5.0}})json");
  const RealizedConfig rz = realize(c);
  REQUIRE(rz.scalar.has_value());
  CHECK(rz.scalar->f(0.3) == doctest::Approx(0.5 * std::tanh(0.3)));
  // a field breaking the slope bound is refused as a config error
  CHECK_THROWS_AS(
      realize(parse_config(
          R"json({"model": {"type": "scalar", "f": "2*x", "fprime": "2"}})json")),
      ConfigError);
}

TEST_CASE("seeded random initial data is reproducible") {
  const char* text = R"json({
    "model": {"type": "scalar", "kappa": 3.0, "f": "sin"},
    "loop": {"r": 0.25, "h": 0.005, "T_end": 5.0},
    "initial": {"random_x0": 10.0, "random_w0": 2.0},
    "seed": 7
  })json";
  const RealizedConfig a = realize(parse_config(text));
  const RealizedConfig b = realize(parse_config(text));
  CHECK(a.x0(0) == b.x0(0));
  CHECK(a.x0.norm() == doctest::Approx(10.0));
  REQUIRE(a.w0.has_value());
  CHECK(a.w0->sup_norm() == doctest::Approx(2.0));
  CHECK(a.w0->head()(0) == b.w0->head()(0));
  // with more than one state coordinate, different seeds give different
  // directions
  const char* planar = R"json({
    "model": {"type": "linear", "A": [[0,1],[0,0]], "B": [[0],[1]]},
    "feedback": {"gain": [[-1,-2]]},
    "loop": {"r": 0.25, "h": 0.005, "T_end": 5.0},
    "initial": {"random_x0": 5.0},
    "seed": 7
  })json";
  Config other = parse_config(planar);
  const RealizedConfig c1 = realize(other);
  other.seed = 8;
  const RealizedConfig c2 = realize(other);
  CHECK(c1.x0.norm() == doctest::Approx(5.0));
  CHECK((c1.x0 - c2.x0).norm() > 1e-6);
}

TEST_CASE("history expressions sample the ring grid") {
  const Config c = parse_config(R"json({
    "model": {"type": "scalar", "kappa": 3.0, "f": "sin"},
    "loop": {"r": 0.5, "h": 0.005, "T_end": 5.0},
    "initial": {"w0_expr": ["sin(3*t)"]}
  })json");
  const RealizedConfig rz = realize(c);
  REQUIRE(rz.w0.has_value());
  CHECK(rz.w0->value(-0.5)(0) == doctest::Approx(std::sin(-1.5)));
  CHECK(rz.w0->value(0.0)(0) == doctest::Approx(0.0));
  CHECK(rz.w0->value(-0.25)(0) == doctest::Approx(std::sin(-0.75)));
}

TEST_CASE("shortest round-trip formatting is exact") {
  const double values[] = {0.0,   -0.0,   0.1,    1.0 / 3.0, 2.5e17,
                           1e-300, -7.25, 3.0e8, 0.26287812,
                           6.62607015e-34};
  for (double v : values) {
    const std::string s = format_double(v);
    const double back = std::strtod(s.c_str(), nullptr);
    CHECK(back == v);
  }
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("trajectory csv layout") {
  Trajectory traj;
  traj.t = {0.0, 0.5};
  traj.x = {Vec::Constant(2, 1.0), Vec::Constant(2, 2.0)};
  traj.u = {Vec::Constant(1, 0.25), Vec::Constant(1, 0.5)};
  traj.w = {Vec::Constant(1, 3.0), Vec::Constant(1, 4.0)};
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x_1,x_2,u_1,w_1,norm");
  std::getline(in, line);
  CHECK(line.substr(0, 2) == "0,");
  // norm column = |x| + |w|
  const double norm0 = std::sqrt(2.0) * 1.0 + 3.0;
  CHECK(line.find(format_double(norm0)) != std::string::npos);
  std::getline(in, line);
  CHECK(line.rfind("0.5,", 0) == 0);
}

TEST_CASE("history csv reader validates the grid") {
  const std::string good = write_temp("tmp_hist_good.csv",
                                      "theta,u_1\n"
                                      "-0.5,1\n"
                                      "-0.25,2\n"
                                      "0,3\n");
  const HistorySegment h = read_history_csv(good, 0.5);
  CHECK(h.dim() == 1);
  CHECK(h.intervals() == 2);
  CHECK(h.value(-0.5)(0) == doctest::Approx(1.0));
  CHECK(h.value(0.0)(0) == doctest::Approx(3.0));
  CHECK(h.value(-0.375)(0) == doctest::Approx(1.5));  // linear interpolation

  write_temp("tmp_hist_start.csv", "-0.4,1\n-0.2,2\n0,3\n");
  CHECK_THROWS_AS(read_history_csv("tmp_hist_start.csv", 0.5), ConfigError);
  write_temp("tmp_hist_ragged.csv", "-0.5,1\n-0.25,2,9\n0,3\n");
  CHECK_THROWS_AS(read_history_csv("tmp_hist_ragged.csv", 0.5), ConfigError);
  write_temp("tmp_hist_junk.csv", "-0.5,1\n-0.25,two\n0,3\n");
  CHECK_THROWS_AS(read_history_csv("tmp_hist_junk.csv", 0.5), ConfigError);
  CHECK_THROWS_AS(read_history_csv("tmp_hist_missing.csv", 0.5), ConfigError);
}
