#include "qetlab/config.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

using namespace qet;

namespace {

std::vector<std::string> errors_of(const std::string &raw, const std::string &cmd) {
  try {
    validate_config(raw, cmd);
  } catch (const ConfigError &e) {
    return e.messages();
  }
  return {};
}

bool mentions(const std::vector<std::string> &msgs, const std::string &needle) {
  return std::any_of(msgs.begin(), msgs.end(),
                     [&](const std::string &m) { return m.find(needle) != std::string::npos; });
}

std::string run(const RunConfig &c, int threads, int *code = nullptr) {
  std::ostringstream out;
  const int rc = dispatch(c, out, threads);
  if (code)
    *code = rc;
  return out.str();
}

} // namespace

TEST(Config, EmptyObjectGivesCommandDefaults) {
  const auto c = validate_config("{}", "verify-theorem1");
  EXPECT_EQ(c.command, "verify-theorem1");
  EXPECT_EQ(c.dim, 2);
  EXPECT_EQ(c.beta, 1.0);
  EXPECT_EQ(c.samples, 1000);
  EXPECT_EQ(c.tolerance, 1e-8);
  EXPECT_EQ(validate_config("{}", "pareto").family, "interpolated");
  EXPECT_EQ(validate_config("{}", "theorem2").n, 2);
  EXPECT_EQ(validate_config("{}", "locc-equiv").g, 0.5);
}

TEST(Config, ListsEveryProblemAtOnce) {
  const auto msgs = errors_of(R"({"beta": -1, "dim": 1, "samples": 0, "colour": "red"})",
                              "verify-theorem1");
  EXPECT_TRUE(mentions(msgs, "beta"));
  EXPECT_TRUE(mentions(msgs, "dim"));
  EXPECT_TRUE(mentions(msgs, "samples"));
  EXPECT_TRUE(mentions(msgs, "colour"));
  EXPECT_GE(msgs.size(), 4u);
}

TEST(Config, RejectsFieldsOfOtherCommands) {
  EXPECT_TRUE(mentions(errors_of(R"({"K": 2})", "pareto"), "K"));
  EXPECT_TRUE(mentions(errors_of(R"({"command": "pareto"})", "theorem2"), "command"));
  EXPECT_TRUE(mentions(errors_of("not json", "pareto"), "JSON"));
  EXPECT_THROW(validate_config("{}", "frobnicate"), ConfigError);
}

TEST(Config, RangeChecks) {
  EXPECT_TRUE(mentions(errors_of(R"({"theta": 2.0})", "tradeoff-point"), "theta"));
  EXPECT_TRUE(mentions(errors_of(R"({"n": 5, "dim": 2})", "theorem2"), "256"));
  EXPECT_TRUE(mentions(errors_of(R"({"K": 9})", "locc-equiv"), "K"));
  EXPECT_TRUE(mentions(errors_of(R"({"order": [1, 1], "K": 2})", "locc-equiv"), "order"));
  EXPECT_TRUE(mentions(errors_of(R"({"t": "0:5"})", "wormhole-curve"), "t"));
  EXPECT_TRUE(mentions(errors_of(R"({"weights": [0, 0]})", "theorem2"), "weights"));
  EXPECT_TRUE(mentions(errors_of(R"({"family": "bell,spiral"})", "pareto"), "spiral"));
}

TEST(Config, InfersDimensionFromInputs) {
  EXPECT_EQ(validate_config(R"({"weights": [1, 2, 3]})", "theorem2").dim, 3);
  EXPECT_EQ(validate_config(R"({"hamiltonian": {"eigenvalues": [0, 1, 3]}})", "pareto").dim, 3);
}

TEST(Config, TimeRangeParses) {
  const auto c = validate_config(R"({"t": "0.5:2:0.25"})", "wormhole-curve");
  EXPECT_EQ(c.t_start, 0.5);
  EXPECT_EQ(c.t_stop, 2.0);
  EXPECT_EQ(c.t_step, 0.25);
}

TEST(Config, RoundTripsThroughJson) {
  for (const auto &cmd : subcommands()) {
    const auto c = validate_config("{}", cmd);
    const auto again = validate_config(config_to_json(c), cmd);
    EXPECT_EQ(c, again) << cmd;
  }
  const auto c = validate_config(R"({"beta": 0.25, "seed": 99, "samples": 12})", "pareto");
  EXPECT_EQ(validate_config(config_to_json(c), "pareto"), c);
}

TEST(Config, ProvenanceLine) {
  const auto c = validate_config("{}", "pareto");
  const auto line = provenance_line(c);
  EXPECT_EQ(line.rfind("# qetlab " + version() + " config={", 0), 0u);
  EXPECT_EQ(line.find('\n'), std::string::npos);
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_number(x)), x);
}

TEST(Dispatch, ParetoCsvLayout) {
  auto c = validate_config(R"({"samples": 5})", "pareto");
  int rc = -1;
  const auto out = run(c, 1, &rc);
  EXPECT_EQ(rc, exit_pass);
  std::istringstream in(out);
  std::string l1, l2, l3;
  std::getline(in, l1);
  std::getline(in, l2);
  std::getline(in, l3);
  EXPECT_EQ(l1, provenance_line(c));
  EXPECT_EQ(l2.rfind("# bound_line", 0), 0u);
  EXPECT_EQ(l3, "family,theta,seed,n,beta_E,S,bound,slack");
  EXPECT_EQ(std::count(out.begin(), out.end(), '\n'), 3 + 2 + 5);
}

TEST(Dispatch, OutputIndependentOfThreadCount) {
  const auto c = validate_config(R"({"samples": 40, "seed": 5, "dim": 3})", "verify-theorem1");
  EXPECT_EQ(run(c, 1), run(c, 6));
  const auto t = validate_config(R"({"samples": 20, "seed": 5, "n": 2})", "theorem2");
  EXPECT_EQ(run(t, 1), run(t, 3));
}

TEST(Dispatch, JsonEnvelopeAndBits) {
  auto c = validate_config(R"({"family": "bell"})", "tradeoff-point");
  int rc = -1;
  const auto j = nlohmann::json::parse(run(c, 1, &rc));
  EXPECT_EQ(rc, exit_pass);
  EXPECT_EQ(j.at("units"), "nats");
  EXPECT_EQ(j.at("qetlab_version"), version());
  const double s = j.at("result").at("S").get<double>();
  c.bits = true;
  const auto jb = nlohmann::json::parse(run(c, 1));
  EXPECT_EQ(jb.at("units"), "bits");
  EXPECT_NEAR(jb.at("result").at("S").get<double>(), s / std::log(2.0), 1e-14);
}

TEST(Dispatch, ExplicitProtocol) {
  const auto c = validate_config(
      R"({"protocol": {"measurement": {"family": "product"}, "decoder": "none"}})",
      "tradeoff-point");
  int rc = -1;
  const auto j = nlohmann::json::parse(run(c, 1, &rc));
  EXPECT_EQ(rc, exit_pass);
  EXPECT_EQ(j.at("result").at("beta_E").get<double>(), 0.0);
}

TEST(Dispatch, WormholeCurveHeader) {
  const auto c = validate_config(R"({"t": "0:1:0.5"})", "wormhole-curve");
  int rc = -1;
  const auto out = run(c, 1, &rc);
  EXPECT_EQ(rc, exit_pass);
  EXPECT_NE(out.find("t,E\n0,0\n0.5,"), std::string::npos);
}

TEST(Dispatch, ErgotropyScalingAndLocc) {
  int rc = -1;
  run(validate_config(R"({"n": 3, "samples": 2})", "ergotropy-scaling"), 1, &rc);
  EXPECT_EQ(rc, exit_pass);
  const auto j = nlohmann::json::parse(run(validate_config("{}", "locc-equiv"), 1, &rc));
  EXPECT_EQ(rc, exit_pass);
  EXPECT_TRUE(j.at("result").at("pass").get<bool>());
}

TEST(Config, ProtocolCarriesBetaAndHamiltonian) {
  const auto c = validate_config(
      R"({"protocol": {"beta": 0.5, "hamiltonian": {"eigenvalues": [0, 2]},
                       "measurement": {"family": "bell"}}})",
      "tradeoff-point");
  EXPECT_EQ(c.beta, 0.5);
  EXPECT_EQ(c.hamiltonian.at("eigenvalues").size(), 2u);
  EXPECT_EQ(validate_config(config_to_json(c), "tradeoff-point"), c);
  EXPECT_TRUE(mentions(errors_of(R"({"beta": 2, "protocol": {"beta": 0.5,
                                    "measurement": {"family": "bell"}}})",
                                 "tradeoff-point"),
                       "differs"));
  EXPECT_TRUE(mentions(errors_of(R"({"protocol": {"resource": {"type": "explicit"},
                                    "measurement": {"family": "bell"}}})",
                                 "tradeoff-point"),
                       "resource"));
}

TEST(Dispatch, ExplicitResourceRunsProofSteps) {
  const auto c = validate_config(
      R"({"protocol": {"resource": {"type": "explicit", "weights": [0.8, 0.2]},
                       "measurement": {"family": "haar", "seed": 4}}})",
      "tradeoff-point");
  int rc = -1;
  const auto j = nlohmann::json::parse(run(c, 1, &rc));
  EXPECT_EQ(rc, exit_pass);
  EXPECT_EQ(j.at("result").at("resource"), "explicit");
  const double h = -0.8 * std::log(0.8) - 0.2 * std::log(0.2);
  EXPECT_NEAR(j.at("result").at("bound").get<double>(), h, 1e-12);
}
