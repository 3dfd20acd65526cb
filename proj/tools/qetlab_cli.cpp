// qetlab command-line driver. Flags are folded into a JSON object on top of
// --config and validated in one pass, so a flag and the matching config key
// are interchangeable.

#include "qetlab/config.hpp"
#include "qetlab/parallel.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

void print_error(const std::vector<std::string> &messages, const char *kind) {
  nlohmann::json j{{"error", kind}, {"messages", messages}};
  std::cerr << j.dump() << '\n';
}

std::vector<double> parse_list(const std::string &s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    out.push_back(std::stod(item));
  return out;
}

struct Flags {
  std::string config;
  std::optional<int> dim, n, samples, K;
  std::optional<double> beta, theta, delta, g, tolerance;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> family, t, output, state, order, weights, hamiltonian, protocol;
  bool bits = false;
};

void add_flags(CLI::App *sub, Flags &f) {
  sub->add_option("--config", f.config, "JSON config file");
  sub->add_option("--dim", f.dim, "local dimension d");
  sub->add_option("--beta", f.beta, "inverse temperature");
  sub->add_option("--n", f.n, "number of copies");
  sub->add_option("--samples", f.samples, "sample count");
  sub->add_option("--seed", f.seed, "master seed");
  sub->add_option("--family", f.family, "bell, product, interpolated or haar");
  sub->add_option("--theta", f.theta, "interpolation angle");
  sub->add_option("--delta", f.delta, "conformal weight");
  sub->add_option("--g", f.g, "coupling");
  sub->add_option("--t", f.t, "time grid start:stop:step");
  sub->add_option("--K", f.K, "number of coupled pairs");
  sub->add_option("--state", f.state, "random_pure or tfd");
  sub->add_option("--order", f.order, "measurement order, e.g. 2,1,3");
  sub->add_option("--weights", f.weights, "Schmidt weights, e.g. 0.8,0.2");
  sub->add_option("--hamiltonian", f.hamiltonian, "Hamiltonian JSON file");
  sub->add_option("--protocol", f.protocol, "protocol JSON file");
  sub->add_option("--tolerance", f.tolerance, "slack tolerance");
  sub->add_option("--output", f.output, "output file (default stdout)");
  sub->add_flag("--bits", f.bits, "report entropies in bits");
}

nlohmann::json merge(const Flags &f) {
  nlohmann::json j = nlohmann::json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in)
      throw qet::ConfigError({"config file '" + f.config + "' cannot be read"});
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &) {
      throw qet::ConfigError({"config file '" + f.config + "' is not valid JSON"});
    }
    if (!j.is_object())
      throw qet::ConfigError({"config must be a JSON object"});
  }
  auto set = [&](const char *key, const auto &opt) {
    if (opt)
      j[key] = *opt;
  };
  set("dim", f.dim);
  set("beta", f.beta);
  set("n", f.n);
  set("samples", f.samples);
  set("seed", f.seed);
  set("family", f.family);
  set("theta", f.theta);
  set("delta", f.delta);
  set("g", f.g);
  set("t", f.t);
  set("K", f.K);
  set("state", f.state);
  set("tolerance", f.tolerance);
  set("output", f.output);
  set("hamiltonian", f.hamiltonian);
  set("protocol", f.protocol);
  if (f.bits)
    j["bits"] = true;
  try {
    if (f.order) {
      std::vector<int> order;
      for (double v : parse_list(*f.order))
        order.push_back(static_cast<int>(v));
      j["order"] = order;
    }
    if (f.weights)
      j["weights"] = parse_list(*f.weights);
  } catch (const std::exception &) {
    throw qet::ConfigError({"--order and --weights take comma-separated numbers"});
  }
  return j;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"qetlab: energy and information teleportation trade-offs"};
  app.require_subcommand(1);
  Flags flags;
  for (const auto &name : qet::subcommands())
    add_flags(app.add_subcommand(name), flags);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    print_error({e.what()}, "usage");
    return qet::exit_config;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  qet::RunConfig cfg;
  try {
    cfg = qet::validate_config(merge(flags), command);
  } catch (const qet::ConfigError &e) {
    print_error(e.messages(), "config");
    return qet::exit_config;
  }

  try {
    const int threads = qet::default_threads();
    if (cfg.output.empty())
      return qet::dispatch(cfg, std::cout, threads);
    std::ostringstream buf;
    const int status = qet::dispatch(cfg, buf, threads);
    std::ofstream out(cfg.output, std::ios::binary);
    if (!out) {
      print_error({"cannot write '" + cfg.output + "'"}, "io");
      return qet::exit_config;
    }
    out << buf.str();
    return status;
  } catch (const qet::InputError &e) {
    print_error({e.what()}, "input");
    return qet::exit_config;
  }
}
