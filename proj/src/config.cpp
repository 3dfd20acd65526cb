#include "qetlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#ifndef QETLAB_VERSION
#define QETLAB_VERSION "0.0.0"
#endif

namespace qet {

std::string version() { return QETLAB_VERSION; }

namespace {

std::string join(const std::vector<std::string> &parts) {
  std::string s;
  for (const auto &p : parts)
    s += (s.empty() ? "" : "; ") + p;
  return s;
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> messages)
    : InputError(join(messages)), messages_(std::move(messages)) {}

const std::vector<std::string> &subcommands() {
  static const std::vector<std::string> names{
      "verify-theorem1", "pareto",      "theorem2",      "ergotropy-scaling",
      "wormhole-curve",  "locc-equiv", "tradeoff-point"};
  return names;
}

namespace {

const std::vector<std::string> kCommon{"command", "seed", "tolerance", "output", "bits"};

const std::map<std::string, std::vector<std::string>> &command_fields() {
  static const std::map<std::string, std::vector<std::string>> f{
      {"verify-theorem1", {"dim", "beta", "samples", "hamiltonian"}},
      {"pareto", {"dim", "beta", "family", "samples", "hamiltonian"}},
      {"theorem2", {"dim", "beta", "n", "family", "samples", "hamiltonian", "weights"}},
      {"ergotropy-scaling", {"dim", "n", "samples", "hamiltonian"}},
      {"wormhole-curve", {"delta", "beta", "g", "t"}},
      {"locc-equiv", {"K", "g", "state", "beta", "order"}},
      {"tradeoff-point", {"dim", "beta", "hamiltonian", "family", "theta", "protocol"}},
  };
  return f;
}

RunConfig defaults_for(const std::string &cmd) {
  RunConfig c;
  c.command = cmd;
  if (cmd == "verify-theorem1")
    c.samples = 1000;
  else if (cmd == "pareto") {
    c.samples = 100;
    c.family = "interpolated";
  } else if (cmd == "theorem2") {
    c.samples = 200;
    c.n = 2;
  } else if (cmd == "ergotropy-scaling") {
    c.n = 6;
  } else if (cmd == "locc-equiv")
    c.g = 0.5;
  return c;
}

class Reader {
public:
  Reader(const nlohmann::json &j, std::vector<std::string> &errors)
      : j_(j), errors_(errors) {}

  template <class T> bool get(const char *key, T &dst) {
    if (!j_.contains(key))
      return false;
    try {
      dst = j_.at(key).get<T>();
      return true;
    } catch (const nlohmann::json::exception &) {
      errors_.push_back(std::string("field '") + key + "' has the wrong type");
      return false;
    }
  }

private:
  const nlohmann::json &j_;
  std::vector<std::string> &errors_;
};

bool parse_time_range(const std::string &s, double &a, double &b, double &step) {
  std::istringstream in(s);
  char c1 = 0, c2 = 0;
  if (!(in >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':')
    return false;
  in >> std::ws;
  return in.eof();
}

nlohmann::json load_json_file(const std::string &path, const char *what,
                              std::vector<std::string> &errors) {
  std::ifstream in(path);
  if (!in) {
    errors.push_back(std::string(what) + " file '" + path + "' cannot be read");
    return nullptr;
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception &) {
    errors.push_back(std::string(what) + " file '" + path + "' is not valid JSON");
    return nullptr;
  }
}

void check_hamiltonian(const nlohmann::json &h, int dim, std::vector<std::string> &errors) {
  if (h.is_null())
    return;
  try {
    if (h.is_object() && h.contains("eigenvalues")) {
      const auto e = h.at("eigenvalues").get<std::vector<double>>();
      if (static_cast<int>(e.size()) != dim)
        errors.push_back("hamiltonian: dimension differs from dim");
      for (double v : e)
        if (!std::isfinite(v)) {
          errors.push_back("hamiltonian: eigenvalues must be finite");
          break;
        }
      return;
    }
    const Matrix m = matrix_from_json(h);
    if (m.rows() != dim || m.cols() != dim)
      errors.push_back("hamiltonian: dimension differs from dim");
    else if (hermitian_error(m) > tol::hermitian * std::max(1.0, max_abs(m)))
      errors.push_back("hamiltonian: matrix is not Hermitian");
  } catch (const std::exception &e) {
    errors.push_back(std::string("hamiltonian: ") + e.what());
  }
}

void check_protocol(const nlohmann::json &p, int dim, std::vector<std::string> &errors) {
  if (!p.is_object()) {
    errors.push_back("protocol: required object with a 'measurement' entry");
    return;
  }
  for (const auto &[k, v] : p.items()) {
    (void)v;
    if (k != "measurement" && k != "decoder" && k != "resource" && k != "beta" &&
        k != "hamiltonian")
      errors.push_back("protocol: unknown field '" + k + "'");
  }
  if (p.contains("resource")) {
    const auto &r = p.at("resource");
    const auto type = r.is_object() ? r.value("type", std::string()) : std::string();
    if (type == "explicit") {
      const auto &w = r.contains("weights") ? r.at("weights") : nlohmann::json();
      bool ok = w.is_array() && static_cast<int>(w.size()) == dim;
      double total = 0.0;
      for (std::size_t k = 0; ok && k < w.size(); ++k) {
        ok = w[k].is_number() && w[k].get<double>() >= 0.0;
        total += ok ? w[k].get<double>() : 0.0;
      }
      if (!ok || !(total > 0.0))
        errors.push_back("protocol.resource: explicit needs dim non-negative Schmidt weights");
    } else if (type != "tfd")
      errors.push_back("protocol.resource: type must be 'tfd' or 'explicit'");
  }
  if (!p.contains("measurement") || !p.at("measurement").is_object())
    errors.push_back("protocol.measurement: required object");
  else {
    const auto &m = p.at("measurement");
    const int kinds = static_cast<int>(m.contains("family")) +
                      static_cast<int>(m.contains("basis")) +
                      static_cast<int>(m.contains("kraus"));
    if (kinds != 1)
      errors.push_back("protocol.measurement: give exactly one of family, basis, kraus");
  }
  if (p.contains("decoder")) {
    const auto &d = p.at("decoder");
    if (!(d.is_array() || (d.is_string() && (d == "ergotropy_optimal" || d == "none"))))
      errors.push_back("protocol.decoder: 'ergotropy_optimal', 'none' or a list of unitaries");
  }
}

} // namespace

RunConfig validate_config(const std::string &raw, const std::string &command) {
  nlohmann::json j;
  if (raw.find_first_not_of(" \t\r\n") == std::string::npos)
    j = nlohmann::json::object();
  else {
    try {
      j = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception &) {
      throw ConfigError({"config is not valid JSON"});
    }
  }
  return validate_config(j, command);
}

RunConfig validate_config(const nlohmann::json &j, const std::string &command) {
  const auto &fields = command_fields();
  const auto it = fields.find(command);
  if (it == fields.end())
    throw ConfigError({"unknown command '" + command + "'"});
  if (!j.is_object())
    throw ConfigError({"config must be a JSON object"});

  std::vector<std::string> errors;
  std::set<std::string> allowed(kCommon.begin(), kCommon.end());
  allowed.insert(it->second.begin(), it->second.end());
  for (const auto &[k, v] : j.items()) {
    (void)v;
    if (!allowed.count(k))
      errors.push_back("unknown field '" + k + "' for " + command);
  }

  RunConfig c = defaults_for(command);
  Reader r(j, errors);
  std::string cmd;
  if (r.get("command", cmd) && cmd != command)
    errors.push_back("field 'command' is '" + cmd + "' but '" + command + "' was requested");

  const bool has_dim = r.get("dim", c.dim);
  r.get("beta", c.beta);
  r.get("n", c.n);
  r.get("family", c.family);
  r.get("theta", c.theta);
  r.get("samples", c.samples);
  r.get("seed", c.seed);
  r.get("tolerance", c.tolerance);
  r.get("output", c.output);
  r.get("bits", c.bits);
  r.get("weights", c.weights);
  r.get("delta", c.delta);
  r.get("g", c.g);
  r.get("K", c.K);
  r.get("state", c.state);
  r.get("order", c.order);
  if (j.contains("t")) {
    std::string t;
    if (r.get("t", t) && !parse_time_range(t, c.t_start, c.t_stop, c.t_step))
      errors.push_back("field 't' must look like start:stop:step");
  }
  if (j.contains("hamiltonian")) {
    const auto &h = j.at("hamiltonian");
    c.hamiltonian = h.is_string() ? load_json_file(h.get<std::string>(), "hamiltonian", errors) : h;
  }
  if (j.contains("protocol")) {
    const auto &p = j.at("protocol");
    c.protocol = p.is_string() ? load_json_file(p.get<std::string>(), "protocol", errors) : p;
    // A protocol file may carry its own beta and Hamiltonian; they must not
    // contradict the top level.
    if (c.protocol.is_object() && it->first == "tradeoff-point") {
      if (c.protocol.contains("beta")) {
        const auto &b = c.protocol.at("beta");
        if (!b.is_number())
          errors.push_back("protocol.beta: must be a number");
        else if (j.contains("beta") && j.at("beta") != b)
          errors.push_back("protocol.beta: differs from beta");
        else
          c.beta = b.get<double>();
      }
      if (c.protocol.contains("hamiltonian")) {
        if (j.contains("hamiltonian") && c.hamiltonian != c.protocol.at("hamiltonian"))
          errors.push_back("protocol.hamiltonian: differs from hamiltonian");
        else
          c.hamiltonian = c.protocol.at("hamiltonian");
      }
    }
  }
  if (!has_dim && !c.weights.empty())
    c.dim = static_cast<int>(c.weights.size());
  if (!has_dim && c.hamiltonian.is_object() && c.hamiltonian.contains("eigenvalues") &&
      c.hamiltonian["eigenvalues"].is_array())
    c.dim = static_cast<int>(c.hamiltonian["eigenvalues"].size());
  else if (!has_dim && c.hamiltonian.is_object() && c.hamiltonian.contains("rows") &&
           c.hamiltonian["rows"].is_number_integer())
    c.dim = c.hamiltonian["rows"].get<int>();

  const auto uses = [&](const char *f) {
    return std::find(it->second.begin(), it->second.end(), f) != it->second.end();
  };
  if (!(c.tolerance > 0.0) || !std::isfinite(c.tolerance))
    errors.push_back("tolerance: must be positive");
  if (uses("dim") && (c.dim < 2 || c.dim > 16))
    errors.push_back("dim: must lie in [2, 16]");
  if (uses("beta") && (!(c.beta > 0.0) || !std::isfinite(c.beta)))
    errors.push_back("beta: must be positive and finite");
  std::vector<std::string> families;
  for (std::size_t start = 0;;) {
    const auto end = c.family.find(',', start);
    families.push_back(c.family.substr(start, end - start));
    if (end == std::string::npos)
      break;
    start = end + 1;
  }
  const bool interpolated =
      std::find(families.begin(), families.end(), "interpolated") != families.end();
  if (uses("samples")) {
    const int lo = command == "pareto" && interpolated ? 2 : 1;
    if (c.samples < lo || c.samples > 10000000)
      errors.push_back("samples: must lie in [" + std::to_string(lo) + ", 1e7]");
  }
  if (uses("family")) {
    static const std::set<std::string> fams{"bell", "product", "interpolated", "haar"};
    for (const auto &f : families)
      if (!fams.count(f))
        errors.push_back("family: '" + f + "' is not one of bell, product, interpolated, haar");
    if (command != "pareto" && families.size() != 1)
      errors.push_back("family: only pareto takes a comma-separated list");
    if (command == "theorem2" && interpolated)
      errors.push_back("family: theorem2 takes bell, product or haar");
  }
  if (uses("n")) {
    if (c.n < 1)
      errors.push_back("n: must be positive");
    else {
      const int power = command == "theorem2" ? 2 * c.n : c.n;
      if (std::pow(static_cast<double>(c.dim), power) > 256.0)
        errors.push_back(command == "theorem2" ? "n: dim^(2n) must not exceed 256"
                                               : "n: dim^n must not exceed 256");
    }
  }
  if (uses("hamiltonian"))
    check_hamiltonian(c.hamiltonian, c.dim, errors);
  if (uses("weights") && !c.weights.empty()) {
    if (static_cast<int>(c.weights.size()) != c.dim)
      errors.push_back("weights: need one weight per dimension");
    double total = 0.0;
    for (double w : c.weights) {
      if (!(w >= 0.0) || !std::isfinite(w))
        errors.push_back("weights: entries must be non-negative");
      total += w;
    }
    if (!(total > 0.0))
      errors.push_back("weights: must not all vanish");
  }
  if (uses("delta") && (!(c.delta > 0.0) || !std::isfinite(c.delta)))
    errors.push_back("delta: must be positive");
  if (uses("g") && !std::isfinite(c.g))
    errors.push_back("g: must be finite");
  if (uses("t")) {
    if (!(c.t_step > 0.0) || c.t_start < 0.0 || c.t_stop < c.t_start)
      errors.push_back("t: need 0 <= start <= stop and step > 0");
    else if ((c.t_stop - c.t_start) / c.t_step > 1e7)
      errors.push_back("t: more than 1e7 samples");
  }
  if (uses("K") && (c.K < 1 || c.K > 4))
    errors.push_back("K: must lie in [1, 4]");
  if (uses("state") && c.state != "random_pure" && c.state != "tfd")
    errors.push_back("state: random_pure or tfd");
  if (uses("order") && !c.order.empty()) {
    std::vector<int> sorted = c.order;
    std::sort(sorted.begin(), sorted.end());
    bool ok = static_cast<int>(sorted.size()) == c.K;
    for (std::size_t i = 0; ok && i < sorted.size(); ++i)
      ok = sorted[i] == static_cast<int>(i) + 1;
    if (!ok)
      errors.push_back("order: must be a permutation of 1..K");
  }
  if (uses("protocol") && !c.protocol.is_null())
    check_protocol(c.protocol, c.dim, errors);
  if (uses("theta") && !(c.theta >= 0.0 && c.theta <= std::numbers::pi / 2))
    errors.push_back("theta: must lie in [0, pi/2]");

  if (!errors.empty())
    throw ConfigError(std::move(errors));
  return c;
}

nlohmann::json config_to_json(const RunConfig &c) {
  const auto &fields = command_fields().at(c.command);
  nlohmann::json j{{"command", c.command},
                   {"seed", c.seed},
                   {"tolerance", c.tolerance},
                   {"output", c.output},
                   {"bits", c.bits}};
  for (const auto &f : fields) {
    if (f == "dim")
      j[f] = c.dim;
    else if (f == "beta")
      j[f] = c.beta;
    else if (f == "n")
      j[f] = c.n;
    else if (f == "family")
      j[f] = c.family;
    else if (f == "theta")
      j[f] = c.theta;
    else if (f == "samples")
      j[f] = c.samples;
    else if (f == "hamiltonian")
      j[f] = c.hamiltonian;
    else if (f == "weights")
      j[f] = c.weights;
    else if (f == "delta")
      j[f] = c.delta;
    else if (f == "g")
      j[f] = c.g;
    else if (f == "t")
      j[f] = format_number(c.t_start) + ":" + format_number(c.t_stop) + ":" +
             format_number(c.t_step);
    else if (f == "K")
      j[f] = c.K;
    else if (f == "state")
      j[f] = c.state;
    else if (f == "order")
      j[f] = c.order;
    else if (f == "protocol")
      j[f] = c.protocol;
  }
  return j;
}

std::string provenance_line(const RunConfig &c) {
  return "# qetlab " + version() + " config=" + config_to_json(c).dump();
}

std::string format_number(double v) {
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  if (v == 0.0)
    v = 0.0; // drop the sign of negative zero
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

} // namespace qet
