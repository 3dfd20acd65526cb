#pragma once

#include "qetlab/linalg.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qet {

std::string version();

/// Schema violations, all of them.
class ConfigError : public InputError {
public:
  explicit ConfigError(std::vector<std::string> messages);
  const std::vector<std::string> &messages() const { return messages_; }

private:
  std::vector<std::string> messages_;
};

const std::vector<std::string> &subcommands();

struct RunConfig {
  std::string command;
  int dim = 2;
  double beta = 1.0;
  int n = 1;
  std::string family = "haar";
  double theta = 0.0;
  int samples = 1;
  std::uint64_t seed = 0;
  double tolerance = 1e-8;
  std::string output; // empty: standard output
  bool bits = false;
  /// Inline Hamiltonian ({"eigenvalues": [...]} or a matrix object); null
  /// selects diag(0, 1, ..., dim-1).
  nlohmann::json hamiltonian;
  /// Schmidt weights of a non-thermal resource; empty selects the TFD.
  std::vector<double> weights;
  double delta = 1.0;
  double g = 1.0;
  double t_start = 0.0;
  double t_stop = 5.0;
  double t_step = 0.01;
  int K = 1;
  std::string state = "random_pure";
  std::vector<int> order;
  nlohmann::json protocol;

  bool operator==(const RunConfig &) const = default;
};

/// Parses, range-checks and fills defaults for `command`. A "command" field
/// in the text must agree with it. Fields that do not belong to the command
/// are rejected. Throws ConfigError listing every problem.
RunConfig validate_config(const std::string &raw, const std::string &command);
RunConfig validate_config(const nlohmann::json &j, const std::string &command);
inline RunConfig validate_config(const char *raw, const std::string &command) {
  return validate_config(std::string(raw), command);
}

/// The resolved config restricted to the fields of its command.
nlohmann::json config_to_json(const RunConfig &c);

/// "# qetlab <version> config=<json>"
std::string provenance_line(const RunConfig &c);

/// Shortest round-trip decimal form used in every CSV.
std::string format_number(double v);

enum ExitCode : int { exit_pass = 0, exit_violation = 1, exit_config = 2 };

/// Runs the command and writes its artifact to `out`. Returns the exit
/// status; the artifact does not depend on `threads`.
int dispatch(const RunConfig &c, std::ostream &out, int threads);

} // namespace qet
