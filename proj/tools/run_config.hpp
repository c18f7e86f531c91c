#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace potform::cli {

/// Bad key, bad value or bad combination; the CLI exits with status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Subcommand { Navier, Continuation, ToyOde, Eigen, VerifyBarriers };

const char* to_string(Subcommand s);
Subcommand parse_subcommand(const std::string& name);

/**
 * Fully resolved run description. Values come from the preset, then the JSON
 * config file, then command-line flags, later sources winning.
 */
struct RunConfig {
  Subcommand subcommand = Subcommand::Navier;
  std::string preset;  // empty: user-supplied f and g
  std::string out = "out";

  // Ball problems.
  int dim = 2;
  double radius = 1.0;
  std::vector<int> grids{64};  // nodes per radius; several values give an error table
  double epsilon = 0.0;
  double eps0 = 1.0;
  int steps = 12;
  std::vector<double> schedule;  // explicit schedule overrides eps0/steps
  bool terminal_zero = false;
  std::string f = "0";
  std::string g = "0";
  std::string w_exact;  // optional oracle expressions
  std::string v_exact;
  double barrier_margin = 0.1;
  double hj_tol = 0.0;
  double poisson_tol = 0.0;
  int max_sweeps = 10000;

  // Toy ODE.
  int intervals = 256;
  double lambda = 1.0;

  // Lattice eigenvalue check.
  int K = 4;
  double half_width = 0.0;  // <= 0: 2K + 1
  double box_spacing = 0.25;
  double gamma_scale = 1.0;
  std::string kernel_sign = "fundamental";
  int transverse_stride = 8;

  /// Canonical JSON echo; keys sorted, so equal configs dump equal text.
  nlohmann::json to_json() const;
};

/// Keys accepted in config files and by --set.
const std::vector<std::string>& known_keys();

/// Defaults for a subcommand and preset; throws ConfigError for an unknown preset.
RunConfig preset_config(Subcommand sub, const std::string& preset);

/// Applies a JSON object of overrides; unknown keys and mistyped values throw ConfigError.
void apply_overrides(RunConfig& cfg, const nlohmann::json& overrides);

/// Range and consistency checks per subcommand.
void validate(const RunConfig& cfg);

/// "0.4,0.2,0.1" or "geom:EPS0:STEPS".
std::vector<double> parse_schedule(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

std::uint64_t fnv1a(const std::string& bytes);

}  // namespace potform::cli
