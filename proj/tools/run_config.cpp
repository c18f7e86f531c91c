#include "run_config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

namespace potform::cli {

namespace {

using nlohmann::json;

constexpr const char* kManufacturedF = "4*r^2*(1-r^2)^3";
constexpr const char* kManufacturedW = "1-r^2";
constexpr const char* kManufacturedV = "r^2/4-r^4/16-3/16";

template <class T>
T typed(const json& value, const std::string& key) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(fmt::format("config key '{}' has the wrong type", key));
  }
}

}  // namespace

const char* to_string(Subcommand s) {
  switch (s) {
    case Subcommand::Navier:
      return "navier";
    case Subcommand::Continuation:
      return "continuation";
    case Subcommand::ToyOde:
      return "toyode";
    case Subcommand::Eigen:
      return "eigen";
    case Subcommand::VerifyBarriers:
      return "verify-barriers";
  }
  return "?";
}

Subcommand parse_subcommand(const std::string& name) {
  for (auto s : {Subcommand::Navier, Subcommand::Continuation, Subcommand::ToyOde, Subcommand::Eigen,
                 Subcommand::VerifyBarriers})
    if (name == to_string(s)) return s;
  throw ConfigError(fmt::format("unknown subcommand '{}'", name));
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "subcommand", "preset",         "out",        "dim",         "radius",         "grid",
      "grids",      "epsilon",        "eps0",       "steps",       "schedule",       "terminal_zero",
      "f",          "g",              "w_exact",    "v_exact",     "barrier_margin", "hj_tol",
      "poisson_tol", "max_sweeps",    "N",          "lambda",      "K",              "half_width",
      "box_spacing", "gamma_scale",   "kernel_sign", "transverse_stride"};
  return keys;
}

RunConfig preset_config(Subcommand sub, const std::string& preset) {
  RunConfig c;
  c.subcommand = sub;
  c.preset = preset;
  auto manufactured = [&c] {
    c.dim = 2;
    c.radius = 1.0;
    c.f = kManufacturedF;
    c.g = "0";
    c.w_exact = kManufacturedW;
    c.v_exact = kManufacturedV;
    c.epsilon = 0.0;
    c.eps0 = 0.4;
    c.steps = 12;
    c.terminal_zero = true;
  };

  if (sub == Subcommand::Eigen) c.lambda = -1.0;
  if (preset.empty()) {
    if (sub == Subcommand::ToyOde) throw ConfigError("toyode needs a preset (sine, cubic, asymmetric)");
    return c;
  }
  switch (sub) {
    case Subcommand::Navier:
    case Subcommand::Continuation:
    case Subcommand::VerifyBarriers:
      if (preset == "manufactured2d") {
        manufactured();
        c.grids = {16, 32, 64};
        return c;
      }
      if (preset == "homogeneous" && sub != Subcommand::Continuation) {
        c.f = "0";
        c.g = "cos(theta)";
        c.w_exact = "0";
        c.v_exact = "harmonic";
        c.grids = {16, 32, 64};
        return c;
      }
      if (preset == "pipeline" && sub != Subcommand::Continuation) {
        manufactured();
        c.f = fmt::format("0.1*(1-r^2)+{}", kManufacturedF);
        c.epsilon = 0.1;
        c.terminal_zero = false;
        return c;
      }
      break;
    case Subcommand::ToyOde:
      if (preset == "sine" || preset == "cubic" || preset == "asymmetric") return c;
      break;
    case Subcommand::Eigen:
      if (preset == "default") return c;
      break;
  }
  throw ConfigError(fmt::format("unknown preset '{}' for {}", preset, to_string(sub)));
}

void apply_overrides(RunConfig& c, const json& o) {
  if (!o.is_object()) throw ConfigError("config must be a JSON object");
  const auto& keys = known_keys();
  for (const auto& [key, value] : o.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError(fmt::format("unknown config key '{}'", key));
    if (key == "subcommand" || key == "preset") continue;  // resolved by the caller
    if (key == "out") c.out = typed<std::string>(value, key);
    else if (key == "dim") c.dim = typed<int>(value, key);
    else if (key == "radius") c.radius = typed<double>(value, key);
    else if (key == "grid") c.grids = {typed<int>(value, key)};
    else if (key == "grids") c.grids = value.is_string() ? parse_int_list(value.get<std::string>())
                                                         : typed<std::vector<int>>(value, key);
    else if (key == "epsilon") c.epsilon = typed<double>(value, key);
    else if (key == "eps0") c.eps0 = typed<double>(value, key);
    else if (key == "steps") c.steps = typed<int>(value, key);
    else if (key == "schedule") c.schedule = value.is_string() ? parse_schedule(value.get<std::string>())
                                                               : typed<std::vector<double>>(value, key);
    else if (key == "terminal_zero") c.terminal_zero = typed<bool>(value, key);
    else if (key == "f") c.f = typed<std::string>(value, key);
    else if (key == "g") c.g = typed<std::string>(value, key);
    else if (key == "w_exact") c.w_exact = typed<std::string>(value, key);
    else if (key == "v_exact") c.v_exact = typed<std::string>(value, key);
    else if (key == "barrier_margin") c.barrier_margin = typed<double>(value, key);
    else if (key == "hj_tol") c.hj_tol = typed<double>(value, key);
    else if (key == "poisson_tol") c.poisson_tol = typed<double>(value, key);
    else if (key == "max_sweeps") c.max_sweeps = typed<int>(value, key);
    else if (key == "N") c.intervals = typed<int>(value, key);
    else if (key == "lambda") c.lambda = typed<double>(value, key);
    else if (key == "K") c.K = typed<int>(value, key);
    else if (key == "half_width") c.half_width = typed<double>(value, key);
    else if (key == "box_spacing") c.box_spacing = typed<double>(value, key);
    else if (key == "gamma_scale") c.gamma_scale = typed<double>(value, key);
    else if (key == "kernel_sign") c.kernel_sign = typed<std::string>(value, key);
    else if (key == "transverse_stride") c.transverse_stride = typed<int>(value, key);
  }
}

void validate(const RunConfig& c) {
  switch (c.subcommand) {
    case Subcommand::Navier:
    case Subcommand::Continuation:
    case Subcommand::VerifyBarriers:
      if (c.dim < 1 || c.dim > 3) throw ConfigError("dim must be 1, 2 or 3");
      if (!(c.radius > 0.0)) throw ConfigError("radius must be positive");
      if (c.grids.empty()) throw ConfigError("grids is empty");
      for (int m : c.grids)
        if (m < 8) throw ConfigError(fmt::format("grid {} is below the minimum of 8 nodes per radius", m));
      if (!(c.epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
      if (!(c.barrier_margin > 0.0)) throw ConfigError("barrier_margin must be positive");
      if (c.max_sweeps < 1) throw ConfigError("max_sweeps must be >= 1");
      if (c.subcommand == Subcommand::Continuation || c.epsilon == 0.0) {
        if (!(c.eps0 > 0.0) || c.steps < 1) throw ConfigError("need eps0 > 0 and steps >= 1");
        for (std::size_t k = 0; k < c.schedule.size(); ++k)
          if (!(c.schedule[k] > 0.0) || (k > 0 && !(c.schedule[k] < c.schedule[k - 1])))
            throw ConfigError("schedule must be positive and strictly decreasing");
      }
      return;
    case Subcommand::ToyOde:
      if (!(c.lambda > 0.0)) throw ConfigError(fmt::format("lambda must be positive, got {}", c.lambda));
      if (c.intervals < 2 || c.intervals % 2 != 0) throw ConfigError("N must be even and >= 2");
      return;
    case Subcommand::Eigen:
      if (!(c.lambda < 0.0)) throw ConfigError(fmt::format("lambda must be negative, got {}", c.lambda));
      if (c.K < 0) throw ConfigError("K must be nonnegative");
      if (!(c.box_spacing > 0.0)) throw ConfigError("box_spacing must be positive");
      if (!(c.gamma_scale > 0.0)) throw ConfigError("gamma_scale must be positive");
      if (c.transverse_stride < 1) throw ConfigError("transverse_stride must be >= 1");
      if (c.kernel_sign != "fundamental" && c.kernel_sign != "positive")
        throw ConfigError("kernel_sign must be 'fundamental' or 'positive'");
      return;
  }
}

std::vector<double> parse_schedule(const std::string& text) {
  std::vector<double> out;
  if (text.rfind("geom:", 0) == 0) {
    double eps0 = 0.0;
    int steps = 0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "geom:%lf:%d%c", &eps0, &steps, &tail) != 2 || !(eps0 > 0.0) || steps < 1)
      throw ConfigError(fmt::format("bad schedule '{}'", text));
    for (int k = 0; k < steps; ++k) out.push_back(std::ldexp(eps0, -k));
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("bad schedule entry '{}'", item));
    }
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("bad integer '{}'", item));
    }
  }
  return out;
}

json RunConfig::to_json() const {
  json j;
  j["subcommand"] = to_string(subcommand);
  j["preset"] = preset;
  j["out"] = out;
  switch (subcommand) {
    case Subcommand::Navier:
    case Subcommand::Continuation:
    case Subcommand::VerifyBarriers:
      j["dim"] = dim;
      j["radius"] = radius;
      j["grids"] = grids;
      j["epsilon"] = epsilon;
      j["eps0"] = eps0;
      j["steps"] = steps;
      j["schedule"] = schedule;
      j["terminal_zero"] = terminal_zero;
      j["f"] = f;
      j["g"] = g;
      j["w_exact"] = w_exact;
      j["v_exact"] = v_exact;
      j["barrier_margin"] = barrier_margin;
      j["hj_tol"] = hj_tol;
      j["poisson_tol"] = poisson_tol;
      j["max_sweeps"] = max_sweeps;
      break;
    case Subcommand::ToyOde:
      j["N"] = intervals;
      j["lambda"] = lambda;
      break;
    case Subcommand::Eigen:
      j["lambda"] = lambda;
      j["K"] = K;
      j["half_width"] = half_width;
      j["box_spacing"] = box_spacing;
      j["gamma_scale"] = gamma_scale;
      j["kernel_sign"] = kernel_sign;
      j["transverse_stride"] = transverse_stride;
      break;
  }
  return j;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace potform::cli
