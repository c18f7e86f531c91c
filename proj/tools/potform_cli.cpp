// potform: command-line driver for the ball solvers, the toy ODE and the
// lattice eigenvalue check. Exit status 0 ok, 1 solver failure, 2 bad config.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "potform/barriers.hpp"
#include "potform/expression.hpp"
#include "potform/hj.hpp"
#include "potform/nonlocal.hpp"
#include "potform/pipeline.hpp"
#include "potform/poisson.hpp"
#include "potform/toyode.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace potform;
using namespace potform::cli;

namespace {

constexpr const char* kVersion = "potform 1.0.0";

/// Solver-side failure reported with exit status 1.
class RunFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Output {
 public:
  explicit Output(const RunConfig& cfg) : cfg_(cfg), dir_(cfg.out) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::string& text) {
    std::ofstream os(dir_ / name, std::ios::binary);
    os << text;
    if (!os) throw std::runtime_error(fmt::format("cannot write {}", (dir_ / name).string()));
    files_.push_back(name);
  }

  json& results() { return results_; }

  /// run.json manifest plus the one-line stdout summary.
  void finish(const std::string& status, double seconds) {
    const std::string echo = cfg_.to_json().dump();
    json manifest;
    manifest["version"] = kVersion;
    manifest["config"] = cfg_.to_json();
    manifest["config_hash"] = fmt::format("{:016x}", fnv1a(echo));
    manifest["outputs"] = files_;
    manifest["results"] = results_;
    manifest["status"] = status;
    std::ofstream os(dir_ / "run.json", std::ios::binary);
    os << manifest.dump(2) << '\n';

    json summary = results_;
    summary["subcommand"] = to_string(cfg_.subcommand);
    summary["status"] = status;
    summary["seconds"] = std::round(seconds * 1000.0) / 1000.0;
    summary["out"] = cfg_.out;
    std::cout << "summary " << summary.dump() << std::endl;
  }

 private:
  const RunConfig& cfg_;
  fs::path dir_;
  std::vector<std::string> files_;
  json results_ = json::object();
};

std::vector<double> schedule_of(const RunConfig& cfg) {
  return cfg.schedule.empty() ? geometric_schedule(cfg.eps0, cfg.steps) : cfg.schedule;
}

struct BallRun {
  int m;
  double h;
  ScalarField w;
  ScalarField v;
  BarrierCertificate cert;
  std::optional<ContinuationReport> report;
};

void run_ball(const RunConfig& cfg, Output& out, bool continuation_mode) {
  const Expression f_expr = Expression::parse(cfg.f);
  const Expression g_expr = Expression::parse(cfg.g);
  std::optional<Expression> w_exact;
  std::optional<Expression> v_exact;
  const bool harmonic_oracle = cfg.v_exact == "harmonic";
  if (!cfg.w_exact.empty()) w_exact = Expression::parse(cfg.w_exact);
  if (!cfg.v_exact.empty() && !harmonic_oracle) v_exact = Expression::parse(cfg.v_exact);
  if (harmonic_oracle && cfg.dim == 1) throw ConfigError("harmonic oracle needs dim 2 or 3");

  const bool use_continuation = continuation_mode || cfg.epsilon == 0.0;
  std::string errors = "m,h,w_error,v_error\n";
  json table = json::array();
  std::optional<BallRun> last;

  for (int m : cfg.grids) {
    const GridPtr grid = BallGrid::build(cfg.dim, cfg.radius, m);
    NavierBVP p;
    p.f = ScalarField::sample(grid, [&](const Point& x) { return f_expr(x); });
    p.g = [g_expr](const Point& x) { return g_expr(x); };
    p.barrier_margin = cfg.barrier_margin;
    p.hj_tol = cfg.hj_tol;
    p.poisson_tol = cfg.poisson_tol;
    p.max_sweeps = cfg.max_sweeps;

    BallRun run{m, grid->spacing(), {}, {}, {}, std::nullopt};
    if (use_continuation) {
      p.schedule = schedule_of(cfg);
      p.terminal_zero = continuation_mode ? cfg.terminal_zero : true;
      run.report = continuation(p);
      run.w = run.report->w_limit;
      run.v = run.report->v_limit;
      run.cert = run.report->terminal ? run.report->terminal->certificate : run.report->stages.back().certificate;
    } else {
      NavierStage stage = solve_navier(p, cfg.epsilon);
      run.w = stage.hj.w;
      run.v = stage.poisson.v;
      run.cert = stage.certificate;
    }

    json row{{"m", m}};
    std::string w_err;
    std::string v_err;
    if (w_exact) {
      const double e = sup_distance(run.w, ScalarField::sample(grid, [&](const Point& x) { return (*w_exact)(x); }));
      w_err = format_real(e);
      row["w_error"] = e;
    }
    if (v_exact || harmonic_oracle) {
      const ScalarField ref = harmonic_oracle ? harmonic_extension(p.g, grid)
                                              : ScalarField::sample(grid, [&](const Point& x) { return (*v_exact)(x); });
      const double e = sup_distance(run.v, ref);
      v_err = format_real(e);
      row["v_error"] = e;
    }
    errors += fmt::format("{},{},{},{}\n", m, format_real(run.h), w_err, v_err);
    table.push_back(row);
    last = std::move(run);
  }

  out.write("w.csv", to_csv(last->w));
  out.write("v.csv", to_csv(last->v));
  out.write("certificate.txt", certificate_report(last->cert, *last->w.grid()));
  if (w_exact || v_exact || harmonic_oracle) out.write("errors.csv", errors);
  if (last->report) {
    out.write("gaps.csv", gaps_csv(*last->report));
    out.write("holder.csv", holder_csv(*last->report));
    out.results()["stages"] = last->report->stages.size();
    out.results()["gaps_monotone"] = last->report->gaps_monotone;
    if (last->report->terminal) out.results()["closing_gap"] = last->report->closing_gap;
  }
  out.results()["errors"] = table;
  out.results()["M"] = last->cert.M;
  out.results()["w_max"] = last->w.max();
}

void run_verify_barriers(const RunConfig& cfg, Output& out) {
  const Expression f_expr = Expression::parse(cfg.f);
  std::string report;
  std::size_t failures = 0;
  json rows = json::array();
  for (int m : cfg.grids) {
    const GridPtr grid = BallGrid::build(cfg.dim, cfg.radius, m);
    const ScalarField f = ScalarField::sample(grid, [&](const Point& x) { return f_expr(x); });
    BarrierCertificate cert;
    try {
      cert = certify(f, cfg.epsilon, cfg.barrier_margin);
    } catch (const DecayHypothesisFailed& e) {
      throw RunFailure(fmt::format("m = {}: {}", m, e.what()));
    }
    report += fmt::format("grid m = {}\n", m) + certificate_report(cert, *grid) + "\n";
    if (!cert.verified) ++failures;
    rows.push_back({{"m", m}, {"C", cert.C}, {"M", cert.M}, {"verified", cert.verified}});
  }
  out.write("certificate.txt", report);
  out.results()["certificates"] = rows;
  if (failures > 0) throw RunFailure(fmt::format("{} grid(s) failed supersolution verification", failures));
}

void run_toyode(const RunConfig& cfg, Output& out) {
  ToyProblem p;
  p.grid = IntervalGrid(cfg.intervals);
  p.lambda = cfg.lambda;
  if (cfg.preset == "sine") {
    p.F = [](double x, double s) { return s - std::sin(x); };
  } else if (cfg.preset == "cubic") {
    p.F = [](double x, double s) {
      const double t = std::sin(x);
      return s + s * s * s - (t + t * t * t);
    };
  } else {
    p.F = [](double x, double s) { return s - std::sin(x) + 0.5 * std::cos(x); };
  }

  ToySolution sol;
  try {
    sol = solve_second_order(p);
  } catch (const SymmetryCheckFailed& e) {
    throw RunFailure(e.what());
  } catch (const MonotonicityCheckFailed& e) {
    throw RunFailure(e.what());
  }
  if (!sol.converged) throw RunFailure(fmt::format("toy solve stopped after {} sweeps", sol.sweeps));
  const Antiderivative u = integrate_to_u(sol.w, p.u_left);
  out.write("toy.csv", toy_csv(sol.w, u.u));

  double w_err = 0.0;
  double u_err = 0.0;
  for (std::size_t i = 0; i < sol.w.x.size(); ++i) {
    const double x = sol.w.x[i];
    w_err = std::max(w_err, std::abs(sol.w.values[i] + std::sin(x)));
    u_err = std::max(u_err, std::abs(u.u.values[i] - (std::cos(x) + 1.0)));
  }
  out.results()["oddness"] = check_oddness(sol.w);
  out.results()["integral"] = u.integral;
  out.results()["w_error"] = w_err;
  out.results()["u_error"] = u_err;
  out.results()["sweeps"] = sol.sweeps;
}

void run_eigen(const RunConfig& cfg, Output& out) {
  const double L = cfg.half_width > 0.0 ? cfg.half_width : 2.0 * cfg.K + 1.0;
  const auto m = static_cast<int>(std::lround(L / cfg.box_spacing));
  if (m < 1 || std::abs(m * cfg.box_spacing - L) > 1e-9 * L)
    throw ConfigError("half_width must be a multiple of box_spacing");
  auto amplitude = [](int k) { return std::pow(8.0, -k); };

  LatticeProfile profile;
  try {
    profile = scale_gamma(build_profile(cfg.lambda, amplitude, cfg.K), cfg.gamma_scale);
  } catch (const RangeTooSmall& e) {
    throw RunFailure(e.what());
  }
  const auto grid = std::make_shared<const WholeSpaceGrid>(3, L, m);
  const BoxField f = make_lattice_f(amplitude, grid);
  EigenCheckOptions opts;
  opts.sign = cfg.kernel_sign == "positive" ? KernelSign::Positive : KernelSign::Fundamental;
  opts.transverse_stride = cfg.transverse_stride;
  EigenReport rep;
  try {
    rep = verify_eigen_supersolution(profile, cfg.lambda, f, opts);
  } catch (const RangeTooSmall& e) {
    throw RunFailure(e.what());
  }

  out.write("profile.csv", profile_csv(profile, 1.0 / 64.0));
  out.write("margins.csv", margin_csv(rep));
  std::string odd = "k,s,delta,slope_sq,f_odd,local_bound,nonlocal_part,reduced_margin\n";
  for (const auto& d : rep.odd)
    odd += fmt::format("{},{},{},{},{},{},{},{}\n", d.k, format_real(d.s), format_real(d.delta),
                       format_real(d.slope_sq), format_real(d.f_odd), format_real(d.local_bound),
                       format_real(d.nonlocal_part), format_real(d.reduced_margin));
  out.write("odd.csv", odd);

  const double slack = 1e-3 * std::pow(profile.s.back(), 3);
  out.results()["worst_interior"] = rep.worst_interior;
  out.results()["worst_even"] = rep.worst_even;
  out.results()["worst_odd"] = rep.worst_odd;
  out.results()["slack"] = slack;
  out.results()["zero_subsolution_margin"] = zero_subsolution_margin(f);
  out.results()["lp_norms"] = {{"1", profile_lp_norm(profile, 1.0)},
                               {"2", profile_lp_norm(profile, 2.0)},
                               {"4", profile_lp_norm(profile, 4.0)}};
  if (rep.worst() < -slack)
    throw RunFailure(fmt::format("negative margin {} below slack -{}", format_real(rep.worst()), format_real(slack)));
}

json read_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config file '{}': {}", path, e.what()));
  }
}

/// --set key=value: the value is read as JSON when it parses, else as a string.
json parse_set(const std::string& item) {
  const auto eq = item.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(fmt::format("--set expects key=value, got '{}'", item));
  const std::string key = item.substr(0, eq);
  const std::string text = item.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  return json{{key, value}};
}

struct Flags {
  std::string preset;
  std::string config;
  std::map<std::string, std::string> text;
  std::map<std::string, double> number;
  std::map<std::string, int> integer;
  std::vector<std::string> sets;
};

void add_flags(CLI::App* sub, Flags& fl) {
  sub->add_option("--preset", fl.preset, "built-in experiment");
  sub->add_option("--config", fl.config, "JSON config file");
  for (const char* key : {"out", "f", "g", "schedule", "grid", "kernel-sign"})
    sub->add_option(std::string("--") + key, fl.text[key]);
  for (const char* key : {"eps", "radius", "lambda", "gamma-scale", "box-spacing", "half-width"})
    sub->add_option(std::string("--") + key, fl.number[key]);
  for (const char* key : {"dim", "K", "N", "steps"}) sub->add_option(std::string("--") + key, fl.integer[key]);
  sub->add_option("--set", fl.sets, "extra key=value override (repeatable)");
}

json flag_overrides(CLI::App* sub, const Flags& fl) {
  static const std::map<std::string, std::string> rename{
      {"eps", "epsilon"}, {"grid", "grids"}, {"kernel-sign", "kernel_sign"}, {"gamma-scale", "gamma_scale"},
      {"box-spacing", "box_spacing"}, {"half-width", "half_width"}};
  auto key_of = [&](const std::string& flag) {
    auto it = rename.find(flag);
    return it == rename.end() ? flag : it->second;
  };
  json o = json::object();
  for (const auto& [k, v] : fl.text)
    if (sub->count("--" + k)) o[key_of(k)] = v;
  for (const auto& [k, v] : fl.number)
    if (sub->count("--" + k)) o[key_of(k)] = v;
  for (const auto& [k, v] : fl.integer)
    if (sub->count("--" + k)) o[key_of(k)] = v;
  for (const auto& s : fl.sets) o.update(parse_set(s));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Potential-form PDE solvers"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1, 1);
  Flags fl;
  std::vector<CLI::App*> subs;
  for (auto s : {Subcommand::Navier, Subcommand::Continuation, Subcommand::ToyOde, Subcommand::Eigen,
                 Subcommand::VerifyBarriers}) {
    CLI::App* sub = app.add_subcommand(to_string(s));
    add_flags(sub, fl);
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  RunConfig cfg;
  try {
    const Subcommand which = parse_subcommand(sub->get_name());
    json file = fl.config.empty() ? json::object() : read_config_file(fl.config);
    if (!file.is_object()) throw ConfigError("config must be a JSON object");
    if (file.contains("subcommand") && file["subcommand"] != sub->get_name())
      throw ConfigError(fmt::format("config file is for '{}'", file["subcommand"].dump()));
    std::string preset = fl.preset;
    if (preset.empty() && file.contains("preset")) {
      if (!file["preset"].is_string()) throw ConfigError("config key 'preset' has the wrong type");
      preset = file["preset"].get<std::string>();
    }
    cfg = preset_config(which, preset);
    apply_overrides(cfg, file);
    apply_overrides(cfg, flag_overrides(sub, fl));
    validate(cfg);
    Expression::parse(cfg.f);
    Expression::parse(cfg.g);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  const auto t0 = std::chrono::steady_clock::now();
  Output out(cfg);
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  try {
    switch (cfg.subcommand) {
      case Subcommand::Navier:
        run_ball(cfg, out, false);
        break;
      case Subcommand::Continuation:
        run_ball(cfg, out, true);
        break;
      case Subcommand::VerifyBarriers:
        run_verify_barriers(cfg, out);
        break;
      case Subcommand::ToyOde:
        run_toyode(cfg, out);
        break;
      case Subcommand::Eigen:
        run_eigen(cfg, out);
        break;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    out.results()["error"] = e.what();
    out.finish("config_error", elapsed());
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    out.results()["error"] = e.what();
    out.finish("failed", elapsed());
    return 1;
  }
  out.finish("ok", elapsed());
  return 0;
}
