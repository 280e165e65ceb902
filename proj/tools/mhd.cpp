#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mhd/io.hpp"

namespace {

using namespace mhd;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

// Flags that mirror config keys; only the ones given on the command line are applied.
struct RunFlags {
  std::string config;
  std::vector<std::pair<std::string, CLI::Option*>> keyed;
  std::vector<std::string> values;
  CLI::Option* steady = nullptr;
};

void add_run_flags(CLI::App* app, RunFlags& f) {
  app->add_option("--config", f.config, "key=value configuration file")->check(CLI::ExistingFile);
  const std::vector<std::pair<std::string, std::string>> keys{
      {"--case", "case"},         {"--scheme", "scheme"},
      {"-N", "N"},                {"-K", "K"},
      {"--Kx", "Kx"},             {"--Ky", "Ky"},
      {"--dt", "dt"},             {"--t-end", "t_end"},
      {"--steady-tol", "steady_tol"},
      {"--rf", "rf"},             {"--rm", "rm"},
      {"--c", "c"},               {"--s", "s"},
      {"--out", "out"},           {"--snapshot-every", "snapshot_every"},
      {"--quad-order", "quad_order"}, {"--picard-tol", "picard_tol"},
      {"--linear-tol", "linear_tol"}};
  f.values.resize(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    f.keyed.emplace_back(keys[i].second, app->add_option(keys[i].first, f.values[i]));
  }
  f.steady = app->add_flag("--steady", "run until the steady criterion holds");
}

RunConfig resolve_config(const RunFlags& f) {
  RunConfig config = f.config.empty() ? RunConfig{} : read_config(f.config);
  for (std::size_t i = 0; i < f.keyed.size(); ++i) {
    if (f.keyed[i].second->count() > 0) {
      apply_config_key(config, f.keyed[i].first, f.values[i]);
    }
  }
  if (f.steady->count() > 0) apply_config_key(config, "steady", "true");
  config.validate();
  return config;
}

int command_run(const RunFlags& flags) {
  const RunConfig config = resolve_config(flags);
  const CaseSpec spec = make_case(config.case_name, config.overrides());
  const auto disc = build_discretization(spec.build_mesh(), spec.degree, config.assembly());
  Integrator integrator(disc, spec.params, spec.data, config.scheme, config.stepper());
  DiagnosticsTracker tracker(disc, spec.params, spec.data, config.scheme);
  const Field u0 = project(disc->D, spec.u0), H0 = project(disc->C, spec.H0);
  const std::filesystem::path out = config.out_dir;

  RunOptions options;
  options.t_end = spec.t_end;
  options.steady = spec.steady;
  options.steady_tolerance = spec.steady_tolerance;

  double worst_budget = 0.0, worst_div_u = 0.0, worst_gauss = 0.0;
  const auto observer = [&](const State& s) {
    const DiagnosticsRecord& r = s.k == 0 ? tracker.start(s, H0) : tracker.advance(s);
    if (r.budget_defined) {
      worst_budget = std::max(worst_budget, std::abs(r.budget_residual) / std::max(1.0, r.Etilde));
    }
    worst_div_u = std::max(worst_div_u, r.div_u_L2);
    worst_gauss = std::max(worst_gauss, r.weak_divH_drift);
    if (config.snapshot_every > 0 && s.k % config.snapshot_every == 0) {
      char name[32];
      std::snprintf(name, sizeof name, "fields_%06d.vtk", s.k);
      write_fields(*disc, s, out / name);
    }
  };
  const RunSummary summary = run(integrator, u0, H0, options, observer);

  write_diagnostics(tracker.records(), out / "diagnostics.csv");
  write_fields(*disc, summary.final_state, out / "final.vtk");
  save_state(make_saved_state(config.case_name, config.scheme, spec, summary.final_state),
             out / "state.txt");

  const DiagnosticsRecord& last = tracker.records().back();
  std::printf("case %s scheme %s N=%d Kx=%d Ky=%d dt=%.6g\n", spec.name.c_str(),
              std::string(scheme_name(config.scheme)).c_str(), spec.degree, spec.kx, spec.ky,
              spec.params.dt);
  std::printf("steps %d  t %.6g  energy %.12g\n", summary.steps, summary.final_state.t,
              last.Etilde);
  if (spec.steady) {
    std::printf("steady %s  last increment %.3e\n", summary.steady_reached ? "reached" : "not reached",
                summary.last_increment);
  }
  std::printf("max |budget residual| %.3e  max ||div u|| %.3e  weak Gauss drift %.3e\n",
              worst_budget, worst_div_u, worst_gauss);
  if (spec.mms) {
    const ErrorNorms e = mms_errors(*disc, summary.final_state, *spec.mms, spec.params.dt);
    std::printf("errors u_hdiv %.6e omega_h1 %.6e P_l2 %.6e H_hcurl %.6e\n", e.u_hdiv,
                e.omega_h1, e.P_l2, e.H_hcurl);
  }
  std::printf("output written to %s\n", out.string().c_str());
  return kExitOk;
}

struct ConvergeFlags {
  std::string sweep;
  std::string scheme = "decoupled";
  int degree = 3;
  int k = 8;
  std::vector<int> ks;
  std::vector<double> dts{1.0 / 5, 1.0 / 10, 1.0 / 20, 1.0 / 40};
  double dt = 0.01;
  double t_end = -1.0;
  double length = -1.0;
};

int command_converge(const ConvergeFlags& f) {
  SweepOptions options;
  options.scheme = parse_scheme(f.scheme);
  SweepResult result;
  if (f.sweep == "temporal") {
    options.t_end = f.t_end > 0.0 ? f.t_end : 1.0;
    options.length = f.length > 0.0 ? f.length : kMmsLength;
    result = temporal_sweep(f.degree, f.k, f.dts, options);
  } else {
    options.t_end = f.t_end > 0.0 ? f.t_end : 0.1;
    options.length = f.length > 0.0 ? f.length : 2.0 * std::numbers::pi;
    std::vector<int> ks = f.ks;
    if (ks.empty()) {
      if (f.degree == 1) ks = {12, 16, 20, 24, 28, 32};
      else if (f.degree == 2) ks = {10, 12, 14, 16, 18, 20};
      else ks = {8, 10, 12, 14};
    }
    result = spatial_sweep(f.degree, ks, f.dt, options);
  }
  std::printf("%-12s %4s %12s %14s %14s %14s %14s\n", f.sweep == "temporal" ? "dt" : "h", "K",
              "dt", "u_hdiv", "omega_h1", "P_l2", "H_hcurl");
  for (const SweepRow& r : result.rows) {
    std::printf("%-12.6g %4d %12.6g %14.6e %14.6e %14.6e %14.6e\n", r.parameter, r.k, r.dt,
                r.errors.u_hdiv, r.errors.omega_h1, r.errors.P_l2, r.errors.H_hcurl);
  }
  std::printf("rates: u %.3f  omega %.3f  P %.3f  H %.3f\n", result.rate_u, result.rate_omega,
              result.rate_P, result.rate_H);
  return kExitOk;
}

Field random_field(const SpacePtr& space, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(space->dof_count());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = dist(rng);
  return Field(space, std::move(v));
}

int command_verify() {
  bool ok = true;
  auto report = [&](bool pass, const char* name, double value, double bound) {
    std::printf("%s %-28s %.3e (bound %.1e)\n", pass ? "PASS" : "FAIL", name, value, bound);
    ok = ok && pass;
  };

  double exact = 0.0;
  for (int n = 1; n <= 4; ++n) {
    for (int k = 1; k <= 3; ++k) {
      for (bool periodic : {false, true}) {
        const auto mesh = std::make_shared<const Mesh>(
            Bounds{0.0, 1.0, 0.0, 1.0}, k, k,
            std::array<Stretch, 2>{Stretch::uniform, Stretch::uniform},
            std::array<bool, 2>{periodic, periodic});
        const auto d = build_discretization(mesh, n);
        exact = std::max({exact, SparseMatrix(d->rot * d->grad).norm(),
                          SparseMatrix(d->div * d->perp_grad).norm()});
      }
    }
  }
  report(exact == 0.0, "complex exactness", exact, 0.0);

  std::mt19937 rng(20240611u);
  double skew = 0.0;
  const auto mesh = std::make_shared<const Mesh>(
      Bounds{0.0, 2.0, 0.0, 1.0}, 3, 2, std::array<Stretch, 2>{Stretch::uniform, Stretch::uniform},
      std::array<bool, 2>{false, false});
  for (int n = 1; n <= 3; ++n) {
    const auto d = build_discretization(mesh, n);
    const Field w = random_field(d->G, rng), j = random_field(d->S, rng);
    const Field h = random_field(d->C, rng), u = random_field(d->D, rng), v = random_field(d->D, rng);
    const double p = trilinear_value(w, u, v, 0), q = trilinear_value(w, v, u, 0);
    const double a = trilinear_value(u, h, j, 0), b = trilinear_value(h, u, j, 0);
    skew = std::max({skew, std::abs(p + q) / std::max(1.0, std::abs(p)),
                     std::abs(a + b) / std::max(1.0, std::abs(a)),
                     std::abs(trilinear_value(w, u, u, 0)) / std::max(1.0, u.coeffs.squaredNorm())});
  }
  report(skew <= 1e-12, "trilinear skew-symmetry", skew, 1e-12);

  const CaseSpec spec = conservation_case(2, 4, 1.0 / 50.0, 0.4, 100.0, 100.0);
  const auto disc = build_discretization(spec.build_mesh(), spec.degree);
  Integrator integrator(disc, spec.params, spec.data, Scheme::decoupled);
  DiagnosticsTracker tracker(disc, spec.params, spec.data, Scheme::decoupled);
  const Field u0 = project(disc->D, spec.u0), H0 = project(disc->C, spec.H0);
  RunOptions options;
  options.t_end = spec.t_end;
  double budget = 0.0, div_u = 0.0;
  run(integrator, u0, H0, options, [&](const State& s) {
    const DiagnosticsRecord& r = s.k == 0 ? tracker.start(s, H0) : tracker.advance(s);
    if (r.budget_defined) {
      budget = std::max(budget, std::abs(r.budget_residual) / std::max(1.0, r.Etilde));
    }
    div_u = std::max(div_u, r.div_u_L2);
  });
  report(budget <= 1e-10, "energy budget closure", budget, 1e-10);
  report(div_u <= 1e-12, "strong mass conservation", div_u, 1e-12);
  return ok ? kExitOk : kExitNumerical;
}

int command_centerline(const std::string& path) {
  const SavedState saved = load_state(path);
  CaseOverrides o;
  o.degree = saved.degree;
  o.kx = saved.kx;
  o.ky = saved.ky;
  o.dt = saved.dt;
  const CaseSpec spec = make_case(saved.case_name, o);
  const auto disc = build_discretization(spec.build_mesh(), spec.degree);
  const State state = saved.restore(disc);
  std::printf("# %s N=%d Kx=%d Ky=%d t=%.6g\n", saved.case_name.c_str(), saved.degree, saved.kx,
              saved.ky, saved.t);
  for (bool x_direction : {true, false}) {
    std::printf("# centerline %s\n", x_direction ? "y = 0.5" : "x = 0.5");
    std::printf("%8s %12s %12s %12s %12s %12s\n", x_direction ? "x" : "y", "u", "v", "omega",
                "Hx", "Hy");
    for (const CenterlineRow& r : centerline_extract(state, x_direction)) {
      std::printf("%8.3f %12.5f %12.5f %12.5f %12.5f %12.5f\n", x_direction ? r.x : r.y, r.u,
                  r.v, r.omega, r.Hx, r.Hy);
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-preserving 2D incompressible MHD solver"};
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "run a case and write diagnostics and fields");
  add_run_flags(run_cmd, run_flags);

  ConvergeFlags cf;
  CLI::App* converge_cmd = app.add_subcommand("converge", "manufactured-solution convergence sweep");
  converge_cmd->add_option("--sweep", cf.sweep, "temporal or spatial")
      ->required()
      ->check(CLI::IsMember({"temporal", "spatial"}));
  converge_cmd->add_option("--scheme", cf.scheme)->check(CLI::IsMember({"decoupled", "coupled-cn"}));
  converge_cmd->add_option("-N", cf.degree)->check(CLI::Range(1, 8));
  converge_cmd->add_option("-K", cf.k, "elements per side (temporal sweep)")->check(CLI::PositiveNumber);
  converge_cmd->add_option("--Ks", cf.ks, "elements per side (spatial sweep)");
  converge_cmd->add_option("--dts", cf.dts, "time steps (temporal sweep)");
  converge_cmd->add_option("--dt", cf.dt, "time step (spatial sweep)")->check(CLI::PositiveNumber);
  converge_cmd->add_option("--t-end", cf.t_end);
  converge_cmd->add_option("--length", cf.length, "domain side length");

  app.add_subcommand("verify", "complex exactness, skew-symmetry and a short budget check");

  std::string state_path;
  CLI::App* centerline_cmd = app.add_subcommand("centerline", "cavity centerline tables from a saved state");
  centerline_cmd->add_option("--state", state_path, "state.txt written by run")
      ->required()
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run_cmd->parsed()) return command_run(run_flags);
    if (converge_cmd->parsed()) return command_converge(cf);
    if (centerline_cmd->parsed()) return command_centerline(state_path);
    return command_verify();
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const StepError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const SolveError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const PicardError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
