// Command-line front end: solve, convergence, check, surface-wave, dump-mesh.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acoufem/acoufem.hpp"
#include "acoufem/config.hpp"

namespace fs = std::filesystem;
using namespace acoufem;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out_dir;  // overrides config output_dir when nonempty
  std::uint64_t seed = 12345;
  double gamma = -1.0;  // overrides config when >= 0
  std::string method;   // overrides config when nonempty
};

RunConfig load_config(const GlobalOpts& opts) {
  std::ifstream is(opts.config_path);
  if (!is) throw std::invalid_argument("cannot open config file: " + opts.config_path);
  RunConfig cfg = parse_config(is);
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  if (opts.gamma >= 0.0) cfg.gamma = opts.gamma;
  if (!opts.method.empty()) cfg.method = detail::parse_method(opts.method);
  return cfg;
}

Discretization build_discretization(const GeometryConfig& g, int order) {
  const StructuredQuadMesh m1 = build_mesh(g.domain1, g.nx1, g.ny1, g.tags1);
  const StructuredQuadMesh m2 = build_mesh(g.domain2, g.nx2, g.ny2, g.tags2);
  return make_discretization(m1, m2, order);
}

// gamma = 0 in the config means "calibrate from the inverse-constant
// estimate on a coarsened mesh".
double resolve_gamma(const RunConfig& cfg, const Discretization& disc) {
  if (cfg.gamma > 0.0) return cfg.gamma;
  return calibrate_gamma(disc);
}

std::string fmt_num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream os(dir / name);
  if (!os) throw std::runtime_error("cannot open output file: " + (dir / name).string());
  return os;
}

// Probes for the weak flux-continuity functional: smooth bumps over the
// joint bounding box, vanishing on its whole boundary (hence on every
// outer boundary facet) and continuous across the interface.
std::vector<std::function<double(double, double)>> flux_probes(const Discretization& disc) {
  const auto& d1 = disc.space1.mesh().domain;
  const auto& d2 = disc.space2.mesh().domain;
  const double x0 = std::min(d1.x_min, d2.x_min), x1 = std::max(d1.x_max, d2.x_max);
  const double y0 = std::min(d1.y_min, d2.y_min), y1 = std::max(d1.y_max, d2.y_max);
  const double pi = 3.14159265358979323846;
  auto bump = [=](int mx, int my) {
    return [=](double x, double y) {
      return std::sin(mx * pi * (x - x0) / (x1 - x0)) * std::sin(my * pi * (y - y0) / (y1 - y0));
    };
  };
  return {bump(1, 1), bump(2, 1), bump(1, 2)};
}

double balance_scale(const ProblemSpec& spec, const Discretization& disc) {
  double s = 0.0;
  for (int side = 1; side <= 2; ++side) {
    const auto& mesh = disc.space(side).mesh();
    for (int e = 0; e < 4; ++e) {
      const Edge edge = static_cast<Edge>(e);
      if (mesh.edge_tag(edge) != FacetTag::io) continue;
      const bool vert = (edge == Edge::left || edge == Edge::right);
      const double len = vert ? mesh.domain.height() : mesh.domain.width();
      s += std::norm(spec.inflow_on(side, edge)) * len;
    }
  }
  return s;
}

int cmd_solve(const GlobalOpts& opts) {
  const RunConfig cfg = load_config(opts);
  const Discretization disc = build_discretization(cfg.geometry, cfg.order);
  ProblemSpec spec = cfg.problem();
  spec.gamma = resolve_gamma(cfg, disc);
  spec.validate();

  const ComplexSparseSystem sys = assemble(spec, disc);
  const DiscreteField field = solve(sys, disc);

  const fs::path out(cfg.output_dir);
  {
    auto os = open_out(out, "field.csv");
    write_field_csv(field, cfg.solve.samples_x, cfg.solve.samples_y, os);
  }
  if (cfg.solve.write_vtk)
    for (int side = 1; side <= 2; ++side) {
      auto os = open_out(out, "field_side" + std::to_string(side) + ".vtk");
      write_field_vtk(field, side, os);
    }

  Json report;
  report["scenario"] = cfg.scenario;
  report["method"] = to_string(spec.method);
  report["kappa"] = spec.kappa;
  report["order"] = spec.order;
  report["gamma"] = spec.gamma;
  report["dofs"] = disc.dofs.total();
  report["balance_residual"] = balance_residual(field, spec);

  if (cfg.solve.exact_waveguide) {
    const WaveguideExact exact(spec.kappa, spec.zeta.at_segment(0));
    const ErrorReport err = error_norms(field, exact, spec);
    report["err_L2"] = err.err_l2;
    report["err_triple"] = err.err_triple;
    report["h"] = err.h;
    auto os = open_out(out, "solve_errors.csv");
    os << "h,dofs,err_L2,err_triple,balance_residual\n";
    os.precision(12);
    os << err.h << ',' << err.dofs << ',' << err.err_l2 << ',' << err.err_triple << ','
       << err.balance_residual << '\n';
  }
  {
    auto os = open_out(out, "report.json");
    os << report.dump(2) << '\n';
  }
  std::cout << "solve: " << disc.dofs.total() << " dofs, gamma = " << spec.gamma
            << ", outputs in " << out.string() << "\n";
  return 0;
}

int cmd_convergence(const GlobalOpts& opts) {
  const RunConfig cfg = load_config(opts);
  if (!cfg.convergence)
    throw std::invalid_argument("config: 'convergence' section is required for this subcommand");
  const fs::path out(cfg.output_dir);
  for (const int order : cfg.convergence->orders) {
    const Discretization base = build_discretization(cfg.geometry, order);
    for (const double kappa : cfg.convergence->kappas) {
      StudySetup setup;
      setup.base = base;
      setup.spec = cfg.problem();
      setup.spec.order = order;
      setup.spec.kappa = kappa;
      setup.spec.gamma = cfg.gamma > 0.0 ? cfg.gamma : calibrate_gamma(base);
      setup.spec.validate();
      setup.levels = cfg.convergence->levels;
      const ConvergenceTable table = convergence_study(setup);
      const std::string name = "conv_" + std::string(to_string(setup.spec.method)) + "_k" +
                               std::to_string(order) + "_kappa" + fmt_num(kappa) + ".csv";
      auto os = open_out(out, name);
      write_convergence_csv(table, os);
      std::cout << name << ": slope_L2 = " << table.slope_l2
                << ", slope_triple = " << table.slope_triple << "\n";
    }
  }
  return 0;
}

int cmd_check(const GlobalOpts& opts) {
  const RunConfig cfg = load_config(opts);
  const Discretization disc = build_discretization(cfg.geometry, cfg.order);
  ProblemSpec spec = cfg.problem();
  const double c_i = estimate_inverse_constant(
      disc.dofs.total() <= 4000 ? disc : build_discretization(cfg.geometry, 1));
  spec.gamma = resolve_gamma(cfg, disc);
  spec.validate();

  Json checks = Json::array();
  bool all_ok = true;
  auto add = [&](const std::string& name, bool ok, Json details) {
    details["name"] = name;
    details["pass"] = ok;
    checks.push_back(details);
    all_ok = all_ok && ok;
    std::cout << (ok ? "PASS" : "FAIL") << "  " << name << "\n";
  };

  {
    const LambdaPropertyReport rep = lambda_property_suite(2000, opts.seed);
    add("lambda_properties", rep.ok(),
        {{"samples", rep.samples},
         {"identity_violations", rep.identity_violations},
         {"bound_violations", rep.bound_violations},
         {"max_identity_err", rep.max_identity_err}});
  }
  {
    const ResolutionReport rep = check_resolution(spec, disc.pairing);
    add("resolution_condition", rep.ok,
        {{"h0", std::isfinite(rep.h0) ? Json(rep.h0) : Json("inf")},
         {"violating_subsegments", rep.violations.size()}});
    if (!rep.ok) {
      auto os = open_out(fs::path(cfg.output_dir), "check_report.json");
      os << Json{{"checks", checks}, {"all_pass", false}}.dump(2) << '\n';
      std::cout << "FAIL  (resolution condition violated; remaining checks skipped)\n";
      return 1;
    }
  }
  const bool gamma_ok = spec.gamma >= 16.0 * c_i;
  add("gamma_precondition", gamma_ok,
      {{"inverse_constant_estimate", c_i},
       {"gamma_used", spec.gamma},
       {"gamma_floor", 16.0 * c_i},
       {"note", gamma_ok ? "" : "gamma below 16 * inverse-constant estimate: "
                                "the stability hypothesis is violated, not the code"}});
  {
    const GardingReport rep = garding_check(spec, disc, 200, opts.seed);
    add("garding_inequality", rep.ok,
        {{"min_ratio", rep.min_ratio}, {"samples", rep.samples}, {"seed", rep.seed},
         {"gamma_hypothesis_satisfied", gamma_ok}});
  }
  {
    // Balance: exactly conserved for the standard method; restored in the
    // limit for the weighted method, so check decrease under refinement.
    const double scale = balance_scale(spec, disc);
    if (spec.method == Method::standard || scale == 0.0) {
      const DiscreteField f = solve(assemble(spec, disc), disc);
      const double rel = scale > 0.0 ? balance_residual(f, spec) / scale : 0.0;
      add("energy_balance", rel <= 1e-9, {{"relative_residual", rel}, {"tolerance", 1e-9}});
    } else {
      const DiscreteField f0 = solve(assemble(spec, disc), disc);
      const Discretization fine = refine(disc);
      const DiscreteField f1 = solve(assemble(spec, fine), fine);
      const double r0 = balance_residual(f0, spec) / scale;
      const double r1 = balance_residual(f1, spec) / scale;
      add("energy_balance", r1 <= r0 || r1 <= 1e-9,
          {{"relative_residual_coarse", r0}, {"relative_residual_fine", r1}});
    }
  }
  {
    const auto probes = flux_probes(disc);
    if (spec.method == Method::standard) {
      const DiscreteField f = solve(assemble(spec, disc), disc);
      const double r = weak_flux_residual(f, spec, probes);
      add("weak_flux_continuity", r <= 1e-8, {{"residual", r}, {"tolerance", 1e-8}});
    } else {
      const DiscreteField f0 = solve(assemble(spec, disc), disc);
      const Discretization fine = refine(disc);
      const DiscreteField f1 = solve(assemble(spec, fine), fine);
      const double r0 = weak_flux_residual(f0, spec, probes);
      const double r1 = weak_flux_residual(f1, spec, probes);
      add("weak_flux_continuity", r1 <= r0 || r1 <= 1e-8,
          {{"residual_coarse", r0}, {"residual_fine", r1}});
    }
  }

  {
    auto os = open_out(fs::path(cfg.output_dir), "check_report.json");
    os << Json{{"checks", checks}, {"all_pass", all_ok}, {"seed", opts.seed}}.dump(2) << '\n';
  }
  std::cout << (all_ok ? "all checks passed" : "CHECK FAILURES (see check_report.json)") << "\n";
  return all_ok ? 0 : 1;
}

int cmd_surface_wave(const GlobalOpts& opts) {
  const RunConfig cfg = load_config(opts);
  if (cfg.surface_wave.empty())
    throw std::invalid_argument("config: 'surface_wave' section is required for this subcommand");
  const fs::path out(cfg.output_dir);
  auto os = open_out(out, "surface_wave.csv");
  os << "kappa,zeta_re,zeta_im,decay_fit_ok,decay_length,fit_r2,"
        "wavelength_defined,wavelength,zero_crossings\n";
  os.precision(12);
  for (const SurfaceWaveRun& run : cfg.surface_wave) {
    GeometryConfig g = cfg.geometry;
    g.nx1 = run.nx1;
    g.ny1 = run.ny1;
    g.nx2 = run.nx2;
    g.ny2 = run.ny2;
    const Discretization disc = build_discretization(g, cfg.order);
    ProblemSpec spec = cfg.problem();
    spec.kappa = run.kappa;
    spec.zeta = ImpedanceField::constant(run.zeta);
    spec.gamma = cfg.gamma > 0.0 ? cfg.gamma : calibrate_gamma(disc);
    spec.validate();
    const DiscreteField field = solve(assemble(spec, disc), disc);
    const SurfaceWaveMetrics met = surface_wave_metrics(field);
    os << run.kappa << ',' << run.zeta.real() << ',' << run.zeta.imag() << ','
       << (met.decay_fit_ok ? 1 : 0) << ',' << met.decay_length << ',' << met.fit_r2 << ','
       << (met.wavelength_defined ? 1 : 0) << ',' << met.wavelength << ','
       << met.zero_crossings << '\n';
    std::cout << "kappa = " << run.kappa << ", zeta = " << run.zeta
              << ": decay_length = " << met.decay_length << ", wavelength = " << met.wavelength
              << "\n";
  }
  return 0;
}

int cmd_dump_mesh(const GlobalOpts& opts) {
  const RunConfig cfg = load_config(opts);
  const Discretization disc = build_discretization(cfg.geometry, cfg.order);
  const fs::path out(cfg.output_dir);
  for (int side = 1; side <= 2; ++side) {
    const std::string stem = "mesh" + std::to_string(side);
    auto nodes = open_out(out, stem + "_nodes.csv");
    auto elems = open_out(out, stem + "_elements.csv");
    auto facets = open_out(out, stem + "_facets.csv");
    write_mesh_csv(disc.space(side).mesh(), nodes, elems, facets);
  }
  auto segs = open_out(out, "interface_segments.csv");
  segs << "segment,lo,hi,facet1,facet2,h1,h2\n";
  segs.precision(12);
  for (std::size_t s = 0; s < disc.pairing.segments.size(); ++s) {
    const auto& seg = disc.pairing.segments[s];
    segs << s << ',' << seg.lo << ',' << seg.hi << ',' << seg.facet1 << ',' << seg.facet2 << ','
         << seg.h1 << ',' << seg.h2 << '\n';
  }
  std::cout << "mesh dumps written to " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-media Helmholtz solver with a permeable interface"};
  app.require_subcommand(1);

  GlobalOpts opts;
  app.add_option("--config", opts.config_path, "path to a JSON scenario file")->required();
  app.add_option("--out", opts.out_dir, "output directory (overrides the config)");
  app.add_option("--seed", opts.seed, "seed for randomized checks");
  app.add_option("--gamma", opts.gamma, "interface penalty parameter (overrides the config)");
  app.add_option("--method", opts.method, "nitsche or standard (overrides the config)")
      ->check(CLI::IsMember({"nitsche", "standard"}));

  auto* solve_cmd = app.add_subcommand("solve", "solve one scenario and dump the field");
  auto* conv_cmd = app.add_subcommand("convergence", "run a mesh refinement study");
  auto* check_cmd = app.add_subcommand("check", "run the verification battery");
  auto* sw_cmd = app.add_subcommand("surface-wave", "measure surface-wave decay and wavelength");
  auto* mesh_cmd = app.add_subcommand("dump-mesh", "write mesh and interface pairing CSVs");
  for (auto* sub : {solve_cmd, conv_cmd, check_cmd, sw_cmd, mesh_cmd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(opts);
    if (conv_cmd->parsed()) return cmd_convergence(opts);
    if (check_cmd->parsed()) return cmd_check(opts);
    if (sw_cmd->parsed()) return cmd_surface_wave(opts);
    if (mesh_cmd->parsed()) return cmd_dump_mesh(opts);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
