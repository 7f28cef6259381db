#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <iostream>
#include <random>

#include "CLI11.hpp"

#include "lrlattice/errors.hpp"
#include "lrlattice/fock.hpp"
#include "lrlattice/lieb_robinson.hpp"
#include "lrlattice/parallel.hpp"
#include "lrlattice/perturbations.hpp"
#include "lrlattice/report.hpp"
#include "lrlattice/weyl.hpp"
#include "scenario.hpp"

namespace lrl::cli {

namespace {

using ojson = nlohmann::ordered_json;

ojson model_json(const Scenario& s) {
  ojson m;
  m["d"] = s.params.dimension();
  m["omega"] = s.params.omega;
  m["lambda"] = s.params.lambda;
  return m;
}

ojson profile_json(const DecayProfile& p) {
  ojson j;
  j["epsilon"] = p.epsilon();
  j["a"] = p.a();
  return j;
}

ojson certificate_json(const DecayCertificate& c) {
  ojson j;
  j["mu"] = c.mu;
  j["velocity_bound"] = c.velocity_bound;
  j["prefactor"] = c.prefactor;
  j["c_a"] = c.c_a;
  j["v_a"] = c.v_a;
  j["a"] = c.a;
  j["absorption"] = c.absorption;
  j["a1"] = c.a1;
  return j;
}

ojson site_json(const Site& x, int d) {
  ojson j = ojson::array();
  for (int a = 0; a < d; ++a) j.push_back(x[a]);
  return j;
}

Report start(const Scenario& s) {
  Report r;
  r.summary["command"] = command_name(s.command);
  r.summary["model"] = model_json(s);
  return r;
}

void finish(Report& r) { r.summary["status"] = r.violation ? "violation" : "pass"; }

Report run_kernel(const Scenario& s) {
  Report r = start(s);
  const int d = s.params.dimension();
  r.header = {"m", "t"};
  for (int a = 1; a <= d; ++a) r.header.push_back("x_" + std::to_string(a));
  r.header.insert(r.header.end(), {"value", "est_error"});
  QuadratureSpec quad;
  quad.points_per_axis = s.quad_points;
  quad.refinement_tolerance = s.quad_tolerance;
  r.summary["window"] = s.window;
  ojson grids = ojson::array();
  for (double t : s.t) {
    const auto kernels = compute_kernels(s.params, t, s.window, quad);
    ojson g;
    g["t"] = t;
    g["points_per_axis"] = kernels[0].quadrature_points_per_axis;
    g["est_error"] = kernels[0].est_quadrature_error;
    grids.push_back(g);
    for (const auto& k : kernels) {
      for (std::size_t i = 0; i < k.samples.size(); ++i) {
        const Site x = k.window.site(i);
        std::vector<ojson> row{k.m, t};
        for (int a = 0; a < d; ++a) row.emplace_back(x[a]);
        row.emplace_back(k.samples[i]);
        row.emplace_back(k.est_quadrature_error);
        r.rows.push_back(std::move(row));
      }
    }
  }
  r.summary["quadrature"] = grids;
  finish(r);
  return r;
}

Report run_cone(const Scenario& s) {
  Report r = start(s);
  const ProbeKind probe = s.probe == "momentum" ? ProbeKind::momentum : ProbeKind::position;
  const ConeScan scan = cone_scan(s.params, s.x_max, s.t, s.threshold, probe);
  std::vector<DecayCertificate> certs;
  for (double mu : s.mu) {
    if (mu > s.profile.a()) certs.push_back(derive_constants(s.params, s.profile, mu));
  }
  r.header = {"t", "x", "value", "bound"};
  double worst_ratio = 0.0, worst_t = 0.0;
  int worst_x = 0;
  for (std::size_t ti = 0; ti < scan.t.size(); ++ti) {
    const double t = scan.t[ti];
    for (std::size_t xi = 0; xi < scan.x.size(); ++xi) {
      const int x = scan.x[xi];
      // f = delta_0, g = delta_x: the bound is c_a e^{v_a |t|} F_a(|x|)
      double bound = std::numeric_limits<double>::infinity();
      for (const auto& c : certs) bound = std::min(bound, c.c_a * std::exp(c.v_a * std::abs(t)) * s.profile(std::abs(x)));
      const double v = scan.values[ti][xi];
      const double ratio = v / bound;
      if (ratio > worst_ratio) {
        worst_ratio = ratio;
        worst_t = t;
        worst_x = x;
      }
      if (v > bound) r.violation = true;
      r.rows.push_back({t, x, v, bound});
    }
  }
  r.summary["threshold"] = s.threshold;
  r.summary["probe"] = s.probe;
  r.summary["profile"] = profile_json(s.profile);
  try {
    const VelocityEstimate est = estimate_velocity(scan);
    r.summary["velocity"] = est.velocity;
    r.summary["intercept"] = est.intercept;
    r.summary["fit_residual"] = est.fit_residual;
    ojson fronts = ojson::array();
    for (std::size_t i = 0; i < est.t.size(); ++i) fronts.push_back({est.t[i], est.front[i]});
    r.summary["front"] = fronts;
  } catch (const std::runtime_error& e) {
    r.summary["velocity"] = nullptr;
    r.summary["velocity_error"] = e.what();
  }
  ojson cj = ojson::array();
  for (const auto& c : certs) cj.push_back(certificate_json(c));
  r.summary["certificates"] = cj;
  r.summary["max_value_over_bound"] = worst_ratio;
  r.summary["worst_point"] = {{"t", worst_t}, {"x", worst_x}};
  finish(r);
  return r;
}

Report run_bounds(const Scenario& s) {
  Report r = start(s);
  QuadratureSpec quad;
  quad.points_per_axis = s.quad_points;
  quad.refinement_tolerance = s.quad_tolerance;
  r.header = {"mu", "velocity_bound", "prefactor", "absorption", "c_a", "v_a", "a", "max_kernel_ratio"};
  const int d = s.params.dimension();
  double worst = -1.0;
  ojson worst_point;
  double discrepancy = 0.0;
  for (double mu : s.mu) {
    const KernelBoundCheck check = verify_kernel_bounds(s.params, {mu}, s.t, s.window, quad);
    discrepancy = std::max(discrepancy, check.quadrature_discrepancy);
    if (check.max_ratio > worst) {
      worst = check.max_ratio;
      worst_point = {{"m", check.worst_m}, {"t", check.worst_t}, {"mu", check.worst_mu},
                     {"x", site_json(check.worst_x, d)}};
    }
    if (!check.pass()) r.violation = true;
    if (mu > s.profile.a()) {
      const DecayCertificate c = derive_constants(s.params, s.profile, mu);
      r.rows.push_back({mu, c.velocity_bound, c.prefactor, c.absorption, c.c_a, c.v_a, c.a, check.max_ratio});
    } else {
      const double v = velocity_bound(s.params.c(), mu);
      const double pref = 1.0 + 2.0 * std::exp(mu / 2.0) * s.params.c() + 2.0 / s.params.c();
      r.rows.push_back({mu, v, pref, nullptr, nullptr, mu * v, s.profile.a(), check.max_ratio});
    }
  }
  r.summary["window"] = s.window;
  r.summary["profile"] = profile_json(s.profile);
  r.summary["t"] = s.t;
  r.summary["max_kernel_ratio"] = worst;
  r.summary["slack"] = kKernelBoundSlack;
  r.summary["worst_point"] = worst_point;
  r.summary["quadrature_discrepancy"] = discrepancy;
  r.summary["default_certificate"] = certificate_json(derive_constants_default(s.params, s.profile));
  finish(r);
  return r;
}

Field random_label(const LatticeGeometry& geom, std::mt19937_64& rng, bool zero_mean) {
  std::uniform_int_distribution<std::size_t> site(0, geom.size() - 1);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  Field f(geom);
  std::vector<std::size_t> used;
  for (int k = 0; k < 3; ++k) {
    const std::size_t i = site(rng);
    const double re = val(rng);
    const double im = val(rng);
    f.values()[i] += cplx(re, im);
    used.push_back(i);
  }
  if (zero_mean) f.values()[used[0]] -= cplx(f.position_sum(), 0.0);
  return f;
}

Report run_state(const Scenario& s) {
  constexpr double kInvarianceTol = 1e-8;
  Report r = start(s);
  const QuasiFreeState state(s.params, s.geometry);
  std::mt19937_64 rng(s.seed);
  r.header = {"sample", "t", "rho_f", "rho_tf", "abs_diff"};
  double worst = 0.0;
  ojson worst_point;
  for (int k = 0; k < s.samples; ++k) {
    const Field f = random_label(s.geometry, rng, s.params.omega == 0.0);
    const double rho_f = std::real(state_eval(state, WeylOperator(f)));
    for (double t : s.t) {
      const double rho_tf = std::real(state_eval(state, WeylOperator(apply_propagator_torus(f, s.params, t))));
      const double diff = std::abs(rho_tf - rho_f);
      if (diff > worst) {
        worst = diff;
        worst_point = {{"sample", k}, {"t", t}};
      }
      r.rows.push_back({k, t, rho_f, rho_tf, diff});
    }
  }
  if (worst > kInvarianceTol) r.violation = true;

  const auto& g = s.geometry;
  const Site o{};
  Site e1{};
  e1[0] = 1;
  Site em{};
  em[0] = -1;
  const Field g1 = cplx(0.5) * Field::delta(g, o);
  const Field f = cplx(-0.5, 0.4) * Field::delta(g, g.wrap(e1));
  const Field g2 = cplx(0.0, 0.5) * Field::delta(g, g.wrap(em));
  const ContinuityScan scan = three_point_continuity(state, g1, f, g2, 0.0, 1.0, s.levels);

  r.summary["L"] = g.extent();
  r.summary["seed"] = s.seed;
  r.summary["samples"] = s.samples;
  r.summary["max_invariance_error"] = worst;
  r.summary["invariance_tolerance"] = kInvarianceTol;
  r.summary["worst_point"] = worst_point;
  ojson cont;
  cont["spacings"] = scan.spacings;
  cont["moduli"] = scan.moduli;
  cont["ratios"] = scan.ratios;
  r.summary["three_point_continuity"] = cont;
  finish(r);
  return r;
}

Report run_converge(const Scenario& s) {
  Report r = start(s);
  const int d = s.params.dimension();
  const VolumeSequence seq(s.half_sides);
  const auto volume = LatticeGeometry::infinite(d, s.half_sides.back());
  const PerturbationFamily family = s.perturbation_path ? load_family(*s.perturbation_path, volume)
                                                        : PerturbationFamily::uniform_cosine(volume, s.z, s.weight);
  DecayCertificate cert = derive_constants_default(s.params, s.profile);
  if (!s.a_grid.empty()) cert.a1 = empirical_a1(family, s.profile, s.window, s.a_grid);
  const double c_conv = convolution_constant(s.profile, s.window).value;
  const double first = first_moment(family);
  double kappa = 0.0, rate = 0.0;
  if (family.on_site()) {
    kappa = second_moment(family);
    rate = perturbed_rate_onsite(cert, kappa, c_conv);
  } else {
    kappa = pair_moment(family, s.profile, s.window).kappa_a;
    rate = perturbed_rate(cert, kappa, c_conv);
  }

  const Field f = Field::delta(LatticeGeometry::infinite(d, 1), Site{});
  const std::size_t n = seq.size() - 1;
  r.header = {"t", "m", "L_m", "L_n", "tail"};
  ojson non_monotone = nullptr;
  for (double t : s.t) {
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < n; ++m) {
      const double tail = convergence_tail_with_rate(f, seq, n, m, t, first, cert, rate, s.profile);
      if (tail > prev && non_monotone.is_null()) {
        r.violation = true;
        non_monotone = {{"t", t}, {"m", m}};
      }
      prev = tail;
      r.rows.push_back({t, m, s.half_sides[m], s.half_sides[n], tail});
    }
  }
  r.summary["profile"] = profile_json(s.profile);
  r.summary["certificate"] = certificate_json(cert);
  r.summary["on_site"] = family.on_site();
  r.summary["kappa"] = kappa;
  r.summary["first_moment"] = first;
  r.summary["convolution_constant"] = c_conv;
  r.summary["rate"] = rate;
  r.summary["half_sides"] = s.half_sides;
  r.summary["first_non_monotone"] = non_monotone;
  finish(r);
  return r;
}

Report run_fock_verify(const Scenario& s) {
  constexpr double kRelTol = 1e-3;
  constexpr double kFloor = 1e-12;
  Report r = start(s);
  const auto& geom = s.geometry;
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> radius(0.1 * s.label_norm, s.label_norm);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  Site e1{};
  e1[0] = 1;

  struct Point {
    Field f, g;
    double t, exact;
  };
  std::vector<Point> points;
  for (int k = 0; k < s.samples; ++k) {
    for (double t : s.t) {
      // draw until the commutator is not tiny, so the relative error is meaningful
      while (true) {
        const Field f = std::polar(radius(rng), angle(rng)) * Field::delta(geom, Site{});
        const Field g = std::polar(radius(rng), angle(rng)) * Field::delta(geom, e1);
        const double exact = commutator_norm(f, g, s.params, t);
        if (exact >= 1e-3) {
          points.push_back({f, g, t, exact});
          break;
        }
      }
    }
  }

  r.header = {"cutoff", "t", "sample", "oracle", "exact", "rel_error"};
  std::vector<double> max_rel;
  for (int cutoff : s.cutoffs) {
    FockConfig config;
    config.sites = s.sites;
    config.cutoff = cutoff;
    config.params = s.params;
    const FockSystem system(config);
    double worst = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const Point& p = points[i];
      const double oracle = commutator_oracle(system, p.f, p.g, p.t);
      const double rel = std::abs(oracle - p.exact) / p.exact;
      worst = std::max(worst, rel);
      r.rows.push_back({cutoff, p.t, static_cast<int>(i / s.t.size()), oracle, p.exact, rel});
    }
    max_rel.push_back(worst);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < max_rel.size(); ++i) {
    if (max_rel[i] > max_rel[i - 1] && max_rel[i] > kFloor) monotone = false;
  }
  if (!monotone || max_rel.back() > kRelTol) r.violation = true;
  r.summary["sites"] = s.sites;
  r.summary["seed"] = s.seed;
  r.summary["cutoffs"] = s.cutoffs;
  r.summary["max_rel_error"] = max_rel;
  r.summary["rel_tolerance"] = kRelTol;
  r.summary["monotone"] = monotone;
  finish(r);
  return r;
}

std::string csv_cell(const ojson& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

Report run_scenario(const Scenario& s) {
  switch (s.command) {
    case Command::kernel:
      return run_kernel(s);
    case Command::cone:
      return run_cone(s);
    case Command::bounds:
      return run_bounds(s);
    case Command::state:
      return run_state(s);
    case Command::converge:
      return run_converge(s);
    case Command::fock_verify:
      return run_fock_verify(s);
  }
  throw std::logic_error("unhandled command");
}

std::vector<std::string> write_report(const Scenario& s, const Report& report) {
  if (s.format == OutputFormat::json) {
    ojson doc;
    doc["summary"] = report.summary;
    ojson rows = ojson::array();
    for (const auto& row : report.rows) {
      ojson o;
      for (std::size_t i = 0; i < report.header.size(); ++i) o[report.header[i]] = row[i];
      rows.push_back(o);
    }
    doc["rows"] = rows;
    write_atomic(s.output, render_json(doc));
    return {s.output};
  }
  CsvWriter csv(report.header);
  for (const auto& row : report.rows) {
    std::vector<std::string> cells;
    for (const auto& v : row) cells.push_back(csv_cell(v));
    csv.row(cells);
  }
  // both texts are complete before either file is touched
  const std::string summary = render_json(report.summary);
  const std::string sidecar = s.output + ".summary.json";
  write_atomic(s.output, csv.text());
  write_atomic(sidecar, summary);
  return {s.output, sidecar};
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Harmonic lattice dynamics: kernels, light cones, bounds, states and Fock-space checks"};
  app.set_help_flag("-h,--help", "Print this help message and exit");
  std::string command, config;
  app.add_option("command", command, "kernel | cone | bounds | state | converge | fock-verify");
  app.add_option("-c,--config", config, "JSON scenario file");

  nlohmann::json overrides = nlohmann::json::object();
  std::vector<std::function<void()>> collect;
  auto flag = [&](const std::string& name, const std::string& key, auto& storage, const std::string& help) {
    CLI::Option* opt = app.add_option(name, storage, help);
    auto* value = &storage;
    collect.push_back([&overrides, opt, key, value] {
      if (opt->count() > 0) overrides[key] = *value;
    });
  };
  int d = 0, window = 0, x_max = 0, L = 0, samples = 0, levels = 0, sites = 0, quad_points = 0;
  double omega = 0, epsilon = 0, a = 0, threshold = 0, weight = 0, label_norm = 0, quad_tolerance = 0;
  std::uint64_t seed = 0;
  std::vector<double> lambda, t, mu, a_grid, z;
  std::vector<int> half_sides, cutoffs;
  std::string probe, perturbation, output, format;
  flag("--d", "d", d, "lattice dimension");
  flag("--omega", "omega", omega, "on-site frequency");
  flag("--lambda", "lambda", lambda, "couplings, one per axis");
  flag("--t", "t", t, "time grid");
  flag("--mu", "mu", mu, "envelope rates");
  flag("--a-grid", "a_grid", a_grid, "decay rates probed for a1");
  flag("--epsilon", "epsilon", epsilon, "polynomial decay exponent offset");
  flag("--a", "a", a, "exponential decay rate");
  flag("--window", "window", window, "kernel or moment window");
  flag("--x-max", "x_max", x_max, "cone scan half width");
  flag("--threshold", "threshold", threshold, "cone front threshold");
  flag("--probe", "probe", probe, "position | momentum");
  flag("--quad-points", "quad_points", quad_points, "initial quadrature points per axis");
  flag("--quad-tolerance", "quad_tolerance", quad_tolerance, "quadrature refinement tolerance");
  flag("--L", "L", L, "torus half side");
  flag("--samples", "samples", samples, "random test points");
  flag("--levels", "levels", levels, "continuity refinement levels");
  flag("--seed", "seed", seed, "seed for random test points");
  flag("--half-sides", "half_sides", half_sides, "box half sides");
  flag("--perturbation", "perturbation", perturbation, "perturbation family JSON file");
  flag("--z", "z", z, "cosine amplitude as re im");
  flag("--weight", "weight", weight, "cosine weight");
  flag("--sites", "sites", sites, "Fock ring sites");
  flag("--cutoffs", "cutoffs", cutoffs, "Fock occupation cutoffs");
  flag("--label-norm", "label_norm", label_norm, "largest label modulus");
  flag("--output", "output", output, "report path");
  flag("--format", "format", format, "csv | json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    configure_threads();
    for (auto& c : collect) c();
    if (!command.empty()) overrides["command"] = command;
    const Scenario scenario = load_scenario(config, overrides);
    const Report report = run_scenario(scenario);
    for (const auto& path : write_report(scenario, report)) std::cout << path << '\n';
    if (report.violation) {
      std::cerr << "bound violation; see the report for the worst point\n";
      return 1;
    }
    return 0;
  } catch (const ConfigError& e) {
    for (const auto& p : e.problems()) std::cerr << "config error: " << p << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace lrl::cli
