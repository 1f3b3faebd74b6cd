// shiftlab: batch front end. Each subcommand reads key=value settings (from
// --config and/or the command line), validates all of them, runs, and writes
// CSV tables plus a JSON manifest into the output directory.
//
// Exit status: 0 ok, 2 invalid configuration or input, 3 numerical tolerance
// not met.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>

#include "shiftlab/approx.hpp"
#include "shiftlab/boundary_sets.hpp"
#include "shiftlab/dynamics.hpp"
#include "shiftlab/io.hpp"
#include "shiftlab/norms.hpp"

using namespace shiftlab;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Run {
  std::string command;
  Config cfg;
  std::filesystem::path out_dir;
  std::vector<std::string> files;
  json summary = json::object();

  void emit(const std::string& name, const CsvTable& t) {
    std::string file = command + (name.empty() ? "" : "_" + name) + ".csv";
    t.save((out_dir / file).string());
    files.push_back(file);
  }
  void emit_json(const std::string& name, const json& j) {
    std::string file = command + "_" + name + ".json";
    std::ofstream f(out_dir / file, std::ios::binary);
    f << j.dump(2) << '\n';
    files.push_back(file);
  }
};

using Job = std::function<void(Run&)>;

// ---------------------------------------------------------------------------
// Shared readers

Domain read_domain(const Config& c, const std::string& def_kind) {
  const std::string kind = c.get_string("domain.kind", def_kind);
  if (kind == "unit_disk") return Domain::unit_disk();
  if (kind == "disk") return Domain::disk(c.get_complex("domain.center", 0.0), c.get_double("domain.radius", 1.0));
  if (kind == "two_disk")
    return Domain::two_disk_union(c.get_complex("domain.c1", 0.0), c.get_double("domain.r1", 1.0),
                                  c.get_complex("domain.c2", 1.0), c.get_double("domain.r2", 0.3));
  if (kind == "polygon") {
    auto v = c.get_complexes("domain.vertices", {});
    if (v.size() < 3) c.fail("domain.vertices", "a polygon needs at least 3 vertices");
    return Domain::polygon(v);
  }
  c.fail("domain.kind", "unknown domain kind '" + kind + "' (unit_disk, disk, two_disk, polygon)");
}

Arc read_arc(const Config& c, const std::string& key, Arc def) {
  auto v = c.get_doubles(key, {def.start, def.end});
  if (v.size() != 2 || !(v[1] > v[0])) c.fail(key, "expected an angle pair t1, t2 with t1 < t2");
  return {v[0], v[1]};
}

CompactCircleSet arc_set(Arc a) { return CompactCircleSet({a}, {}); }

struct SetSpec {
  CompactCircleSet set;
  std::string description;
};

// set.kind: points (set.angles), arcs (set.arcs = t1,t2; ...), roots (set.K),
// golden, cantor (set.N, set.levels), cantor_endpoints (also set.count).
SetSpec read_set(const Config& c, const std::string& def_kind, std::size_t def_count = 16) {
  const std::string kind = c.get_string("set.kind", def_kind);
  if (kind == "points") {
    auto a = c.get_doubles("set.angles", {0.0});
    return {CompactCircleSet::from_angles(a), "points"};
  }
  if (kind == "arcs") {
    auto pairs = c.get_complexes("set.arcs", {cplx{0.0, 0.1}});
    std::vector<Arc> arcs;
    for (cplx p : pairs) {
      if (!(p.imag() > p.real())) c.fail("set.arcs", "each arc is t1,t2 with t1 < t2");
      arcs.push_back({p.real(), p.imag()});
    }
    return {CompactCircleSet(arcs, {}), "arcs"};
  }
  if (kind == "roots") {
    long long K = c.get_int("set.K", 12);
    if (K < 1) c.fail("set.K", "must be positive");
    return {CompactCircleSet::roots_of_unity(K), "roots of unity, K = " + std::to_string(K)};
  }
  if (kind == "golden") {
    const long double t = (std::sqrt(5.0L) - 1.0L) / 2.0L;
    return {CompactCircleSet({}, {CirclePoint::from_turns(t)}), "golden point"};
  }
  if (kind == "cantor" || kind == "cantor_endpoints") {
    CantorSpec spec{static_cast<int>(c.get_int("set.N", 2)), static_cast<int>(c.get_int("set.levels", 3))};
    if (kind == "cantor") return {build_cantor(spec).as_set(), "Cantor set"};
    auto count = static_cast<std::size_t>(c.get_int("set.count", static_cast<long long>(def_count)));
    return {CompactCircleSet::from_angles(build_cantor(spec).endpoint_samples(count)), "Cantor endpoints"};
  }
  c.fail("set.kind", "unknown set kind '" + kind + "' (points, arcs, roots, golden, cantor, cantor_endpoints)");
}

std::vector<cplx> finite_points(const Config& c, const CompactCircleSet& E) {
  if (!E.arcs().empty()) c.fail("set.kind", "this command needs a finite set (points, roots, golden, cantor_endpoints)");
  std::vector<cplx> w;
  for (const auto& p : E.points()) w.push_back(p.value());
  return w;
}

PowerSeries read_series(const Config& c, const std::string& key, const std::vector<cplx>& def) {
  auto v = c.get_complexes(key, def);
  if (v.empty()) c.fail(key, "empty coefficient list");
  return PowerSeries(v);
}

CoeffSpace read_space(const Config& c) {
  const std::string s = c.get_string("space", "A2");
  if (s == "A2") return CoeffSpace::A2;
  if (s == "H2") return CoeffSpace::H2;
  c.fail("space", "expected A2 or H2");
}

NormSpec coeff_spec(CoeffSpace s) {
  return s == CoeffSpace::A2 ? NormSpec{ApDiskNormalized{2.0}} : NormSpec{HardyP{2.0}};
}

long long as_int(std::size_t x) { return static_cast<long long>(x); }

// ---------------------------------------------------------------------------
// Subcommands: each reads its settings and returns the work to run once the
// whole configuration has validated.

Job plan_cantor(const Config& c) {
  int N = static_cast<int>(c.get_int("N", 2));
  int levels = static_cast<int>(c.get_int("levels", 5));
  return [=](Run& run) {
    CantorSet cs = build_cantor({N, levels});
    CsvTable arcs({"index", "start_turns", "end_turns"});
    for (std::size_t i = 0; i < cs.arcs.size(); ++i) arcs.add({as_int(i), static_cast<double>(cs.arcs[i].lo), static_cast<double>(cs.arcs[i].hi)});
    CsvTable lv({"level", "removed_each", "removed_level", "removed_through", "closed_form_through", "remaining",
                 "carleson_through", "carleson_lower_bound"});
    double closed = 0.0, lower = 0.0;
    for (const auto& s : cs.stats) {
      double nj = static_cast<double>(N + s.level);
      closed += 1.0 / (nj * nj);
      lower += std::log(2.0) * s.level / (nj * nj);
      lv.add({static_cast<long long>(s.level), s.removed_each, s.removed_level, s.removed_through, closed, s.remaining,
              s.carleson_through, lower});
    }
    run.emit("arcs", arcs);
    run.emit("levels", lv);
    run.summary = {{"arcs", cs.arcs.size()}, {"removed_measure", cs.removed_measure()}};
  };
}

Job plan_dirichlet(const Config& c) {
  SetSpec E = read_set(c, "golden");
  auto n_max = c.get_int("n_max", 100000);
  double delta = c.get_double("delta", 0.1);
  std::string mode = c.get_string("mode", "records");
  if (n_max < 1) c.fail("n_max", "must be positive");
  if (mode != "records" && mode != "search") c.fail("mode", "expected records or search");
  return [=](Run& run) {
    auto hits = mode == "records" ? dirichlet_records(E.set, static_cast<std::uint64_t>(n_max))
                                  : dirichlet_search(E.set, static_cast<std::uint64_t>(n_max), delta);
    CsvTable t({"n", "residual"});
    for (const auto& h : hits) t.add({static_cast<long long>(h.n), h.residual});
    run.emit("", t);
    run.summary = {{"set", E.description}, {"hits", hits.size()}};
  };
}

Job plan_peak(const Config& c) {
  SetSpec E = read_set(c, "cantor_endpoints", 16);
  auto w = finite_points(c, E.set);
  auto d = static_cast<std::size_t>(c.get_int("d", 120));
  PeakOptions opt;
  opt.lambda = c.get_double("lambda", opt.lambda);
  opt.lambda_max = c.get_double("lambda_max", opt.lambda_max);
  opt.sup_target = c.get_double("sup_target", opt.sup_target);
  opt.s = c.get_double("bs_s", opt.s);
  long long qd = c.get_int("q_degree", -1);
  if (qd >= 0) opt.q_degree = static_cast<std::size_t>(qd);
  return [=](Run& run) {
    PeakResult r = peaking_polynomial(w, d, opt);
    CsvTable t({"construction", "valid", "a2_dist", "sup_E", "bs_dist", "bound", "m", "q_degree", "lambda",
                "stationarity", "condition"});
    for (const auto* cand : {&r.a, &r.b})
      t.add({std::string(cand == &r.a ? "a" : "b"), static_cast<long long>(cand->valid), cand->a2_dist, cand->sup_E,
             cand->bs_dist, cand->bound, as_int(cand->m), as_int(cand->q_degree), cand->lambda, cand->stationarity,
             cand->condition});
    run.emit("candidates", t);
    run.emit_json("Q", {{"construction", r.construction}, {"coefficients", to_json(r.Q)}});
    run.summary = {{"construction", r.construction}, {"points", w.size()}};
  };
}

Job plan_approx(const Config& c) {
  SetSpec E = read_set(c, "cantor_endpoints", 16);
  auto w = finite_points(c, E.set);
  PowerSeries f = read_series(c, "f", {1.0, 0.5, 0.25, 0.125});
  cplx g = c.get_complex("g", 0.0);
  CoeffSpace space = read_space(c);
  auto degrees = c.get_sizes("degrees", {40, 80, 160, 320});
  if (degrees.empty()) c.fail("degrees", "empty degree list");
  return [=](Run& run) {
    CsvTable t({"d", "norm_err", "sup_err", "joint", "method", "condition"});
    std::vector<cplx> targets(w.size(), g);
    for (std::size_t d : degrees) {
      SimResult r = simultaneous_approx(f, w, targets, coeff_spec(space), d);
      t.add({as_int(d), r.norm_err, r.sup_err, r.joint(), r.method, r.condition});
    }
    run.emit("", t);
    run.summary = {{"points", w.size()}, {"space", space == CoeffSpace::A2 ? "A2" : "H2"}};
  };
}

Job plan_universal(const Config& c) {
  SetSpec E = read_set(c, "cantor_endpoints", 10);
  auto w = finite_points(c, E.set);
  auto values = c.get_complexes("targets", {1.0, -1.0, cplx{0.0, 1.0}});
  PowerSeries f0 = read_series(c, "f0", {0.0});
  UniversalOptions opt;
  opt.space = read_space(c);
  opt.max_degree = static_cast<std::size_t>(c.get_int("max_degree", static_cast<long long>(opt.max_degree)));
  auto budgets = c.get_doubles("budgets", {});
  if (!budgets.empty() && budgets.size() != values.size()) c.fail("budgets", "one budget per target is required");
  return [=](Run& run) {
    std::vector<std::vector<cplx>> targets;
    for (cplx v : values) targets.emplace_back(w.size(), v);
    UniversalResult r = universal_builder(targets, w, f0, budgets, opt);
    CsvTable t({"stage", "n_prev", "n_k", "sup_residual", "block_norm", "eps", "norm_budget", "condition", "met"});
    for (std::size_t k = 0; k < r.stages.size(); ++k) {
      const auto& s = r.stages[k];
      t.add({as_int(k + 1), as_int(s.n_prev), as_int(s.n_k), s.sup_residual, s.block_norm, s.eps, s.norm_budget,
             s.condition, static_cast<long long>(s.met)});
    }
    run.emit("stages", t);
    run.emit_json("series", {{"coefficients", to_json(r.f)}});
    run.summary = {{"stages", r.stages.size()}, {"failed_stage", r.failed_stage ? json(*r.failed_stage) : json()}};
    if (r.failed_stage)
      throw ToleranceFailure("universal: stage " + std::to_string(*r.failed_stage) + " missed its budget",
                             r.stages.back().sup_residual, r.stages.back().eps);
  };
}

Job plan_menshov(const Config& c) {
  double eps = c.get_double("eps", 0.2);
  int stages = static_cast<int>(c.get_int("stages", 1));
  MenshovOptions opt;
  opt.cantor_levels = static_cast<int>(c.get_int("cantor_levels", opt.cantor_levels));
  opt.samples = static_cast<std::size_t>(c.get_int("samples", static_cast<long long>(opt.samples)));
  opt.grid = static_cast<std::size_t>(c.get_int("grid", static_cast<long long>(opt.grid)));
  opt.delta = c.get_double("delta", opt.delta);
  return [=](Run& run) {
    MenshovReport r = menshov_demo(StepFunction::sign_step(), eps, stages, opt);
    CsvTable t({"stage", "N", "eps", "E_measure", "n_k", "coverage", "coverage_on_E", "sup_on_samples", "block_norm",
                "met"});
    for (std::size_t k = 0; k < r.stages.size(); ++k) {
      const auto& s = r.stages[k];
      t.add({as_int(k + 1), static_cast<long long>(s.N), s.eps, s.E_measure, as_int(s.n_k), s.coverage,
             s.coverage_on_E, s.sup_on_samples, s.block_norm, static_cast<long long>(s.met)});
    }
    run.emit("stages", t);
    run.summary = {{"coverage_stage0", r.coverage_stage0}};
  };
}

Job plan_dynamics(const Config& c) {
  Domain dom = read_domain(c, "two_disk");
  cplx alpha = c.get_complex("alpha", 1.0);
  Arc G = read_arc(c, "gamma", {0.9, two_pi - 0.9});
  auto ns = c.get_sizes("n", {10, 20, 50, 100, 200});
  KitaiQuadOptions q;
  q.p = c.get_double("p", 2.0);
  q.tol = c.get_double("tol", q.tol);
  if (q.p < 1.0) c.fail("p", "must be at least 1");
  return [=](Run& run) {
    KitaiFunction kf(alpha, G);
    CsvTable t({"n", "iterate_norm", "right_inverse_norm", "iterate_converged", "right_inverse_converged"});
    for (std::size_t n : ns) {
      auto a = kitai_norm(kf, KitaiPart::Iterate, n, dom, q), b = kitai_norm(kf, KitaiPart::RightInverse, n, dom, q);
      t.add({as_int(n), a.value, b.value, static_cast<long long>(a.converged), static_cast<long long>(b.converged)});
    }
    run.emit("norms", t);
    std::vector<cplx> grid;
    for (int i = 0; i < 30; ++i) {
      cplx z = std::polar(0.2 + 0.025 * i, 0.7 * i);
      if (detail::dist_to_arc(G, alpha * z) > 1e-3) grid.push_back(z);
    }
    CsvTable chk({"check", "value"});
    chk.add({std::string("partial_integration_n10"), kitai_partial_integration(kf, 10, cplx{0.4, 0.3}).residual});
    chk.add({std::string("right_inverse_identity_n5"), kitai_right_inverse_check(kf, 5, grid)});
    chk.add({std::string("eigen_residual_d100"), eigen_check(0.9 * alpha / std::max(1.0, std::abs(alpha)), 100)});
    run.emit("checks", chk);
    run.summary = {{"domain", dom.describe()}};
  };
}

Job plan_mixing(const Config& c) {
  Domain dom = read_domain(c, "two_disk");
  PowerSeries u = read_series(c, "u", {1.0, 0.5});
  PowerSeries v = read_series(c, "v", {0.0, 1.0});
  auto ns = c.get_sizes("n", {8, 16, 32, 64, 128});
  MixingOptions opt;
  opt.A = arc_set(read_arc(c, "A", {-0.5, 0.5}));
  opt.Gamma = arc_set(read_arc(c, "gamma", {0.9, two_pi - 0.9}));
  opt.expansion.samples = static_cast<std::size_t>(c.get_int("samples", 48));
  opt.expansion.ridge = c.get_double("ridge", 1e-8);
  opt.quad.p = c.get_double("p", 2.0);
  if (opt.quad.p < 1.0) c.fail("p", "must be at least 1");
  return [=](Run& run) {
    MixingTable tab = verify_mixing(u, v, dom, ns, opt);
    CsvTable t({"n", "err_u", "err_v", "closed_form", "converged"});
    for (const auto& r : tab.rows)
      t.add({as_int(r.n), r.err_u, r.err_v, r.closed_form, static_cast<long long>(r.converged)});
    run.emit("", t);
    run.summary = {{"fast_path", tab.fast_path},
                   {"expansion_residual", tab.expansion_residual},
                   {"inconclusive", tab.inconclusive},
                   {"monotone", tab.monotone}};
  };
}

Job plan_dirichlet_demo(const Config& c) {
  Domain dom = read_domain(c, "two_disk");
  PowerSeries f = read_series(c, "f", {0.0});
  PowerSeries h = read_series(c, "h", {1.0});
  SetSpec E = read_set(c, "points");
  auto ns = c.get_sizes("n", {16, 32, 64, 128});
  DirichletDemoOptions opt;
  opt.A = arc_set(read_arc(c, "A", {-0.5, 0.5}));
  opt.Gamma = arc_set(read_arc(c, "gamma", {0.9, two_pi - 0.9}));
  opt.expansion.samples = static_cast<std::size_t>(c.get_int("samples", 48));
  opt.ridges = c.get_doubles("ridges", opt.ridges);
  opt.delta = c.get_double("delta", opt.delta);
  return [=](Run& run) {
    DirichletDemo demo = dirichlet_limit_demo(f, h, E.set, dom, ns, opt);
    CsvTable t({"n", "residual", "power_residual", "expansion_residual", "correction_norm", "ridge"});
    for (const auto& r : demo.rows)
      t.add({as_int(r.n), r.residual, r.power_residual, r.expansion_residual, r.correction_norm, r.ridge});
    run.emit("", t);
    json skipped = json::array();
    for (auto n : demo.skipped) skipped.push_back(n);
    run.summary = {{"skipped", skipped}};
  };
}

Job plan_spectrum(const Config& c) {
  Domain dom = read_domain(c, "two_disk");
  auto lambdas = c.get_complexes("lambda", {0.0, 0.5, 1.0 / 1.2, cplx{0.0, 1.0}, 1.5});
  return [=](Run& run) {
    CsvTable t({"re", "im", "in_spectrum"});
    for (cplx l : lambdas) t.add({l.real(), l.imag(), static_cast<long long>(spectrum_membership(dom, l))});
    run.emit("", t);
    run.summary = {{"domain", dom.describe()}};
  };
}

// report: norms of one series under a list of specs, e.g.
// norms = bergman_disk:2, hardy:1, lp:2, bergman:2, sup, bs:1
Job plan_report(const Config& c) {
  auto seed = static_cast<std::uint64_t>(c.get_int("seed", 1));
  long long rdeg = c.get_int("random_degree", 0);
  PowerSeries f = read_series(c, "f", {1.0, 1.0});
  if (rdeg > 0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N(0.0, 1.0);
    std::vector<cplx> co(static_cast<std::size_t>(rdeg) + 1);
    for (auto& x : co) x = {N(rng), N(rng)};
    f = PowerSeries(co);
  }
  std::string list = c.get_string("norms", "bergman_disk:2, hardy:2, hardy:1");
  double tol = c.get_double("tol", 1e-10);
  std::vector<NormSpec> specs;
  for (const auto& tok : detail::split(list, ',')) {
    auto parts = detail::split(tok, ':');
    const std::string& kind = parts[0];
    double arg = 2.0;
    if (parts.size() == 2) {
      try {
        arg = std::stod(parts[1]);
      } catch (const std::exception&) {
        c.fail("norms", "bad parameter in '" + tok + "'");
      }
    } else if (parts.size() > 2) {
      c.fail("norms", "bad norm spec '" + tok + "'");
    }
    if (kind == "bergman_disk") specs.emplace_back(ApDiskNormalized{arg}, tol);
    else if (kind == "bergman") specs.emplace_back(ApOnDomain{read_domain(c, "two_disk"), arg}, tol);
    else if (kind == "hardy") specs.emplace_back(HardyP{arg}, tol);
    else if (kind == "lp") specs.emplace_back(LpCircle{arg}, tol);
    else if (kind == "sup") specs.emplace_back(SupOnSet{read_set(c, "cantor").set}, tol);
    else if (kind == "bs") specs.emplace_back(BsSpace{parts.size() == 2 ? arg : 1.0}, tol);
    else c.fail("norms", "unknown norm '" + kind + "' (bergman_disk, bergman, hardy, lp, sup, bs)");
  }
  return [=](Run& run) {
    CsvTable t({"spec", "value", "est_error", "cells_used"});
    for (const auto& s : specs) {
      NormResult r = norm(f, s);
      t.add({s.describe(), r.value, r.est_error, as_int(r.cells_used)});
    }
    run.emit("norms", t);
    run.emit_json("series", {{"coefficients", to_json(f)}});
    run.summary = {{"degree", f.degree()}};
  };
}

struct Command {
  const char* name;
  const char* help;
  std::function<Job(const Config&)> plan;
};

const std::vector<Command>& commands() {
  static const std::vector<Command> list = {
      {"cantor", "Cantor set arcs and measure/Carleson bookkeeping", plan_cantor},
      {"dirichlet", "Dirichlet residual search or best-approximation records", plan_dirichlet},
      {"peak", "peaking polynomial on a finite boundary set", plan_peak},
      {"approx", "simultaneous norm/uniform approximation over a degree list", plan_approx},
      {"universal", "staged universal-series builder", plan_universal},
      {"menshov", "sign-step demonstration on Cantor-type sets", plan_menshov},
      {"dynamics", "Kitai function iterate and right-inverse norms", plan_dynamics},
      {"mixing", "mixing table for the backward shift", plan_mixing},
      {"dirichlet-demo", "partial sums driven towards a target on a Dirichlet set", plan_dirichlet_demo},
      {"spectrum", "spectrum membership of the backward shift", plan_spectrum},
      {"report", "norm report for one series", plan_report},
  };
  return list;
}

json manifest(const Run& run, double seconds) {
  json cfg = json::object();
  for (const auto& [k, v] : run.cfg.resolved()) cfg[k] = v;
  return {{"command", run.command}, {"version", kVersion},       {"config_source", run.cfg.source()},
          {"config", cfg},          {"outputs", run.files},      {"summary", run.summary},
          {"wall_time_s", seconds}, {"workers", worker_count()}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shiftlab: universal Taylor series and backward-shift experiments"};
  app.set_help_all_flag("--help-all", "list every subcommand");
  std::string config_path, out_dir = ".";
  std::vector<std::string> settings;
  for (const auto& cmd : commands()) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", config_path, "key = value configuration file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("settings", settings, "key=value overrides");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const Command* chosen = nullptr;
  for (const auto& cmd : commands())
    if (app.got_subcommand(cmd.name)) chosen = &cmd;
  if (!chosen) {
    std::cerr << app.help();
    return 2;
  }

  Run run;
  run.command = chosen->name;
  try {
    run.cfg = config_path.empty() ? Config("<command line>") : Config::load(config_path);
    for (const auto& s : settings) {
      auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigError("<command line>", 0, "expected key=value, got '" + s + "'");
      run.cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    const long long workers = run.cfg.get_int("workers", 1);
    if (workers < 1) run.cfg.fail("workers", "must be at least 1");
    worker_count() = static_cast<unsigned>(workers);
    run.cfg.get_int("seed", 1);
    Job job = chosen->plan(run.cfg);
    run.cfg.reject_unknown();

    run.out_dir = out_dir;
    std::filesystem::create_directories(run.out_dir);
    auto t0 = std::chrono::steady_clock::now();
    int status = 0;
    try {
      job(run);
    } catch (const ToleranceFailure& e) {
      std::cerr << "tolerance failure: " << e.what() << " (achieved " << format_number(e.achieved())
                << ", requested " << format_number(e.requested()) << ")\n";
      status = 3;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ofstream mf(run.out_dir / (run.command + "_manifest.json"), std::ios::binary);
    mf << manifest(run, secs).dump(2) << '\n';
    return status;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const ToleranceFailure& e) {
    std::cerr << "tolerance failure: " << e.what() << " (achieved " << format_number(e.achieved()) << ", requested "
              << format_number(e.requested()) << ")\n";
    return 3;
  }
}
