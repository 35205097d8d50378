// Scenario runner: loads a model and profile, runs one pipeline, writes
// CSV/JSON artifacts into --out and prints a one-page summary.
//
// Exit codes: 0 success, 1 invalid configuration, 2 non-degeneracy
// diagnostics failed, 3 certification or containment failure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "imcf/bounds_checker.hpp"
#include "imcf/conic_exhaustion.hpp"
#include "imcf/discrete_variational.hpp"
#include "imcf/io.hpp"
#include "imcf/iso_profile.hpp"
#include "imcf/min_hull.hpp"
#include "imcf/scenario.hpp"
#include "imcf/symmetric_imcf.hpp"

namespace fs = std::filesystem;
using namespace imcf;

namespace {

enum Exit : int { kOk = 0, kInvalid = 1, kNondegeneracy = 2, kFailure = 3 };

/// One pipeline run: exit code, summary lines, headline metrics for the
/// refinement comparison.
struct Outcome {
  int code = kOk;
  std::vector<std::string> lines;
  std::map<std::string, double> metrics;

  template <class... Args>
  void say(fmt::format_string<Args...> f, Args&&... args) {
    lines.push_back(fmt::format(f, std::forward<Args>(args)...));
  }
  void fail(int c) { code = std::max(code, c); }
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

void write_text(const fs::path& path, const std::string& text) { open_output(path) << text; }

void write_json_file(const fs::path& path, const io::json& j) {
  auto out = open_output(path);
  io::write_json(out, j);
}

std::string num(double x) { return io::format_number(x); }

std::vector<double> finite_times_below(const std::vector<double>& times, double t_max) {
  std::vector<double> out;
  for (double t : times) {
    if (t < t_max) out.push_back(t);
  }
  return out;
}

// ------------------------------------------------------------------ solve

Outcome run_solve(const Scenario& s, const fs::path& dir) {
  Outcome o;
  const auto m = build_manifold(s);
  const auto sol = solve(m, s.pipeline.r0, s.solve_options());
  {
    auto csv = open_output(dir / "solution.csv");
    io::write_solution_csv(csv, sol);
  }
  write_json_file(dir / "jumps.json", io::jump_manifest(sol));
  o.say("model {} (n = {}), r0 = {}, spacing {}", m.warp().name(), m.dimension(), num(s.pipeline.r0),
        num(m.spacing()));
  o.say("T_max = {}, proper = {}, jumps = {}", num(sol.T_max()), sol.proper(), sol.jumps().size());
  for (const Jump& j : sol.jumps()) o.say("  jump at t = {}: rho {} -> {}", num(j.t), num(j.rho), num(j.rho_plus));
  double worst = 0.0;
  for (double t : finite_times_below(s.pipeline.times, sol.T_max())) {
    try {
      const double e = area_law_check(sol, t);
      worst = std::max(worst, e);
      o.metrics["rho(" + num(t) + ")"] = sol.sublevel(t).rho;
    } catch (const RepresentationExhausted&) {
      o.say("  t = {} leaves the represented range", num(t));
    }
  }
  o.say("area law |dE_t| = e^t |dE_0+|: worst relative error {:.3e}", worst);
  o.metrics["area_law_error"] = worst;
  o.metrics["T_max"] = sol.T_max();
  o.say("wrote solution.csv, jumps.json");
  return o;
}

// ---------------------------------------------------------------- profile

std::vector<double> profile_volumes(const IsoProfile& p, const WarpedManifold& m) {
  if (p.form() == ProfileForm::tabulated) return {p.volumes().begin(), p.volumes().end()};
  std::vector<double> v;
  const double top = m.ball_volume(m.r_max());
  for (double x = 1e-3; x < top; x *= 1.5) v.push_back(x);
  v.push_back(top);
  return v;
}

Outcome run_profile(const Scenario& s, const fs::path& dir) {
  Outcome o;
  const auto m = build_manifold(s);
  const auto p = build_profile(s, m);
  const double A = area_bound(s, m);
  const StrongProfile sp(p, s.tolerances.tail_fraction);
  {
    auto csv = open_output(dir / "profile.csv");
    csv << "v,Ip,Isp\n";
    for (double v : profile_volumes(p, m)) csv << num(v) << ',' << num(p(v)) << ',' << num(sp(v)) << '\n';
  }
  const auto d = check_nondegeneracy(p, A, s.tolerances.tail_fraction);
  const auto g = superlinear_growth_check(m);
  io::json j{{"kind", s.profile.kind},
             {"upper_bound_only", p.upper_bound_only()},
             {"A", io::number(A)},
             {"liminf_surrogate", io::number(d.liminf_surrogate)},
             {"exceeds_A", d.exceeds_A},
             {"head_integral_finite", d.head_integral_finite},
             {"head_integral", io::number(d.head_integral_value)},
             {"passes", d.passes()},
             {"growth",
              {{"r_lo", io::number(g.r_lo)},
               {"r_hi", io::number(g.r_hi)},
               {"fitted_exponent", io::number(g.fitted_exponent)},
               {"superlinear", g.superlinear},
               {"liminf_ip_bound", io::number(g.liminf_ip_bound)}}}};
  if (d.head_integral_finite) {
    try {
      j["ball_volume_lower_bound"] = io::number(ball_volume_lower_bound(p));
    } catch (const Error& e) {
      j["ball_volume_lower_bound"] = e.what();
    }
  }
  write_json_file(dir / "diagnostics.json", j);
  o.say("profile {} on model {}{}", s.profile.kind, m.warp().name(),
        p.upper_bound_only() ? " (upper bound only)" : "");
  o.say("liminf Ip surrogate {} vs A = {}: {}", num(d.liminf_surrogate), num(A), d.exceeds_A ? "exceeds" : "FAILS");
  o.say("head integral of dv/Ip: {}", d.head_integral_finite ? num(d.head_integral_value) : "diverges");
  o.say("volume growth exponent {:.4f} ({})", g.fitted_exponent, g.superlinear ? "superlinear" : "linear");
  o.metrics["liminf_surrogate"] = d.liminf_surrogate;
  if (!d.passes()) {
    o.say("non-degeneracy diagnostics failed");
    o.fail(kNondegeneracy);
  }
  o.say("wrote profile.csv, diagnostics.json");
  return o;
}

// ------------------------------------------------------------------- hull

Outcome run_hull(const Scenario& s, const fs::path& dir) {
  Outcome o;
  const auto m = build_manifold(s);
  const auto p = build_profile(s, m);
  const double A = area_bound(s, m);
  const double r0 = s.pipeline.r0;
  const auto c = CellComplex::radial(m, radial_nodes(s.grid.lo, s.hi(), s.cells(), std::vector<double>{r0}));
  const auto omega = c.ball(r0);
  write_json_file(dir / "complex.json", io::to_json(c));
  io::json j{{"A", io::number(A)}, {"omega", io::to_json(c, omega)}};
  o.say("model {}, omega = B({}), {} radial cells on [{}, {}]", m.warp().name(), num(r0), c.size(),
        num(s.grid.lo), num(s.hi()));
  try {
    const double rho = symmetric_hull(m, r0);
    j["symmetric_hull"] = io::number(rho);
    o.say("symmetric hull radius {}", num(rho));
    o.metrics["symmetric_hull"] = rho;
  } catch (const NoPrecompactHull& e) {
    j["symmetric_hull"] = nullptr;
    j["note"] = e.what();
    o.say("symmetric hull: {}", e.what());
    o.fail(kNondegeneracy);
  }
  try {
    const auto h = minimizing_hull(c, omega, p, A, r0);
    double reach = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (h.hull[i]) reach = std::max(reach, c.outer_radius()[i]);
    }
    j["R"] = io::number(h.R);
    j["hull"] = io::to_json(c, h.hull);
    j["hull_radius"] = io::number(reach);
    o.say("discrete hull radius {} inside barrier R = {}", num(reach), num(h.R));
    o.metrics["hull_radius"] = reach;
  } catch (const ContainmentViolated& e) {
    j["error"] = e.what();
    o.say("containment: {}", e.what());
    o.fail(kFailure);
  } catch (const NonDegeneracyExceeded& e) {
    j["error"] = e.what();
    o.say("non-degeneracy: {}", e.what());
    o.fail(kNondegeneracy);
  } catch (const IntegralDiverges& e) {
    j["error"] = e.what();
    o.say("non-degeneracy: {}", e.what());
    o.fail(kNondegeneracy);
  }
  write_json_file(dir / "hull.json", j);
  o.say("wrote complex.json, hull.json");
  return o;
}

// ----------------------------------------------------------------- bounds

Outcome run_bounds(const Scenario& s, const fs::path& dir) {
  Outcome o;
  const auto m = build_manifold(s);
  const auto p = build_profile(s, m);
  const auto sol = solve(m, s.pipeline.r0, s.solve_options());
  const double a0 = m.sphere_area(s.pipeline.r0);
  // Without an explicit A the horizon is limited only by the profile.
  const double A = s.pipeline.A > 0.0 ? s.pipeline.A : kInfinity;
  const auto reps = verify_containment(sol, p, a0, s.pipeline.times, A);
  {
    auto csv = open_output(dir / "bounds.csv");
    io::write_bound_csv(csv, reps);
  }
  write_json_file(dir / "bounds_summary.json", io::bound_summary(reps));
  o.say("model {}, profile {}, a0 = {}, A = {}", m.warp().name(), s.profile.kind, num(a0), num(A));
  o.say("{:>8} {:>14} {:>14} {:>14} {:>9}", "t", "rho_t", "R1", "R_main", "contained");
  for (const auto& r : reps) {
    o.say("{:>8} {:>14.6g} {:>14.6g} {:>14.6g} {:>9}", num(r.t), r.rho_t, r.R1, r.R_main,
          r.hypotheses_ok ? (r.contained ? "yes" : "NO") : "n/a");
    if (!r.note.empty()) o.say("         note: {}", r.note);
    if (!r.hypotheses_ok) {
      o.fail(kNondegeneracy);
    } else if (!r.contained) {
      o.fail(kFailure);
    }
    o.metrics["R1(" + num(r.t) + ")"] = r.R1;
  }
  o.say("wrote bounds.csv, bounds_summary.json");
  return o;
}

// ---------------------------------------------------------------- certify

Outcome run_certify(const Scenario& s, const fs::path& dir) {
  Outcome o;
  const auto m = build_manifold(s);
  const auto sol = solve(m, s.pipeline.r0, s.solve_options());
  auto windows = s.pipeline.windows;
  if (windows.empty()) windows.emplace_back(s.pipeline.r0 + 0.1, std::min(s.hi(), s.pipeline.r0 + 4.0));
  double top = 0.0;
  for (const auto& w : windows) top = std::max(top, w.second);
  top = std::min(top + 0.5, m.r_max());
  const auto cells = static_cast<std::size_t>(std::ceil(top / s.tolerances.cert_spacing));
  auto d = discretize_solution(sol, radial_nodes(0.0, top, cells, std::vector<double>{s.pipeline.r0}));
  const auto radii = d.complex.radii();
  if (s.pipeline.perturb > 0.0) {
    // Seeded noise on the node values inside the first window.
    std::mt19937_64 rng(s.seed);
    std::uniform_real_distribution<double> noise(0.0, s.pipeline.perturb);
    std::vector<double> nodes(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
      nodes[i] = radii[i] >= s.pipeline.r0 ? sol.u(radii[i]) : -1.0;
      if (radii[i] > windows.front().first && radii[i] < windows.front().second) nodes[i] += noise(rng);
    }
    auto density = radial_density(radii, nodes);
    for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
      if (radii[i] < s.pipeline.r0) density[i] = 0.0;
      d.u[i] = radii[i + 1] <= s.pipeline.r0 ? -1.0 : nodes[i + 1];
    }
    d.complex = d.complex.with_density(std::move(density));
    o.say("perturbed u by seeded noise of amplitude {} (seed {})", num(s.pipeline.perturb), s.seed);
  }
  io::json out{{"cells", d.complex.size()}, {"spacing", io::number(s.tolerances.cert_spacing)}};
  io::json per_window = io::json::array();
  bool pass = true;
  double worst = 0.0;
  const auto times = finite_times_below(s.pipeline.times, sol.T_max());
  o.say("model {}, {} cells of width {} on [0, {}]", m.warp().name(), d.complex.size(),
        num(s.tolerances.cert_spacing), num(top));
  for (const auto& [lo, hi] : windows) {
    const auto rep = certify_weak_solution(d.complex, d.u, times, d.complex.window(lo, hi), s.tolerances.certification);
    per_window.push_back({{"lo", io::number(lo)}, {"hi", io::number(hi)}, {"report", io::to_json(rep)}});
    pass = pass && rep.pass;
    worst = std::max(worst, rep.worst_violation);
    o.say("window [{}, {}]: worst violation {:.3e} -> {}", num(lo), num(hi), rep.worst_violation,
          rep.pass ? "pass" : "FAIL");
  }
  out["windows"] = std::move(per_window);
  out["pass"] = pass;
  write_json_file(dir / "certification.json", out);
  o.metrics["worst_violation"] = worst;
  if (!pass) o.fail(kFailure);
  o.say("wrote certification.json");
  return o;
}

// ---------------------------------------------------------------- exhaust

Outcome run_exhaust(const Scenario& s, const fs::path& dir) {
  Outcome o;
  const auto m = build_manifold(s);
  const auto p = build_profile(s, m);
  const double A = area_bound(s, m);
  const auto opt = s.stabilization_options();
  const auto rep = stabilization_check(m, s.pipeline.r0, p, A, s.pipeline.k_list, opt);
  write_json_file(dir / "stabilization.json", io::to_json(rep));
  o.say("model {}, profile {}, A = {} (a0 = {})", m.warp().name(), s.profile.kind, num(A), num(rep.a0));
  if (!rep.hypotheses_ok) {
    o.say("hypotheses failed: {}", rep.note);
    o.fail(kNondegeneracy);
    return o;
  }
  o.say("T~ = {}, R2(T~) = {}, k1 = {}", num(rep.T_tilde), num(rep.R2), rep.k1_found ? num(rep.k1) : "none in list");
  o.say("{:>8} {:>8} {:>12} {:>9} {:>8} {:>12}", "k", "C", "T_k", "above k1", "T_k>=T~", "diff prev");
  for (const auto& e : rep.entries) {
    o.say("{:>8} {:>8} {:>12.6g} {:>9} {:>8} {:>12.3e}", num(e.k), num(e.C), e.T_k, e.above_k1 ? "yes" : "no",
          e.reaches_T_tilde ? "yes" : "no", e.sup_diff_prev);
    const auto cm = build_cone(m, e.k, opt.cone);
    auto csv = open_output(dir / ("solution_k" + num(e.k) + ".csv"));
    io::write_solution_csv(csv, solve_on_cone(cm, s.pipeline.r0, opt.solve));
    o.metrics["T_k(" + num(e.k) + ")"] = e.T_k;
  }
  if (!rep.k1_found) {
    o.say("no k in the list exceeds R2(T~); stabilization not tested");
  } else {
    o.say("all T_k >= T~ above k1: {}; agreement: {} (worst {:.3e}); certified: {} ({:.3e})", rep.all_reach,
          rep.agreement, rep.worst_disagreement, rep.certified, rep.certification_violation);
    o.say("stabilization {}", rep.pass ? "holds" : "FAILS");
    if (!rep.pass) o.fail(kFailure);
    if (!rep.note.empty()) o.say("note: {}", rep.note);
  }
  o.say("wrote stabilization.json and {} per-k solution CSVs", rep.entries.size());
  return o;
}

// ------------------------------------------------------------------ limit

Outcome run_limit(const Scenario& s, const fs::path& dir) {
  Outcome o;
  const auto m = build_manifold(s);
  const auto p = build_profile(s, m);
  const auto res = limit_solution(m, s.pipeline.r0, p, s.pipeline.l_list, s.pipeline.k_list,
                                  s.stabilization_options());
  {
    auto csv = open_output(dir / "limit.csv");
    io::write_solution_csv(csv, res.radii, res.values);
  }
  write_json_file(dir / "limit.json", io::to_json(res));
  o.say("model {}, levels up to l = {}, {} nodes", m.warp().name(), num(res.max_level), res.radii.size());
  o.say("pairwise agreement {:.3e} ({}); against direct solve {:.3e} ({})", res.worst_pair_diff,
        res.consistent ? "ok" : "FAIL", res.diff_vs_direct, res.matches_direct ? "ok" : "FAIL");
  o.metrics["diff_vs_direct"] = res.diff_vs_direct;
  if (!res.pass) o.fail(kFailure);
  o.say("wrote limit.csv, limit.json");
  return o;
}

using Pipeline = std::function<Outcome(const Scenario&, const fs::path&)>;

int classify(const Error& e) {
  if (dynamic_cast<const NonDegeneracyExceeded*>(&e) || dynamic_cast<const IntegralDiverges*>(&e) ||
      dynamic_cast<const NoPrecompactHull*>(&e)) {
    return kNondegeneracy;
  }
  if (dynamic_cast<const ContainmentViolated*>(&e)) return kFailure;
  return kInvalid;
}

/// Runs a pipeline, turning library errors into an exit code.
Outcome guarded(const Pipeline& run, const Scenario& s, const fs::path& dir) {
  try {
    fs::create_directories(dir);
    write_json_file(dir / "scenario.json", to_json(s));
    return run(s, dir);
  } catch (const Error& e) {
    Outcome o;
    o.say("error: {}", e.what());
    o.fail(classify(e));
    return o;
  } catch (const fs::filesystem_error& e) {
    Outcome o;
    o.say("error: {}", e.what());
    o.fail(kInvalid);
    return o;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak inverse mean curvature flow on warped products: scenario runner"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir = "imcf_out", model, profile_spec;
  std::uint64_t seed = 0;
  int refine = 0, n = 3;
  double r0 = 1.0, r_max = 20.0, spacing = 0.01, area = 0.0;
  std::vector<double> times, k_list, l_list;
  std::size_t cells = 0;
  double perturb = 0.0;

  auto* o_config = app.add_option("--config", config_path, "Scenario JSON document");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  auto* o_seed = app.add_option("--seed", seed, "Seed for randomized steps");
  app.add_flag("--refine", refine, "Rerun on a doubled grid and compare (repeatable)");
  auto* o_model = app.add_option("--model", model, "Named model");
  auto* o_n = app.add_option("--n", n, "Dimension");
  auto* o_r0 = app.add_option("--r0", r0, "Initial radius");
  auto* o_rmax = app.add_option("--r-max", r_max, "Outer radius of the representation");
  auto* o_spacing = app.add_option("--spacing", spacing, "Radial grid spacing");
  auto* o_profile = app.add_option("--profile", profile_spec, "power:c=..,a=.. | piecewise:.. | tabulated:PATH | sharp | candidate");
  auto* o_times = app.add_option("--times", times, "Comma-separated times")->delimiter(',');
  auto* o_klist = app.add_option("--klist", k_list, "Comma-separated cutoff radii")->delimiter(',');
  auto* o_llist = app.add_option("--llist", l_list, "Comma-separated levels l (A = e^l a0)")->delimiter(',');
  auto* o_area = app.add_option("--A", area, "Area bound A");
  auto* o_cells = app.add_option("--cells", cells, "Radial cells for discrete steps");
  auto* o_perturb = app.add_option("--perturb", perturb, "Noise amplitude for the certification negative control");

  const std::map<std::string, std::pair<std::string, Pipeline>> pipelines{
      {"solve", {"Exact symmetric weak solution, solution CSV and jump manifest", run_solve}},
      {"profile", {"Isoperimetric profile tabulation and non-degeneracy diagnostics", run_profile}},
      {"hull", {"Strictly outward minimizing hull of B(r0)", run_hull}},
      {"bounds", {"Diameter bounds against sublevel radii", run_bounds}},
      {"certify", {"Discrete weak-solution certification on windows", run_certify}},
      {"exhaust", {"Conic exhaustion and stabilization report", run_exhaust}},
      {"limit", {"Exhaustion limit against the direct solution", run_limit}},
  };
  for (const auto& [name, entry] : pipelines) app.add_subcommand(name, entry.first);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  Scenario s;
  try {
    io::json doc = io::json::object();
    if (o_config->count() > 0) {
      auto in = io::open_input(config_path);
      try {
        doc = io::json::parse(in);
      } catch (const io::json::exception& e) {
        throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
      }
    }
    s = parse_scenario(doc);
    if (o_model->count() > 0) s.manifold.model = model;
    if (o_n->count() > 0) s.manifold.n = n;
    if (o_rmax->count() > 0) s.manifold.r_max = r_max;
    if (o_spacing->count() > 0) s.manifold.spacing = spacing;
    if (o_r0->count() > 0) s.pipeline.r0 = r0;
    if (o_profile->count() > 0) apply_profile_spec(profile_spec, s.profile);
    if (o_times->count() > 0) s.pipeline.times = times;
    if (o_klist->count() > 0) s.pipeline.k_list = k_list;
    if (o_llist->count() > 0) s.pipeline.l_list = l_list;
    if (o_area->count() > 0) s.pipeline.A = area;
    if (o_cells->count() > 0) s.grid.cells = cells;
    if (o_perturb->count() > 0) s.pipeline.perturb = perturb;
    if (o_seed->count() > 0) s.seed = seed;
    validate(s);
  } catch (const Error& e) {
    fmt::print(stderr, "invalid configuration: {}\n", e.what());
    return kInvalid;
  }

  const auto& run = pipelines.at(command).second;
  const fs::path dir(out_dir);
  Outcome base = guarded(run, s, dir);
  std::vector<std::string> page{fmt::format("imcf {}  (seed {})", command, s.seed)};
  page.insert(page.end(), base.lines.begin(), base.lines.end());
  int code = base.code;

  Scenario fine = s;
  for (int level = 1; level <= refine; ++level) {
    fine.grid.refine += 1;
    const fs::path sub = dir / fmt::format("refine{}", level);
    Outcome r = guarded(run, fine, sub);
    code = std::max(code, r.code);
    page.push_back(fmt::format("refinement {} (spacing {}): exit {}", level, num(fine.spacing()), r.code));
    for (const auto& [key, value] : base.metrics) {
      const auto it = r.metrics.find(key);
      if (it == r.metrics.end()) continue;
      const double change = it->second - value;
      page.push_back(fmt::format("  {:<24} {:>16.10g} -> {:>16.10g}  (change {})", key, value, it->second,
                                 std::isfinite(change) ? fmt::format("{:.3e}", change) : "n/a"));
    }
  }
  page.push_back(fmt::format("exit {}", code));

  std::string text;
  for (const auto& line : page) text += line + '\n';
  // The output path goes to stdout only, so artifacts do not depend on it.
  fmt::print("{}output in {}\n", text, out_dir);
  try {
    fs::create_directories(dir);
    write_text(dir / "summary.txt", text);
  } catch (const std::exception& e) {
    fmt::print(stderr, "cannot write summary: {}\n", e.what());
    return std::max(code, static_cast<int>(kInvalid));
  }
  return code;
}
