#pragma once

// Scenario documents: a JSON object with sections manifold, profile, grid,
// pipeline, tolerances and seed. Unknown keys are rejected so that typos
// never fall back to defaults silently.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "imcf/conic_exhaustion.hpp"
#include "imcf/error.hpp"
#include "imcf/io.hpp"
#include "imcf/iso_profile.hpp"
#include "imcf/models.hpp"
#include "imcf/warped_geometry.hpp"

namespace imcf {

struct ManifoldConfig {
  std::string model = "euclidean";
  std::string warp_csv;  ///< sampled warp; overrides `model` when set
  int n = 3;
  double r_max = 20.0;
  double spacing = 0.01;
};

/// kind: power, piecewise, tabulated (from csv), sharp (Euclidean constant
/// for dimension n) or candidate (upper bound from annuli on `span`).
struct ProfileConfig {
  std::string kind = "candidate";
  double c = 1.0;
  double alpha = 0.0;
  PowerLaw small;
  PowerLaw large;
  double v_switch = 1.0;
  std::string csv;
  std::vector<double> span;  ///< empty: default_candidate_span(r_max)
};

struct GridConfig {
  std::size_t cells = 1000;  ///< radial cells for hull and discrete checks
  double lo = 0.0;
  double hi = -1.0;  ///< <= 0 means r_max
  int refine = 0;    ///< grid doublings applied before running
};

struct PipelineConfig {
  double r0 = 1.0;
  std::vector<double> times{0.0, 0.5, 1.0, 1.5, 2.0};
  std::vector<double> k_list{4.0, 8.0, 16.0};
  std::vector<double> l_list{1.0, 2.0};
  double A = -1.0;  ///< <= 0 means area_factor * |dB(r0)|
  double area_factor = std::numbers::e;
  std::vector<std::pair<double, double>> windows;  ///< empty: one window [r0 + 0.1, hi]
  double perturb = 0.0;  ///< seeded noise amplitude added to u before certification
};

struct ToleranceConfig {
  double certification = 1e-6;
  double agreement = 1e-8;
  double tail_fraction = kDefaultTailFraction;
  double growth_threshold = 1e-3;
  double cone_delta = 0.125;
  double cone_cap = 1e6;
  double cert_spacing = 5e-4;
};

struct Scenario {
  ManifoldConfig manifold;
  ProfileConfig profile;
  GridConfig grid;
  PipelineConfig pipeline;
  ToleranceConfig tolerances;
  std::uint64_t seed = 0;

  double spacing() const { return manifold.spacing / std::ldexp(1.0, grid.refine); }
  std::size_t cells() const { return grid.cells << grid.refine; }
  double hi() const { return grid.hi > 0.0 ? grid.hi : manifold.r_max; }

  SolveOptions solve_options() const { return {tolerances.tail_fraction, tolerances.growth_threshold}; }

  StabilizationOptions stabilization_options() const {
    StabilizationOptions o;
    o.cone.delta = tolerances.cone_delta;
    o.cone.C_cap = tolerances.cone_cap;
    o.solve = solve_options();
    o.agreement_tol = tolerances.agreement;
    o.cert_spacing = tolerances.cert_spacing;
    o.cert_tol = tolerances.certification;
    return o;
  }
};

namespace detail {

inline void reject_unknown(const io::json& obj, const std::string& section, std::set<std::string> known) {
  if (!obj.is_object()) throw ConfigError("section '" + section + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) throw ConfigError("unknown key '" + section + "." + key + "'");
  }
}

template <class T>
void read(const io::json& obj, const std::string& key, T& out) {
  if (!obj.contains(key)) return;
  try {
    if constexpr (std::is_same_v<T, double>) {
      out = io::number_from(obj.at(key));
    } else {
      out = obj.at(key).get<T>();
    }
  } catch (const io::json::exception& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

inline void read_list(const io::json& obj, const std::string& key, std::vector<double>& out) {
  if (!obj.contains(key)) return;
  const auto& a = obj.at(key);
  if (!a.is_array()) throw ConfigError("key '" + key + "' must be an array");
  out.clear();
  for (const auto& x : a) out.push_back(io::number_from(x));
}

inline PowerLaw read_law(const io::json& obj, const std::string& key) {
  if (!obj.contains(key)) throw ConfigError("piecewise profile needs '" + key + "'");
  const auto& law = obj.at(key);
  reject_unknown(law, "profile." + key, {"c", "alpha"});
  PowerLaw p;
  read(law, "c", p.c);
  read(law, "alpha", p.alpha);
  return p;
}

}  // namespace detail

/// Checks ranges and cross-field consistency; throws ConfigError.
inline void validate(const Scenario& s) {
  const auto& m = s.manifold;
  if (m.warp_csv.empty()) {
    const auto& names = models::model_names();
    if (std::find(names.begin(), names.end(), m.model) == names.end()) {
      throw ConfigError("unknown model '" + m.model + "'");
    }
  }
  if (m.n < 2 || m.n > 12) throw ConfigError("manifold.n must lie in [2, 12]");
  if (!(m.r_max > 0.0)) throw ConfigError("manifold.r_max must be positive");
  if (!(m.spacing > 0.0 && m.spacing < m.r_max)) throw ConfigError("manifold.spacing must lie in (0, r_max)");
  static const std::set<std::string> kinds{"power", "piecewise", "tabulated", "sharp", "candidate"};
  if (!kinds.contains(s.profile.kind)) throw ConfigError("unknown profile kind '" + s.profile.kind + "'");
  if (s.profile.kind == "tabulated" && s.profile.csv.empty()) throw ConfigError("tabulated profile needs csv");
  if (s.grid.cells == 0) throw ConfigError("grid.cells must be positive");
  if (s.grid.refine < 0 || s.grid.refine > 6) throw ConfigError("grid.refine must lie in [0, 6]");
  if (!(s.hi() > s.grid.lo && s.hi() <= m.r_max)) throw ConfigError("grid range must satisfy lo < hi <= r_max");
  const auto& p = s.pipeline;
  if (!(p.r0 > 0.0 && p.r0 < m.r_max)) throw ConfigError("pipeline.r0 must lie in (0, r_max)");
  for (double t : p.times) {
    if (!std::isfinite(t) || t < 0.0) throw ConfigError("pipeline.times must be finite and nonnegative");
  }
  for (double k : p.k_list) {
    if (!(k > p.r0)) throw ConfigError("pipeline.k_list entries must exceed r0");
  }
  for (double l : p.l_list) {
    if (!(l > 0.0)) throw ConfigError("pipeline.l_list entries must be positive");
  }
  if (!(p.area_factor > 0.0)) throw ConfigError("pipeline.area_factor must be positive");
  for (const auto& [lo, hi] : p.windows) {
    if (!(hi > lo && lo >= 0.0)) throw ConfigError("pipeline.windows entries must satisfy 0 <= lo < hi");
  }
  if (!(p.perturb >= 0.0)) throw ConfigError("pipeline.perturb must be nonnegative");
  const auto& t = s.tolerances;
  for (double x : {t.certification, t.agreement, t.tail_fraction, t.cone_delta, t.cone_cap, t.cert_spacing}) {
    if (!(x > 0.0)) throw ConfigError("tolerances must be positive");
  }
  if (t.tail_fraction >= 1.0) throw ConfigError("tolerances.tail_fraction must be below 1");
  if (t.cone_delta > 0.125) throw ConfigError("tolerances.cone_delta must not exceed 1/8");
}

inline Scenario parse_scenario(const io::json& doc) {
  using detail::read;
  using detail::read_list;
  Scenario s;
  detail::reject_unknown(doc, "document", {"manifold", "profile", "grid", "pipeline", "tolerances", "seed"});
  if (doc.contains("manifold")) {
    const auto& j = doc.at("manifold");
    detail::reject_unknown(j, "manifold", {"model", "warp_csv", "n", "r_max", "spacing"});
    read(j, "model", s.manifold.model);
    read(j, "warp_csv", s.manifold.warp_csv);
    read(j, "n", s.manifold.n);
    read(j, "r_max", s.manifold.r_max);
    read(j, "spacing", s.manifold.spacing);
  }
  if (doc.contains("profile")) {
    const auto& j = doc.at("profile");
    detail::reject_unknown(j, "profile", {"kind", "c", "alpha", "small", "large", "v_switch", "csv", "span"});
    read(j, "kind", s.profile.kind);
    read(j, "c", s.profile.c);
    read(j, "alpha", s.profile.alpha);
    if (s.profile.kind == "piecewise") {
      s.profile.small = detail::read_law(j, "small");
      s.profile.large = detail::read_law(j, "large");
    }
    read(j, "v_switch", s.profile.v_switch);
    read(j, "csv", s.profile.csv);
    read_list(j, "span", s.profile.span);
  }
  if (doc.contains("grid")) {
    const auto& j = doc.at("grid");
    detail::reject_unknown(j, "grid", {"cells", "lo", "hi", "refine"});
    read(j, "cells", s.grid.cells);
    read(j, "lo", s.grid.lo);
    read(j, "hi", s.grid.hi);
    read(j, "refine", s.grid.refine);
  }
  if (doc.contains("pipeline")) {
    const auto& j = doc.at("pipeline");
    detail::reject_unknown(j, "pipeline",
                           {"r0", "times", "k_list", "l_list", "A", "area_factor", "windows", "perturb"});
    read(j, "r0", s.pipeline.r0);
    read_list(j, "times", s.pipeline.times);
    read_list(j, "k_list", s.pipeline.k_list);
    read_list(j, "l_list", s.pipeline.l_list);
    read(j, "A", s.pipeline.A);
    read(j, "area_factor", s.pipeline.area_factor);
    read(j, "perturb", s.pipeline.perturb);
    if (j.contains("windows")) {
      s.pipeline.windows.clear();
      for (const auto& w : j.at("windows")) {
        if (!w.is_array() || w.size() != 2) throw ConfigError("pipeline.windows entries must be [lo, hi]");
        s.pipeline.windows.emplace_back(io::number_from(w[0]), io::number_from(w[1]));
      }
    }
  }
  if (doc.contains("tolerances")) {
    const auto& j = doc.at("tolerances");
    detail::reject_unknown(j, "tolerances",
                           {"certification", "agreement", "tail_fraction", "growth_threshold", "cone_delta",
                            "cone_cap", "cert_spacing"});
    read(j, "certification", s.tolerances.certification);
    read(j, "agreement", s.tolerances.agreement);
    read(j, "tail_fraction", s.tolerances.tail_fraction);
    read(j, "growth_threshold", s.tolerances.growth_threshold);
    read(j, "cone_delta", s.tolerances.cone_delta);
    read(j, "cone_cap", s.tolerances.cone_cap);
    read(j, "cert_spacing", s.tolerances.cert_spacing);
  }
  read(doc, "seed", s.seed);
  validate(s);
  return s;
}

inline Scenario parse_scenario(std::istream& in) {
  io::json doc;
  try {
    doc = io::json::parse(in);
  } catch (const io::json::exception& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

/// Full document with every default filled in.
inline io::json to_json(const Scenario& s) {
  using io::number;
  auto list = [](const std::vector<double>& xs) {
    io::json a = io::json::array();
    for (double x : xs) a.push_back(number(x));
    return a;
  };
  io::json windows = io::json::array();
  for (const auto& [lo, hi] : s.pipeline.windows) windows.push_back({number(lo), number(hi)});
  io::json profile{{"kind", s.profile.kind}};
  if (s.profile.kind == "power") {
    profile["c"] = number(s.profile.c);
    profile["alpha"] = number(s.profile.alpha);
  } else if (s.profile.kind == "piecewise") {
    profile["small"] = {{"c", number(s.profile.small.c)}, {"alpha", number(s.profile.small.alpha)}};
    profile["large"] = {{"c", number(s.profile.large.c)}, {"alpha", number(s.profile.large.alpha)}};
    profile["v_switch"] = number(s.profile.v_switch);
  } else if (s.profile.kind == "tabulated") {
    profile["csv"] = s.profile.csv;
  } else if (s.profile.kind == "candidate") {
    profile["span"] = list(s.profile.span);
  }
  return {{"manifold",
           {{"model", s.manifold.model},
            {"warp_csv", s.manifold.warp_csv},
            {"n", s.manifold.n},
            {"r_max", number(s.manifold.r_max)},
            {"spacing", number(s.manifold.spacing)}}},
          {"profile", std::move(profile)},
          {"grid", {{"cells", s.grid.cells}, {"lo", number(s.grid.lo)}, {"hi", number(s.grid.hi)}, {"refine", s.grid.refine}}},
          {"pipeline",
           {{"r0", number(s.pipeline.r0)},
            {"times", list(s.pipeline.times)},
            {"k_list", list(s.pipeline.k_list)},
            {"l_list", list(s.pipeline.l_list)},
            {"A", number(s.pipeline.A)},
            {"area_factor", number(s.pipeline.area_factor)},
            {"windows", std::move(windows)},
            {"perturb", number(s.pipeline.perturb)}}},
          {"tolerances",
           {{"certification", number(s.tolerances.certification)},
            {"agreement", number(s.tolerances.agreement)},
            {"tail_fraction", number(s.tolerances.tail_fraction)},
            {"growth_threshold", number(s.tolerances.growth_threshold)},
            {"cone_delta", number(s.tolerances.cone_delta)},
            {"cone_cap", number(s.tolerances.cone_cap)},
            {"cert_spacing", number(s.tolerances.cert_spacing)}}},
          {"seed", s.seed}};
}

/// Parses "power:c=..,a=..", "piecewise:c1=..,a1=..,c2=..,a2=..,v=..",
/// "tabulated:<path>", "sharp" or "candidate" into `out`.
inline void apply_profile_spec(const std::string& spec, ProfileConfig& out) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "tabulated") {
    if (rest.empty()) throw ConfigError("profile spec 'tabulated' needs a path");
    out.kind = kind;
    out.csv = rest;
    return;
  }
  std::map<std::string, double> kv;
  std::size_t pos = 0;
  while (pos < rest.size()) {
    const auto comma = std::min(rest.find(',', pos), rest.size());
    const std::string item = rest.substr(pos, comma - pos);
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("profile spec: expected key=value, got '" + item + "'");
    kv[item.substr(0, eq)] = io::parse_number(item.substr(eq + 1));
    pos = comma + 1;
  }
  auto take = [&](const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("profile spec '" + kind + "' needs " + key);
    const double v = it->second;
    kv.erase(it);
    return v;
  };
  if (kind == "power") {
    out.c = take("c");
    out.alpha = take("a");
  } else if (kind == "piecewise") {
    out.small = {take("c1"), take("a1")};
    out.large = {take("c2"), take("a2")};
    out.v_switch = take("v");
  } else if (kind != "sharp" && kind != "candidate") {
    throw ConfigError("unknown profile spec '" + kind + "'");
  }
  if (!kv.empty()) throw ConfigError("profile spec: unexpected key '" + kv.begin()->first + "'");
  out.kind = kind;
}

inline WarpedManifold build_manifold(const Scenario& s) {
  const auto& m = s.manifold;
  Warp w = m.warp_csv.empty() ? models::named_warp(m.model) : io::load_warp_csv(m.warp_csv);
  return WarpedManifold(m.n, std::move(w), m.r_max, s.spacing());
}

/// Node radii for the candidate profile: a fixed head, then ratio 1.25 out
/// to r_max.
inline std::vector<double> default_candidate_span(double r_max) {
  std::vector<double> span;
  for (double r : {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.5, 8.0, 10.0, 13.0, 16.0}) {
    if (r < r_max) span.push_back(r);
  }
  for (double r = 20.0; r < r_max; r *= 1.25) span.push_back(r);
  span.push_back(r_max);
  return span;
}

/// Sharp Euclidean constant n |B^n|^{1/n}, so Ip(v) = c v^{(n-1)/n}.
inline double sharp_constant(int n) {
  const double ball = unit_sphere_area(n) / n;
  return n * std::pow(ball, 1.0 / n);
}

inline IsoProfile build_profile(const Scenario& s, const WarpedManifold& m) {
  const auto& p = s.profile;
  if (p.kind == "power") return IsoProfile::power(p.c, p.alpha);
  if (p.kind == "piecewise") return IsoProfile::piecewise_power(p.small, p.large, p.v_switch);
  if (p.kind == "tabulated") return io::load_profile_csv(p.csv);
  const int n = s.manifold.n;
  if (p.kind == "sharp") return IsoProfile::power(sharp_constant(n), (n - 1.0) / n);
  const auto span = p.span.empty() ? default_candidate_span(m.r_max()) : p.span;
  return symmetric_candidate_profile(m, span);
}

/// The area bound A: explicit, or area_factor times |dB(r0)|.
inline double area_bound(const Scenario& s, const WarpedManifold& m) {
  return s.pipeline.A > 0.0 ? s.pipeline.A : s.pipeline.area_factor * m.sphere_area(s.pipeline.r0);
}

}  // namespace imcf
