#pragma once

// Artifact formats: two-column CSV inputs, JSON complexes and regions,
// solution CSVs with jump manifests, bound and stabilization reports.
// Requires nlohmann/json on the include path.

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "imcf/bounds_checker.hpp"
#include "imcf/cell_complex.hpp"
#include "imcf/conic_exhaustion.hpp"
#include "imcf/discrete_variational.hpp"
#include "imcf/error.hpp"
#include "imcf/iso_profile.hpp"
#include "imcf/symmetric_imcf.hpp"
#include "imcf/warped_geometry.hpp"

namespace imcf::io {

using json = nlohmann::ordered_json;

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" otherwise.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0.0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

/// JSON number, or the string form for non-finite values (JSON has none).
inline json number(double x) { return std::isfinite(x) ? json(x) : json(format_number(x)); }

inline double parse_number(const std::string& text) {
  if (text == "inf" || text == "+inf") return kInfinity;
  if (text == "-inf") return -kInfinity;
  double x = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, x);
  if (res.ec != std::errc{} || res.ptr != end) throw ConfigError("not a number: '" + text + "'");
  return x;
}

inline double number_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_number(j.get<std::string>());
  throw ConfigError("expected a number, got " + j.dump());
}

// ---------------------------------------------------------------- CSV input

/// Reads (x, y) rows. Blank lines, '#' comments and a non-numeric header
/// row are skipped; separators are commas or whitespace.
inline std::pair<std::vector<double>, std::vector<double>> read_two_columns(std::istream& in) {
  std::vector<double> xs, ys;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& ch : line) {
      if (ch == ',' || ch == '\t' || ch == ';' || ch == '\r') ch = ' ';
    }
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a)) continue;
    if (!(fields >> b) || (fields >> extra)) {
      throw ConfigError("two-column CSV: row " + std::to_string(row) + " does not have two fields");
    }
    double x = 0.0, y = 0.0;
    try {
      x = parse_number(a);
      y = parse_number(b);
    } catch (const ConfigError&) {
      if (xs.empty()) continue;  // header
      throw ConfigError("two-column CSV: row " + std::to_string(row) + " is not numeric");
    }
    xs.push_back(x);
    ys.push_back(y);
  }
  if (xs.empty()) throw ConfigError("two-column CSV: no data rows");
  return {std::move(xs), std::move(ys)};
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return in;
}

/// Warp from (r, f(r)) samples.
inline Warp load_warp_csv(std::istream& in, std::string name = "sampled") {
  auto [r, f] = read_two_columns(in);
  return Warp::sampled(std::move(r), std::move(f), std::move(name));
}

inline Warp load_warp_csv(const std::string& path) {
  auto in = open_input(path);
  return load_warp_csv(in, path);
}

/// Tabulated profile from (v, Ip(v)) samples.
inline IsoProfile load_profile_csv(std::istream& in) {
  auto [v, ip] = read_two_columns(in);
  return IsoProfile::tabulated(std::move(v), std::move(ip));
}

inline IsoProfile load_profile_csv(const std::string& path) {
  auto in = open_input(path);
  return load_profile_csv(in);
}

// ------------------------------------------------------ complexes and regions

inline json to_json(const CellComplex& c) {
  json cells = json::array();
  for (std::size_t i = 0; i < c.size(); ++i) {
    cells.push_back({{"volume", number(c.volumes()[i])}, {"outer_radius", number(c.outer_radius()[i])}});
  }
  json faces = json::array();
  for (const Interface& f : c.interfaces()) {
    faces.push_back({{"a", f.a}, {"b", f.b == kExterior ? json("exterior") : json(f.b)}, {"weight", number(f.weight)}});
  }
  json density = json::array();
  for (double d : c.density()) density.push_back(number(d));
  json j{{"kind", to_string(c.kind())}, {"cells", std::move(cells)}, {"interfaces", std::move(faces)},
         {"density", std::move(density)}};
  if (c.kind() == ComplexKind::planar) {
    j["rows"] = c.rows();
    j["cols"] = c.cols();
  }
  return j;
}

/// Rebuilds a complex from `to_json` output. Grid metadata (radial radii,
/// planar rows and cols) is not restored; cut-based queries do not use it.
inline CellComplex complex_from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind != "radial" && kind != "planar") throw ConfigError("complex: unknown kind '" + kind + "'");
    std::vector<double> vol, outer, density;
    for (const auto& cell : j.at("cells")) {
      vol.push_back(number_from(cell.at("volume")));
      outer.push_back(number_from(cell.at("outer_radius")));
    }
    for (const auto& d : j.at("density")) density.push_back(number_from(d));
    std::vector<Interface> faces;
    for (const auto& f : j.at("interfaces")) {
      const auto& b = f.at("b");
      faces.push_back({f.at("a").get<std::size_t>(),
                       b.is_string() && b.get<std::string>() == "exterior" ? kExterior : b.get<std::size_t>(),
                       number_from(f.at("weight"))});
    }
    return CellComplex(kind == "radial" ? ComplexKind::radial : ComplexKind::planar, std::move(vol),
                       std::move(faces), std::move(outer), std::move(density));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("complex: ") + e.what());
  }
}

/// {size, cells: [indices], volume, perimeter}.
inline json to_json(const CellComplex& c, const RegionSet& e) {
  json cells = json::array();
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i]) cells.push_back(i);
  }
  return {{"size", e.size()}, {"cells", std::move(cells)}, {"volume", number(c.volume(e))},
          {"perimeter", number(perimeter(c, e))}};
}

inline RegionSet region_from_json(const json& j) {
  try {
    RegionSet e(j.at("size").get<std::size_t>());
    for (const auto& i : j.at("cells")) {
      const auto idx = i.get<std::size_t>();
      if (idx >= e.size()) throw ConfigError("region: cell index out of range");
      e.set(idx);
    }
    return e;
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("region: ") + ex.what());
  }
}

inline json to_json(const CertificationReport& r) {
  json per_time = json::array();
  for (const auto& e : r.entries) {
    per_time.push_back({{"t", number(e.t)},
                        {"J_sublevel", number(e.J_sublevel)},
                        {"J_minimum", number(e.J_minimum)},
                        {"violation", number(e.violation)},
                        {"pass", e.pass}});
  }
  return {{"tolerance", number(r.tolerance)}, {"worst_violation", number(r.worst_violation)},
          {"pass", r.pass}, {"entries", std::move(per_time)}};
}

// ----------------------------------------------------------------- solutions

/// Rows "r,u" over the tabulation of u.
inline void write_solution_csv(std::ostream& out, std::span<const double> radii, std::span<const double> values) {
  out << "r,u\n";
  for (std::size_t i = 0; i < radii.size(); ++i) {
    out << format_number(radii[i]) << ',' << format_number(values[i]) << '\n';
  }
}

inline void write_solution_csv(std::ostream& out, const SymmetricSolution& sol) {
  write_solution_csv(out, sol.radii(), sol.values());
}

/// {r0, T_max, proper, jumps: [{t, rho_t, rho_t_plus}]}.
inline json jump_manifest(const SymmetricSolution& sol) {
  json jumps = json::array();
  for (const Jump& j : sol.jumps()) {
    jumps.push_back({{"t", number(j.t)}, {"rho_t", number(j.rho)}, {"rho_t_plus", number(j.rho_plus)}});
  }
  return {{"r0", number(sol.r0())}, {"T_max", number(sol.T_max())}, {"proper", sol.proper()},
          {"jumps", std::move(jumps)}};
}

// -------------------------------------------------------------------- bounds

inline void write_bound_csv(std::ostream& out, std::span<const BoundReport> reports) {
  out << "t,rho_t,R1,R_main,contained,margin\n";
  for (const auto& r : reports) {
    out << format_number(r.t) << ',' << format_number(r.rho_t) << ',' << format_number(r.R1) << ','
        << format_number(r.R_main) << ',' << (r.contained ? 1 : 0) << ',' << format_number(r.margin) << '\n';
  }
}

inline json bound_summary(std::span<const BoundReport> reports) {
  bool all_ok = !reports.empty(), all_contained = !reports.empty();
  double min_margin = kInfinity;
  json notes = json::array();
  for (const auto& r : reports) {
    all_ok = all_ok && r.hypotheses_ok;
    all_contained = all_contained && r.contained;
    min_margin = std::min(min_margin, r.margin);
    if (!r.note.empty()) notes.push_back({{"t", number(r.t)}, {"note", r.note}});
  }
  return {{"times", reports.size()}, {"hypotheses_ok", all_ok}, {"all_contained", all_contained},
          {"min_margin", number(min_margin)}, {"notes", std::move(notes)}};
}

// ------------------------------------------------------------- stabilization

inline json to_json(const StabilizationReport& r) {
  json per_k = json::array();
  for (const auto& e : r.entries) {
    per_k.push_back({{"k", number(e.k)},
                     {"C", number(e.C)},
                     {"T_k", number(e.T_k)},
                     {"T_tilde", number(r.T_tilde)},
                     {"above_k1", e.above_k1},
                     {"reaches_T_tilde", e.reaches_T_tilde},
                     {"sup_diff_prev", number(e.sup_diff_prev)},
                     {"agrees_with_prev", e.agrees_with_prev},
                     {"maximum_principle", e.maximum_principle},
                     {"certified", r.k1_found && e.k == r.k1 && r.certified}});
  }
  return {{"hypotheses_ok", r.hypotheses_ok},
          {"note", r.note},
          {"a0", number(r.a0)},
          {"A", number(r.A)},
          {"T_tilde", number(r.T_tilde)},
          {"R2", number(r.R2)},
          {"k1", r.k1_found ? number(r.k1) : json(nullptr)},
          {"all_reach", r.all_reach},
          {"agreement", r.agreement},
          {"worst_disagreement", number(r.worst_disagreement)},
          {"certified", r.certified},
          {"certification_violation", number(r.certification_violation)},
          {"pass", r.pass},
          {"entries", std::move(per_k)}};
}

inline json to_json(const LimitResult& r) {
  json reports = json::array();
  for (const auto& s : r.reports) reports.push_back(to_json(s));
  return {{"max_level", number(r.max_level)},
          {"nodes", r.radii.size()},
          {"worst_pair_diff", number(r.worst_pair_diff)},
          {"consistent", r.consistent},
          {"diff_vs_direct", number(r.diff_vs_direct)},
          {"matches_direct", r.matches_direct},
          {"pass", r.pass},
          {"levels", std::move(reports)}};
}

/// Pretty-printed JSON followed by a newline.
inline void write_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

}  // namespace imcf::io
