#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "imcf/error.hpp"
#include "imcf/quadrature.hpp"

namespace imcf {

/// Area of the unit (n-1)-sphere in R^n, 2 pi^{n/2} / Gamma(n/2).
inline double unit_sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

enum class Side { left, right };

/// One smooth piece of a closed-form warp, valid on [start, next start].
struct WarpSegment {
  double start = 0.0;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

/// Warp function f(r) of the metric dr^2 + f(r)^2 g_{S^{n-1}}.
///
/// Either a piecewise closed form (segments plus the interior critical points
/// of f, so that f is monotone between consecutive breakpoints) or a
/// piecewise-linear table on a strictly increasing grid starting at 0.
class Warp {
 public:
  Warp(std::string name, std::vector<WarpSegment> segments,
       std::vector<double> critical_points = {})
      : name_(std::move(name)), segments_(std::move(segments)) {
    if (segments_.empty()) throw DomainError("warp: no segments");
    if (segments_.front().start != 0.0) throw DomainError("warp: first segment must start at 0");
    for (std::size_t i = 1; i < segments_.size(); ++i) {
      if (!(segments_[i].start > segments_[i - 1].start)) {
        throw DomainError("warp: segment starts must be strictly increasing");
      }
    }
    for (std::size_t i = 1; i < segments_.size(); ++i) breakpoints_.push_back(segments_[i].start);
    for (double c : critical_points) breakpoints_.push_back(c);
    normalize_breakpoints();
  }

  /// Piecewise-linear warp through the samples (r_i, f_i); r_0 must be 0.
  static Warp sampled(std::vector<double> r, std::vector<double> f,
                      std::string name = "sampled") {
    if (r.size() < 2 || r.size() != f.size()) {
      throw DomainError("sampled warp: need at least two (r, f) samples of equal length");
    }
    if (r.front() != 0.0) throw DomainError("sampled warp: radius grid must start at 0");
    for (std::size_t i = 1; i < r.size(); ++i) {
      if (!(r[i] > r[i - 1])) throw DomainError("sampled warp: radius grid not strictly increasing");
    }
    Warp w;
    w.name_ = std::move(name);
    w.table_r_ = std::move(r);
    w.table_f_ = std::move(f);
    w.breakpoints_.assign(w.table_r_.begin() + 1, w.table_r_.end() - 1);
    return w;
  }

  const std::string& name() const { return name_; }
  bool is_sampled() const { return !table_r_.empty(); }

  /// Largest radius at which the warp is defined (infinite for closed forms).
  double domain_end() const {
    return is_sampled() ? table_r_.back() : std::numeric_limits<double>::infinity();
  }

  /// Kinks and critical points; f is monotone between consecutive entries.
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  double value(double r) const {
    if (is_sampled()) {
      const std::size_t i = table_cell(r);
      const double t = (r - table_r_[i]) / (table_r_[i + 1] - table_r_[i]);
      return table_f_[i] + t * (table_f_[i + 1] - table_f_[i]);
    }
    return segments_[segment_index(r, Side::right)].value(r);
  }

  /// One-sided derivative; the two sides differ only at kinks.
  double derivative(double r, Side side = Side::right) const {
    if (is_sampled()) {
      std::size_t i = table_cell(r);
      if (side == Side::left && r == table_r_[i] && i > 0) --i;
      return (table_f_[i + 1] - table_f_[i]) / (table_r_[i + 1] - table_r_[i]);
    }
    return segments_[segment_index(r, side)].derivative(r);
  }

 private:
  Warp() = default;

  void normalize_breakpoints() {
    std::sort(breakpoints_.begin(), breakpoints_.end());
    breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());
    std::erase_if(breakpoints_, [](double b) { return !(b > 0.0); });
  }

  std::size_t segment_index(double r, Side side) const {
    auto it = std::upper_bound(segments_.begin(), segments_.end(), r,
                               [](double x, const WarpSegment& s) { return x < s.start; });
    std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - segments_.begin() - 1, 0));
    if (side == Side::left && i > 0 && r == segments_[i].start) --i;
    return i;
  }

  std::size_t table_cell(double r) const {
    auto it = std::upper_bound(table_r_.begin(), table_r_.end(), r);
    std::ptrdiff_t i = (it - table_r_.begin()) - 1;
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(table_r_.size()) - 2);
    return static_cast<std::size_t>(i);
  }

  std::string name_;
  std::vector<WarpSegment> segments_;
  std::vector<double> table_r_;
  std::vector<double> table_f_;
  std::vector<double> breakpoints_;
};

/// Mean curvature of the sphere {r = const}; `kink` flags differing sides.
struct MeanCurvature {
  double left = 0.0;
  double right = 0.0;
  bool kink = false;
  double value() const { return right; }
};

/// B(x0, radius) when open, its closure otherwise.
struct GeodesicBallSet {
  double radius = 0.0;
  bool closed = false;
};

/// Rotationally symmetric manifold g = dr^2 + f(r)^2 g_{S^{n-1}} on [0, r_max].
///
/// The sample grid is uniform with the given spacing, augmented with every
/// breakpoint of the warp, so f is monotone on each grid cell. Cumulative
/// ball volumes are tabulated at grid nodes by adaptive Simpson.
class WarpedManifold {
 public:
  WarpedManifold(int n, Warp warp, double r_max, double spacing)
      : n_(n), warp_(std::move(warp)), r_max_(r_max), spacing_(spacing) {
    if (n_ < 2 || n_ > 12) throw DomainError("manifold dimension must satisfy 2 <= n <= 12");
    if (!(r_max_ > 0.0)) throw DomainError("r_max must be positive");
    if (r_max_ > warp_.domain_end()) throw DomainError("r_max exceeds the sampled warp range");
    if (!(spacing_ > 0.0)) throw DomainError("grid spacing must be positive");
    omega_ = unit_sphere_area(n_);
    build_grid();
    for (std::size_t i = 1; i < grid_.size(); ++i) {
      if (!(warp_.value(grid_[i]) > 0.0)) {
        throw DomainError("warp must be positive on (0, r_max]; f(" + std::to_string(grid_[i]) +
                          ") = " + std::to_string(warp_.value(grid_[i])));
      }
    }
    cumulative_.resize(grid_.size(), 0.0);
    for (std::size_t i = 1; i < grid_.size(); ++i) {
      cumulative_[i] = cumulative_[i - 1] + raw_shell(grid_[i - 1], grid_[i]);
    }
  }

  int dimension() const { return n_; }
  double r_max() const { return r_max_; }
  double spacing() const { return spacing_; }
  double omega() const { return omega_; }
  const Warp& warp() const { return warp_; }
  std::span<const double> grid() const { return grid_; }

  /// Same warp on a grid with half the spacing.
  WarpedManifold refined() const { return WarpedManifold(n_, warp_, r_max_, 0.5 * spacing_); }

  double f(double r) const {
    check_radius(r, "f");
    return warp_.value(r);
  }

  /// omega_{n-1} f(r)^{n-1}. r = 0 is accepted and gives the area of the
  /// inner cap, which is zero when f(0) = 0.
  double sphere_area(double r) const {
    check_radius(r, "sphere_area");
    const double fr = warp_.value(r);
    if (r > 0.0 && !(fr > 0.0)) throw DomainError("sphere_area: non-positive warp");
    return omega_ * std::pow(fr, n_ - 1);
  }

  double ball_volume(double r) const {
    check_radius(r, "ball_volume");
    const std::size_t i = node_below(r);
    return cumulative_[i] + raw_shell(grid_[i], r);
  }

  /// Volume of the annulus {a <= r < b}.
  double shell_volume(double a, double b) const {
    check_radius(a, "shell_volume");
    check_radius(b, "shell_volume");
    if (b < a) throw DomainError("shell_volume: b < a");
    const std::size_t ia = node_below(a);
    const std::size_t ib = node_below(b);
    if (ia == ib) return raw_shell(a, b);
    return raw_shell(a, grid_[ia + 1]) + (cumulative_[ib] - cumulative_[ia + 1]) +
           raw_shell(grid_[ib], b);
  }

  /// (n-1) f'(r)/f(r); at a kink of the warp both one-sided values are returned.
  MeanCurvature mean_curvature(double r) const {
    check_radius(r, "mean_curvature");
    const double fr = warp_.value(r);
    if (!(fr > 0.0)) throw DomainError("mean_curvature: non-positive warp");
    MeanCurvature h;
    h.left = (n_ - 1) * warp_.derivative(r, Side::left) / fr;
    h.right = (n_ - 1) * warp_.derivative(r, Side::right) / fr;
    h.kink = h.left != h.right;
    return h;
  }

  /// Index of the grid node at or below r.
  std::size_t node_below(double r) const {
    auto it = std::upper_bound(grid_.begin(), grid_.end(), r);
    std::ptrdiff_t i = (it - grid_.begin()) - 1;
    return static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(grid_.size()) - 2));
  }

 private:
  void check_radius(double r, const char* what) const {
    if (!(r >= 0.0 && r <= r_max_)) {
      throw DomainError(std::string(what) + ": radius " + std::to_string(r) +
                        " outside [0, r_max]");
    }
  }

  double raw_shell(double a, double b) const {
    if (b <= a) return 0.0;
    auto integrand = [this](double s) { return std::pow(warp_.value(s), n_ - 1); };
    return omega_ * quad::adaptive_simpson(integrand, a, b, 1e-13);
  }

  void build_grid() {
    const auto cells = static_cast<std::size_t>(std::ceil(r_max_ / spacing_ - 1e-9));
    grid_.reserve(cells + 1 + warp_.breakpoints().size());
    for (std::size_t i = 0; i < cells; ++i) grid_.push_back(static_cast<double>(i) * spacing_);
    grid_.push_back(r_max_);
    for (double b : warp_.breakpoints()) {
      if (b > 0.0 && b < r_max_) grid_.push_back(b);
    }
    std::sort(grid_.begin(), grid_.end());
    // Drop nodes closer than a tiny fraction of the spacing, keeping breakpoints.
    std::vector<double> merged;
    merged.reserve(grid_.size());
    const auto& bps = warp_.breakpoints();
    auto is_breakpoint = [&](double x) { return std::binary_search(bps.begin(), bps.end(), x); };
    for (double x : grid_) {
      if (!merged.empty() && x - merged.back() < 1e-9 * spacing_) {
        if (is_breakpoint(x) && merged.size() > 1) merged.back() = x;
        continue;
      }
      merged.push_back(x);
    }
    if (merged.back() != r_max_) merged.back() = r_max_;
    grid_ = std::move(merged);
  }

  int n_;
  Warp warp_;
  double r_max_;
  double spacing_;
  double omega_ = 0.0;
  std::vector<double> grid_;
  std::vector<double> cumulative_;
};

}  // namespace imcf
