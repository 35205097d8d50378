#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "imcf/error.hpp"
#include "imcf/iso_profile.hpp"
#include "imcf/quadrature.hpp"
#include "imcf/warped_geometry.hpp"

namespace imcf {

struct Jump {
  double t = 0.0;
  double rho = 0.0;       ///< sup{u < t}
  double rho_plus = 0.0;  ///< sup{u <= t}
};

struct SublevelRadii {
  double rho = 0.0;
  double rho_plus = 0.0;
};

struct SolveOptions {
  double tail_fraction = kDefaultTailFraction;
  /// Minimum of df / dlog r over the tail window for f to count as unbounded.
  double growth_threshold = 1e-3;
};

/// Weak IMCF from {r < r0} on a warped product.
///
/// With m(r) = inf_{s in [r, r_max]} f(s), the arrival time is
/// u(r) = (n-1) log(m(r) / m(r0)) for r >= r0. When f is increasing past r0
/// this is the classical 2 log-type solution; plateaus of m are jumps.
/// Values inside {r < r0} are not represented.
class SymmetricSolution {
 public:
  SymmetricSolution(const WarpedManifold& m, double r0, SolveOptions opt = {})
      : manifold_(std::make_shared<const WarpedManifold>(m)), r0_(r0), options_(opt) {
    const auto& M = *manifold_;
    if (!(r0 > 0.0 && r0 < M.r_max())) {
      throw DomainError("solve: r0 = " + std::to_string(r0) + " outside (0, r_max)");
    }
    if (!(M.f(r0) > 0.0)) throw DomainError("solve: f(r0) must be positive");
    auto grid = M.grid();
    const std::size_t n = grid.size();
    f_nodes_.resize(n);
    inf_.resize(n);
    for (std::size_t i = 0; i < n; ++i) f_nodes_[i] = M.f(grid[i]);
    inf_[n - 1] = f_nodes_[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) inf_[i] = std::min(f_nodes_[i], inf_[i + 1]);
    m0_ = running_inf(r0);

    radii_.push_back(r0);
    values_.push_back(0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (grid[i] > r0) {
        radii_.push_back(grid[i]);
        values_.push_back(level_to_time(inf_[i]));
      }
    }
    detect_tail();
    detect_jumps();
  }

  const WarpedManifold& manifold() const { return *manifold_; }
  double r0() const { return r0_; }
  const SolveOptions& options() const { return options_; }

  /// inf_{s >= r0} f(s); equals f(r0) unless f sags below f(r0) further out.
  double base_level() const { return m0_; }

  /// Radii r0 < grid nodes <= r_max at which u is tabulated.
  std::span<const double> radii() const { return radii_; }
  std::span<const double> values() const { return values_; }
  const std::vector<Jump>& jumps() const { return jumps_; }

  /// +infinity when f is detected unbounded on the tail window.
  double T_max() const { return t_max_; }
  bool proper() const { return proper_; }
  double tail_surrogate() const { return tail_surrogate_; }

  /// Running infimum of f over [r, r_max], exact on the grid representation.
  double running_inf(double r) const {
    const auto& M = *manifold_;
    const std::size_t i = M.node_below(r);
    auto grid = M.grid();
    if (r >= grid[i + 1]) return inf_[i + 1];
    return std::min(M.f(r), inf_[i + 1]);
  }

  /// u(r) for r0 <= r <= r_max.
  double u(double r) const {
    if (!(r >= r0_)) throw DomainError("u is not represented inside {r < r0}");
    return level_to_time(running_inf(r));
  }

  double time_to_level(double t) const {
    return m0_ * std::exp(t / (manifold_->dimension() - 1));
  }

  double level_to_time(double level) const {
    return (manifold_->dimension() - 1) * std::log(level / m0_);
  }

  /// rho_t = sup{u < t} (r0 at t = 0) and rho_t^+ = sup{u <= t}.
  SublevelRadii sublevel(double t) const {
    if (!(t >= 0.0)) throw DomainError("sublevel: negative time");
    if (!(t < t_max_)) {
      throw NotPrecompact("sublevel: t = " + std::to_string(t) + " >= T_max = " +
                          std::to_string(t_max_));
    }
    const double level = time_to_level(t);
    SublevelRadii s;
    s.rho = t == 0.0 ? r0_ : std::max(r0_, crossing(level, false));
    s.rho_plus = std::max(s.rho, crossing(level, true));
    return s;
  }

 private:
  // sup{r : m(r) < level} (strict) or sup{r : m(r) <= level}.
  double crossing(double level, bool inclusive) const {
    const auto& M = *manifold_;
    auto grid = M.grid();
    auto above = [&](double mi) { return inclusive ? mi > level : mi >= level; };
    auto it = std::partition_point(inf_.begin(), inf_.end(), [&](double mi) { return !above(mi); });
    if (it == inf_.end()) {
      throw RepresentationExhausted("sublevel reaches r_max; enlarge the radial domain");
    }
    const auto j = static_cast<std::size_t>(it - inf_.begin());
    if (j == 0) return 0.0;
    // f is monotone on the cell and m_{j-1} is on the other side, so f is
    // increasing here and the boundary is where f crosses the level.
    return quad::bisect([&](double r) { return M.f(r) - level; }, grid[j - 1], grid[j]);
  }

  void detect_tail() {
    const auto& M = *manifold_;
    auto grid = M.grid();
    const double lo = (1.0 - options_.tail_fraction) * M.r_max();
    tail_surrogate_ = std::numeric_limits<double>::infinity();
    bool increasing = true;
    double min_rate = std::numeric_limits<double>::infinity();
    std::size_t prev = grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i] < lo) continue;
      tail_surrogate_ = std::min(tail_surrogate_, f_nodes_[i]);
      if (prev < grid.size()) {
        const double df = f_nodes_[i] - f_nodes_[prev];
        if (!(df > 0.0)) increasing = false;
        min_rate = std::min(min_rate, df / std::log(grid[i] / grid[prev]));
      }
      prev = i;
    }
    proper_ = increasing && min_rate >= options_.growth_threshold;
    if (proper_) {
      t_max_ = std::numeric_limits<double>::infinity();
    } else {
      t_max_ = std::max(0.0, level_to_time(tail_surrogate_));
    }
  }

  // Jumps sit at t = 0 and at the values of runs of equal running infimum.
  void detect_jumps() {
    std::vector<double> levels{m0_};
    auto grid = manifold_->grid();
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      if (grid[i] > r0_ && inf_[i] == inf_[i + 1] && inf_[i] > levels.back()) {
        levels.push_back(inf_[i]);
      }
    }
    for (double level : levels) {
      const double t = level == m0_ ? 0.0 : level_to_time(level);
      if (!(t < t_max_)) break;
      SublevelRadii s;
      try {
        s = sublevel(t);
      } catch (const RepresentationExhausted&) {
        break;
      }
      if (s.rho_plus - s.rho > 1e-12 * std::max(1.0, s.rho)) jumps_.push_back({t, s.rho, s.rho_plus});
    }
  }

  std::shared_ptr<const WarpedManifold> manifold_;
  double r0_;
  SolveOptions options_;
  std::vector<double> f_nodes_;
  std::vector<double> inf_;
  double m0_ = 0.0;
  std::vector<double> radii_;
  std::vector<double> values_;
  std::vector<Jump> jumps_;
  double t_max_ = 0.0;
  double tail_surrogate_ = 0.0;
  bool proper_ = false;
};

inline SymmetricSolution solve(const WarpedManifold& m, double r0, SolveOptions opt = {}) {
  return SymmetricSolution(m, r0, opt);
}

inline SublevelRadii sublevel(const SymmetricSolution& sol, double t) { return sol.sublevel(t); }

inline std::vector<double> jump_times(const SymmetricSolution& sol) {
  std::vector<double> ts;
  for (const Jump& j : sol.jumps()) ts.push_back(j.t);
  return ts;
}

inline double max_existence_time(const SymmetricSolution& sol) { return sol.T_max(); }

inline bool properness_check(const SymmetricSolution& sol) { return sol.proper(); }

/// Relative error of |dE_t| = e^t |dE_0^+|.
inline double area_law_check(const SymmetricSolution& sol, double t) {
  const auto& M = sol.manifold();
  const double reference = std::exp(t) * M.sphere_area(sol.sublevel(0.0).rho_plus);
  return std::abs(M.sphere_area(sol.sublevel(t).rho) - reference) / reference;
}

/// |u'(r) - H(r)| with u' from a centered difference of step
/// min(grid spacing, max_step). Throws PlateauRegion where |grad u| = 0.
inline double gradient_check(const SymmetricSolution& sol, double r, double max_step = 1e-4) {
  const auto& M = sol.manifold();
  const double h = std::min(M.spacing(), max_step);
  if (!(r - h >= sol.r0() && r + h <= M.r_max())) {
    throw DomainError("gradient_check: stencil leaves [r0, r_max]");
  }
  const double lo = sol.running_inf(r - h);
  const double hi = sol.running_inf(r + h);
  if (sol.running_inf(r) < M.f(r) || lo == hi) {
    throw PlateauRegion("gradient_check: r = " + std::to_string(r) + " lies on a plateau of u");
  }
  const double du = (sol.level_to_time(hi) - sol.level_to_time(lo)) / (2.0 * h);
  const MeanCurvature H = M.mean_curvature(r);
  const double target = H.kink ? 0.5 * (H.left + H.right) : H.value();
  return std::abs(du - target);
}

}  // namespace imcf
