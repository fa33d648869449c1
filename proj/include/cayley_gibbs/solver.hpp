#pragma once

// All solutions (h, l) of the two-field fixed-point system
//
//   h = a f(h) + b f(l)
//   l = c f(h) + d f(l),        f = f_theta,
//
// obtained through the four reductions a = b = 0 / a = 0 / b = 0 / ab != 0,
// each of which leaves a scalar equation that is scanned on a uniform grid and
// refined by bisection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cayley_gibbs/field_pair.hpp"
#include "cayley_gibbs/scheme.hpp"
#include "cayley_gibbs/special_functions.hpp"

namespace cayley_gibbs {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SolverConfig {
  // Explicit scan window. When unset, each scalar equation is scanned over
  // [-(B + 0.5), B + 0.5] with B its a priori bound (coefficient L1 norm
  // times arctanh theta). When set, the window must cover that bound.
  std::optional<double> scan_lo;
  std::optional<double> scan_hi;
  int grid_points = 4096;
  double bisect_tol = 1e-12;
  double residual_tol = 1e-9;
  double dedup_tol = 1e-7;
  int max_iter = 200;

  void validate() const {
    if (scan_lo && scan_hi && !(*scan_lo < *scan_hi)) {
      throw ConfigError("solver config: scan_lo must be below scan_hi");
    }
    if (grid_points < 64) {
      throw ConfigError("solver config: grid_points must be at least 64");
    }
    if (!(bisect_tol > 0.0) || !(residual_tol > 0.0) || !(dedup_tol > 0.0)) {
      throw ConfigError("solver config: tolerances must be positive");
    }
    if (max_iter < 1) {
      throw ConfigError("solver config: max_iter must be positive");
    }
  }
};

/// Odd equations are scanned on [kScanFloor, hi] and reflected; roots of
/// magnitude below this are out of reach of the grid.
inline constexpr double kScanFloor = 1e-6;

/// Solution components smaller than this are set to exactly zero when the
/// residual allows it.
inline constexpr double kZeroSnap = 1e-10;

// ---------------------------------------------------------------------------
// 1-D root isolation.

namespace detail {

template <class Fn>
double bisect(Fn& fn, double lo, double hi, double flo, const SolverConfig& cfg) {
  for (int it = 0; it < cfg.max_iter && (hi - lo) > cfg.bisect_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = fn(mid);
    if (fm == 0.0) {
      return mid;
    }
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Golden-section minimisation of fn on [lo, hi].
template <class Fn>
double golden_min(Fn&& fn, double lo, double hi, const SolverConfig& cfg) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = fn(x1);
  double f2 = fn(x2);
  for (int it = 0; it < cfg.max_iter && (hi - lo) > cfg.bisect_tol; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = fn(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = fn(x2);
    }
  }
  return 0.5 * (lo + hi);
}

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace detail

/// Result of a grid scan: sign-change roots plus roots recovered from local
/// minima of |fn| that the grid alone cannot see.
struct RootScan {
  std::vector<double> roots;
  // Double (tangential) roots located by minimising |fn|; also listed in roots.
  std::vector<double> degenerate;
  // A local minimum of |fn| came close to zero without reaching the residual
  // tolerance; a root may have been missed.
  bool tangential_warning = false;
};

/// Uniform grid of cfg.grid_points points on [lo, hi]; every cell with a sign
/// change is bisected to cfg.bisect_tol. Grid points where fn is exactly zero
/// are roots. A root touching zero without a sign change is found only if a
/// grid point lands on it; `scan_roots` adds a refinement for that case.
template <class Fn>
std::vector<double> find_roots_1d(Fn&& fn, double lo, double hi, const SolverConfig& cfg) {
  std::vector<double> roots;
  if (!(lo < hi)) {
    return roots;
  }
  const int n = cfg.grid_points;
  const double step = (hi - lo) / (n - 1);
  double x_prev = lo;
  double f_prev = fn(lo);
  if (f_prev == 0.0) {
    roots.push_back(lo);
  }
  for (int i = 1; i < n; ++i) {
    const double x = (i == n - 1) ? hi : lo + step * i;
    const double fx = fn(x);
    if (fx == 0.0) {
      roots.push_back(x);
    } else if (f_prev != 0.0 && (fx < 0.0) != (f_prev < 0.0)) {
      roots.push_back(detail::bisect(fn, x_prev, x, f_prev, cfg));
    }
    x_prev = x;
    f_prev = fx;
  }
  return roots;
}

template <class Fn>
RootScan scan_roots(Fn&& fn, double lo, double hi, const SolverConfig& cfg) {
  RootScan out;
  if (!(lo < hi)) {
    return out;
  }
  const int n = cfg.grid_points;
  const double step = (hi - lo) / (n - 1);
  std::vector<double> xs(n);
  std::vector<double> fs(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = (i == n - 1) ? hi : lo + step * i;
    fs[i] = fn(xs[i]);
  }

  std::vector<bool> near_crossing(n, false);
  for (int i = 0; i < n; ++i) {
    if (fs[i] == 0.0) {
      out.roots.push_back(xs[i]);
      near_crossing[i] = true;
      continue;
    }
    if (i + 1 < n && fs[i + 1] != 0.0 && (fs[i] < 0.0) != (fs[i + 1] < 0.0)) {
      out.roots.push_back(detail::bisect(fn, xs[i], xs[i + 1], fs[i], cfg));
      near_crossing[i] = near_crossing[i + 1] = true;
    }
  }

  const double warn_tol = std::sqrt(cfg.residual_tol);
  const double accept_tol = 0.1 * cfg.residual_tol;
  for (int i = 1; i + 1 < n; ++i) {
    if (near_crossing[i - 1] || near_crossing[i] || near_crossing[i + 1]) {
      continue;
    }
    const double a = std::fabs(fs[i]);
    if (!(a <= std::fabs(fs[i - 1]) && a <= std::fabs(fs[i + 1]))) {
      continue;
    }
    const int s = detail::sign_of(fs[i]);
    const double xm = detail::golden_min([&](double x) { return s * fn(x); }, xs[i - 1], xs[i + 1], cfg);
    const double fm = fn(xm);
    if (detail::sign_of(fm) == -s) {
      // Two close roots inside one grid cell pair.
      out.roots.push_back(detail::bisect(fn, xs[i - 1], xm, fs[i - 1], cfg));
      out.roots.push_back(detail::bisect(fn, xm, xs[i + 1], fm, cfg));
    } else if (std::fabs(fm) <= accept_tol) {
      out.roots.push_back(xm);
      out.degenerate.push_back(xm);
    } else if (std::fabs(fm) <= warn_tol) {
      out.tangential_warning = true;
    }
  }
  std::sort(out.roots.begin(), out.roots.end());
  return out;
}

// ---------------------------------------------------------------------------
// Solution sets.

/// Maximum absolute residual of the pair on both equations.
inline double system_residual(const ReducedParams& r, double theta, const FieldPair& p) {
  const double fh = f_theta(theta, p.h);
  const double fl = f_theta(theta, p.l);
  const double e1 = p.h - r.a * fh - r.b * fl;
  const double e2 = p.l - r.c * fh - r.d * fl;
  return std::max(std::fabs(e1), std::fabs(e2));
}

struct SolutionSet {
  // Sorted ascending by (h, l); closed under negation; contains (0, 0).
  std::vector<FieldPair> solutions;
  double residual_tol = 0.0;
  double dedup_tol = 0.0;
  int grid_points = 0;
  // The scan saw a near-tangency it could not resolve.
  bool incomplete = false;
  // Some root was located as a double root (no sign change).
  bool boundary_degenerate = false;
  std::vector<std::string> warnings;

  std::size_t size() const { return solutions.size(); }

  bool contains(const FieldPair& p, double tol) const {
    return std::any_of(solutions.begin(), solutions.end(),
                       [&](const FieldPair& q) { return linf_distance(p, q) <= tol; });
  }
};

namespace detail {

struct Candidates {
  std::vector<FieldPair> pairs;
  bool incomplete = false;
  bool degenerate = false;
  std::vector<std::string> warnings;

  void absorb(const RootScan& scan, const char* what) {
    if (scan.tangential_warning) {
      incomplete = true;
      warnings.push_back(std::string(what) + ": near-tangential minimum not resolved to a root");
    }
    if (!scan.degenerate.empty()) {
      degenerate = true;
      warnings.push_back(std::string(what) + ": boundary-degenerate double root");
    }
  }
};

inline SolutionSet finalize(const ReducedParams& r, double theta, Candidates cand,
                            const SolverConfig& cfg) {
  SolutionSet out;
  out.residual_tol = cfg.residual_tol;
  out.dedup_tol = cfg.dedup_tol;
  out.grid_points = cfg.grid_points;
  out.incomplete = cand.incomplete;
  out.boundary_degenerate = cand.degenerate;
  out.warnings = std::move(cand.warnings);

  // Canonical half: h > 0, or h ~ 0 with l >= 0.
  std::vector<FieldPair> half;
  for (FieldPair p : cand.pairs) {
    if (!std::isfinite(p.h) || !std::isfinite(p.l)) {
      continue;
    }
    // Bisection leaves roots at zero as ~1e-13 values; pin them.
    for (double* v : {&p.h, &p.l}) {
      if (*v != 0.0 && std::fabs(*v) < kZeroSnap) {
        const double keep = *v;
        *v = 0.0;
        if (!(system_residual(r, theta, p) < cfg.residual_tol)) {
          *v = keep;
        }
      }
    }
    if (p.h < -cfg.dedup_tol || (std::fabs(p.h) <= cfg.dedup_tol && p.l < 0.0)) {
      p = -p;
    }
    const double res = system_residual(r, theta, p);
    if (!(res < cfg.residual_tol)) {
      out.warnings.push_back("dropped candidate (" + std::to_string(p.h) + ", " + std::to_string(p.l) +
                             ") with residual " + std::to_string(res));
      continue;
    }
    half.push_back(p);
  }
  std::sort(half.begin(), half.end());

  const FieldPair zero{0.0, 0.0};
  std::vector<FieldPair> kept{zero};
  for (const FieldPair& p : half) {
    const bool dup = std::any_of(kept.begin(), kept.end(),
                                 [&](const FieldPair& q) { return linf_distance(p, q) < cfg.dedup_tol; });
    if (!dup) {
      kept.push_back(p);
    }
  }
  for (const FieldPair& p : kept) {
    out.solutions.push_back(p);
    if (linf_distance(p, zero) > 0.0) {
      out.solutions.push_back(-p);
    }
  }
  std::sort(out.solutions.begin(), out.solutions.end());
  return out;
}

inline double a_priori_bound(int coef_l1, double theta) {
  return coef_l1 * arctanh(std::fabs(theta));
}

// Positive end of the scan window for an equation whose roots lie in
// [-bound, bound].
inline double scan_hi_for(double bound, const SolverConfig& cfg) {
  if (cfg.scan_hi || cfg.scan_lo) {
    const double lo = cfg.scan_lo.value_or(-std::numeric_limits<double>::infinity());
    const double hi = cfg.scan_hi.value_or(std::numeric_limits<double>::infinity());
    if (lo > -bound || hi < bound) {
      throw ConfigError("solver config: scan window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                        "] does not cover the a priori root bound " + std::to_string(bound));
    }
    return std::isfinite(hi) ? hi : bound + 0.5;
  }
  return bound + 0.5;
}

inline double scan_lo_for(double bound, const SolverConfig& cfg) {
  scan_hi_for(bound, cfg);
  if (cfg.scan_lo) {
    return *cfg.scan_lo;
  }
  return -(bound + 0.5);
}

// Positive roots of the odd scalar equation x = m f_theta(x), theta may have
// either sign. The sign structure is known (one positive root iff m theta > 1),
// so the root is bracketed directly instead of scanned.
inline std::vector<double> odd_scalar_roots(int m, double theta, const SolverConfig& cfg) {
  if (m == 0 || !(m * theta > 1.0)) {
    return {};
  }
  auto fn = [&](double x) { return x - m * f_theta(theta, x); };
  const double hi = scan_hi_for(a_priori_bound(m, theta), cfg);
  double lo = 0.5 * hi;
  double flo = fn(lo);
  for (int it = 0; it < 2000 && flo >= 0.0 && lo > 0.0; ++it) {
    lo *= 0.5;
    flo = fn(lo);
  }
  if (!(flo < 0.0)) {
    return {};
  }
  return {bisect(fn, lo, hi, flo, cfg)};
}

inline void normalize_theta(ReducedParams& r, double& theta) {
  if (theta < 0.0) {
    r = r.negated();
    theta = -theta;
  }
}

inline void check_inputs(double theta, const SolverConfig& cfg) {
  if (!(std::fabs(theta) < 1.0)) {
    throw DomainError("solver: theta must lie in (-1, 1)");
  }
  cfg.validate();
}

// max_{l >= 0} [d f(l) - l] and its argmax (theta > 0).
inline std::pair<double, double> hbar(int d, double theta, const SolverConfig& cfg) {
  if (!(d * theta > 1.0)) {
    return {0.0, 0.0};
  }
  const double hi = a_priori_bound(d, theta) + 0.5;
  const double lm = golden_min([&](double x) { return x - d * f_theta(theta, x); }, 0.0, hi, cfg);
  return {d * f_theta(theta, lm) - lm, lm};
}

}  // namespace detail

/// Roots of h = m f_theta(h) for 0 < theta < 1, ascending: {0} when
/// theta <= 1/m, otherwise {-h*, 0, h*}.
inline std::vector<double> solve_scalar(int m, double theta, const SolverConfig& cfg = {}) {
  if (m < 1) {
    throw std::invalid_argument("solve_scalar: m must be at least 1");
  }
  if (!(theta > 0.0 && theta < 1.0)) {
    throw DomainError("solve_scalar: theta must lie in (0, 1)");
  }
  cfg.validate();
  detail::scan_hi_for(detail::a_priori_bound(m, theta), cfg);
  const auto pos = detail::odd_scalar_roots(m, theta, cfg);
  if (pos.empty()) {
    return {0.0};
  }
  return {-pos.front(), 0.0, pos.front()};
}

/// a = b = 0: h = 0 and l solves l = d f(l).
inline SolutionSet solve_case_a0_b0(ReducedParams r, double theta, const SolverConfig& cfg = {}) {
  if (r.a != 0 || r.b != 0) {
    throw std::invalid_argument("solve_case_a0_b0: requires a = b = 0");
  }
  detail::check_inputs(theta, cfg);
  detail::normalize_theta(r, theta);
  detail::Candidates cand;
  if (theta > 0.0) {
    const int sd = detail::sign_of(r.d);
    for (double l : detail::odd_scalar_roots(std::abs(r.d), sd * theta, cfg)) {
      cand.pairs.push_back({0.0, l});
    }
  }
  return detail::finalize(r, theta, std::move(cand), cfg);
}

/// a = 0, b != 0: l solves l = g(l) = c f(b f(l)) + d f(l), h = b f(l).
inline SolutionSet solve_case_a0(ReducedParams r, double theta, const SolverConfig& cfg = {}) {
  if (r.a != 0 || r.b == 0) {
    throw std::invalid_argument("solve_case_a0: requires a = 0 and b != 0");
  }
  detail::check_inputs(theta, cfg);
  detail::normalize_theta(r, theta);
  detail::Candidates cand;
  if (theta > 0.0) {
    auto g = [&](double l) { return r.c * f_theta(theta, r.b * f_theta(theta, l)) + r.d * f_theta(theta, l); };
    auto fn = [&](double l) { return l - g(l); };
    const double hi = detail::scan_hi_for(detail::a_priori_bound(std::abs(r.c) + std::abs(r.d), theta), cfg);
    const RootScan scan = scan_roots(fn, kScanFloor, hi, cfg);
    cand.absorb(scan, "l = g(l)");
    for (double l : scan.roots) {
      cand.pairs.push_back({r.b * f_theta(theta, l), l});
    }
  }
  return detail::finalize(r, theta, std::move(cand), cfg);
}

/// a != 0, b = 0: h solves h = a f(h); for h = 0 the l-equation is
/// l = d f(l), for h = +-h* it is l = +-c f(h*) + d f(l), which has one, two
/// or three roots depending on |c f(h*)| against max_{l>=0}[d f(l) - l].
inline SolutionSet solve_case_b0(ReducedParams r, double theta, const SolverConfig& cfg = {}) {
  if (r.a == 0 || r.b != 0) {
    throw std::invalid_argument("solve_case_b0: requires a != 0 and b = 0");
  }
  detail::check_inputs(theta, cfg);
  detail::normalize_theta(r, theta);
  detail::Candidates cand;
  if (theta > 0.0) {
    const int sd = detail::sign_of(r.d);
    for (double l : detail::odd_scalar_roots(std::abs(r.d), sd * theta, cfg)) {
      cand.pairs.push_back({0.0, l});
    }
    const auto hs = detail::odd_scalar_roots(std::abs(r.a), detail::sign_of(r.a) * theta, cfg);
    if (!hs.empty()) {
      const double h_star = hs.front();
      const double shift = r.c * f_theta(theta, h_star);
      auto fn = [&](double l) { return l - r.d * f_theta(theta, l) - shift; };
      const double bound = std::fabs(shift) + detail::a_priori_bound(std::abs(r.d), theta);
      const double lo = detail::scan_lo_for(bound, cfg);
      const double hi = detail::scan_hi_for(bound, cfg);
      RootScan scan = scan_roots(fn, lo, hi, cfg);
      cand.absorb(scan, "l = c f(h*) + d f(l)");

      const auto [hb, l_arg] = detail::hbar(r.d, theta, cfg);
      const double gap = std::fabs(shift) - hb;
      std::size_t expected = 1;
      if (hb > 0.0 && std::fabs(gap) <= cfg.residual_tol) {
        expected = 2;
        cand.degenerate = true;
        const double tangent = shift > 0.0 ? -l_arg : l_arg;
        const bool have = std::any_of(scan.roots.begin(), scan.roots.end(),
                                      [&](double x) { return std::fabs(x - tangent) < 1e-6; });
        if (!have && std::fabs(fn(tangent)) < cfg.residual_tol) {
          scan.roots.push_back(tangent);
        }
      } else if (gap < 0.0) {
        expected = 3;
      }
      if (scan.roots.size() != expected) {
        cand.incomplete = true;
        cand.warnings.push_back("l = c f(h*) + d f(l): found " + std::to_string(scan.roots.size()) +
                                " roots, expected " + std::to_string(expected));
      }
      for (double l : scan.roots) {
        cand.pairs.push_back({h_star, l});
      }
    }
  }
  return detail::finalize(r, theta, std::move(cand), cfg);
}

/// l = phi(h) = [(bc - ad) f(h) + d h] / b, the second unknown recovered from h.
inline double phi_back(const ReducedParams& r, double theta, double h) {
  return (static_cast<double>(r.b * r.c - r.a * r.d) * f_theta(theta, h) + r.d * h) / r.b;
}

/// psi(h) = a f(h) + b f(phi(h)); solutions of the system are (h, phi(h))
/// with h = psi(h).
inline double psi(const ReducedParams& r, double theta, double h) {
  return r.a * f_theta(theta, h) + r.b * f_theta(theta, phi_back(r, theta, h));
}

/// a != 0, b != 0: roots of h = psi(h), back-substituted through phi. Each
/// pair is re-checked against both original equations.
inline SolutionSet solve_case_general(ReducedParams r, double theta, const SolverConfig& cfg = {}) {
  if (r.a == 0 || r.b == 0) {
    throw std::invalid_argument("solve_case_general: requires a != 0 and b != 0");
  }
  detail::check_inputs(theta, cfg);
  detail::normalize_theta(r, theta);
  detail::Candidates cand;
  if (theta > 0.0) {
    auto fn = [&](double h) { return h - psi(r, theta, h); };
    const double hi = detail::scan_hi_for(detail::a_priori_bound(std::abs(r.a) + std::abs(r.b), theta), cfg);
    const RootScan scan = scan_roots(fn, kScanFloor, hi, cfg);
    cand.absorb(scan, "h = psi(h)");
    for (double h : scan.roots) {
      cand.pairs.push_back({h, phi_back(r, theta, h)});
    }
  }
  return detail::finalize(r, theta, std::move(cand), cfg);
}

/// Full solution set of the system for any theta in (-1, 1). Negative theta is
/// mapped to |theta| with negated parameters (f_{-theta} = -f_theta).
inline SolutionSet solve_system(ReducedParams r, double theta, const SolverConfig& cfg = {}) {
  detail::check_inputs(theta, cfg);
  if (theta == 0.0 || r.is_zero()) {
    return detail::finalize(r, theta, {}, cfg);
  }
  detail::normalize_theta(r, theta);
  if (r.a == 0 && r.b == 0) {
    return solve_case_a0_b0(r, theta, cfg);
  }
  if (r.a == 0) {
    return solve_case_a0(r, theta, cfg);
  }
  if (r.b == 0) {
    return solve_case_b0(r, theta, cfg);
  }
  return solve_case_general(r, theta, cfg);
}

/// Lexicographically largest solution with h >= 0 and l >= 0; (0, 0) when
/// no other exists. Used as the representative pair of a solution set.
inline FieldPair largest_nonnegative(const SolutionSet& set) {
  FieldPair best{0.0, 0.0};
  for (const FieldPair& p : set.solutions) {
    if (p.h >= 0.0 && p.l >= 0.0 && best < p) {
      best = p;
    }
  }
  return best;
}

}  // namespace cayley_gibbs
