#pragma once

// Exact finite-volume Gibbs distributions on V_n by enumeration of all 2^|V_n|
// spin configurations. Independent of the tree recursion: the boundary field
// enters only on the last level W_n.
//
// A configuration is a bit mask over the breadth-first vertex indices of V_n;
// bit v set means sigma(v) = +1. Since V_{n-1} is an index prefix of V_n, the
// low |V_{n-1}| bits of a mask are its restriction to V_{n-1}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "cayley_gibbs/special_functions.hpp"
#include "cayley_gibbs/tree_boundary.hpp"

namespace cayley_gibbs {

/// Largest |V_n| the oracle enumerates (2^24 configurations).
inline constexpr std::size_t kOracleSpinCap = 24;

struct SpinConfig {
  std::vector<std::int8_t> spins;

  static SpinConfig from_mask(std::uint64_t mask, std::size_t count) {
    SpinConfig c;
    c.spins.resize(count);
    for (std::size_t v = 0; v < count; ++v) {
      c.spins[v] = ((mask >> v) & 1U) ? 1 : -1;
    }
    return c;
  }

  static SpinConfig constant(std::size_t count, int spin) {
    return {std::vector<std::int8_t>(count, static_cast<std::int8_t>(spin))};
  }
};

/// Exact distribution on {-1,+1}^{V_n}. `weights` are scaled by
/// exp(-log_scale) so the largest is 1; `z` is their sum, and the true
/// partition function is z * exp(log_scale).
struct FiniteVolumeMeasure {
  int n = 0;
  std::size_t num_spins = 0;
  std::vector<double> weights;
  double log_scale = 0.0;
  double z = 0.0;

  double probability(std::uint64_t mask) const { return weights.at(mask) / z; }
  double log_partition() const { return log_scale + std::log(z); }
};

namespace detail {

struct BallData {
  std::size_t count = 0;
  std::vector<std::size_t> parent;  // parent[v] for v >= 1
  std::vector<double> field;        // boundary field, zero off W_n
};

inline BallData ball_data(const BoundaryAssignment& assignment, int n) {
  const FiniteTree& t = assignment.tree();
  if (n < 0 || n > t.depth()) {
    throw std::invalid_argument("gibbs oracle: depth " + std::to_string(n) + " outside the tree");
  }
  BallData d;
  d.count = t.ball_size(n);
  d.parent.assign(d.count, 0);
  d.field.assign(d.count, 0.0);
  for (std::size_t v = 1; v < d.count; ++v) {
    d.parent[v] = t.parent(v);
  }
  for (std::size_t v = t.level_begin(n); v < t.level_end(n); ++v) {
    d.field[v] = numeric_field(assignment, v);
  }
  return d;
}

inline double log_weight_mask(const BallData& d, double beta_j, std::uint64_t mask) {
  int agree = 0;
  for (std::size_t v = 1; v < d.count; ++v) {
    agree += (((mask >> v) ^ (mask >> d.parent[v])) & 1U) == 0 ? 1 : -1;
  }
  double field_term = 0.0;
  for (std::size_t v = 0; v < d.count; ++v) {
    if (d.field[v] != 0.0) {
      field_term += ((mask >> v) & 1U) ? d.field[v] : -d.field[v];
    }
  }
  return beta_j * agree + field_term;
}

inline void check_capacity(std::size_t spins) {
  if (spins > kOracleSpinCap) {
    throw CapacityError("gibbs oracle: |V_n| = " + std::to_string(spins) + " exceeds the enumeration cap of " +
                        std::to_string(kOracleSpinCap) + " spins");
  }
}

}  // namespace detail

/// exp(beta J sum_{<x,y> in V_n} s_x s_y + sum_{x in W_n} h_x s_x).
inline double config_weight(const BoundaryAssignment& assignment, const Coupling& coupling,
                            const SpinConfig& sigma, int n) {
  const auto d = detail::ball_data(assignment, n);
  if (sigma.spins.size() != d.count) {
    throw std::invalid_argument("config_weight: configuration covers " + std::to_string(sigma.spins.size()) +
                                " vertices, V_n has " + std::to_string(d.count));
  }
  double lw = 0.0;
  for (std::size_t v = 0; v < d.count; ++v) {
    const int s = sigma.spins[v];
    if (s != 1 && s != -1) {
      throw std::invalid_argument("config_weight: spins must be +-1");
    }
    if (v > 0) {
      lw += coupling.beta_j() * s * sigma.spins[d.parent[v]];
    }
    lw += d.field[v] * s;
  }
  return std::exp(lw);
}

inline FiniteVolumeMeasure finite_volume_measure(const BoundaryAssignment& assignment, const Coupling& coupling,
                                                 int n) {
  const auto d = detail::ball_data(assignment, n);
  detail::check_capacity(d.count);
  const std::uint64_t total = std::uint64_t{1} << d.count;
  FiniteVolumeMeasure mu;
  mu.n = n;
  mu.num_spins = d.count;
  mu.weights.resize(total);
  double max_lw = -std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    const double lw = detail::log_weight_mask(d, coupling.beta_j(), mask);
    mu.weights[mask] = lw;
    max_lw = std::max(max_lw, lw);
  }
  mu.log_scale = max_lw;
  double z = 0.0;
  for (double& w : mu.weights) {
    w = std::exp(w - max_lw);
    z += w;
  }
  mu.z = z;
  return mu;
}

struct KolmogorovReport {
  double max_discrepancy = 0.0;
  bool pass = true;
};

inline constexpr double kKolmogorovTol = 1e-12;

/// max over sigma_{n-1} of |sum_{omega_n} mu_n(sigma_{n-1}, omega_n) - mu_{n-1}(sigma_{n-1})|.
inline KolmogorovReport check_kolmogorov(const FiniteVolumeMeasure& mu_n, const FiniteVolumeMeasure& mu_prev,
                                         double tol = kKolmogorovTol) {
  if (mu_prev.n != mu_n.n - 1 || mu_prev.num_spins >= mu_n.num_spins) {
    throw MismatchError("check_kolmogorov: measures must have depths n and n-1 on the same tree");
  }
  const std::uint64_t low = (std::uint64_t{1} << mu_prev.num_spins) - 1;
  std::vector<double> marginal(std::size_t{1} << mu_prev.num_spins, 0.0);
  for (std::uint64_t mask = 0; mask < mu_n.weights.size(); ++mask) {
    marginal[mask & low] += mu_n.weights[mask];
  }
  KolmogorovReport rep;
  for (std::uint64_t s = 0; s < marginal.size(); ++s) {
    const double diff = std::fabs(marginal[s] / mu_n.z - mu_prev.probability(s));
    rep.max_discrepancy = std::max(rep.max_discrepancy, diff);
  }
  rep.pass = rep.max_discrepancy < tol;
  return rep;
}

struct MarginalRatio {
  // mu(sigma(root) = -1) / mu(sigma(root) = +1); +inf when the plus side
  // underflowed, with plus_underflow set.
  double ratio = 1.0;
  bool plus_underflow = false;
};

inline MarginalRatio root_marginal_ratio(const FiniteVolumeMeasure& mu) {
  double plus = 0.0;
  double minus = 0.0;
  for (std::uint64_t mask = 0; mask < mu.weights.size(); ++mask) {
    ((mask & 1U) ? plus : minus) += mu.weights[mask];
  }
  if (plus == 0.0) {
    return {std::numeric_limits<double>::infinity(), true};
  }
  return {minus / plus, false};
}

/// Variation distance at vertex z between the subtree measures with z's parent
/// pinned to +1 and to -1, alongside the free-parent ratio R_z. Enumerates the
/// subtree T_z truncated at level n, boundary field on W_n.
struct PinnedVariation {
  double variation = 0.0;
  double free_ratio = 1.0;
};

inline PinnedVariation parent_pinned_variation(const BoundaryAssignment& assignment, const Coupling& coupling,
                                               int n, Vertex z) {
  const BoundaryAssignment ball = truncate(assignment, n);
  const BoundaryAssignment sub = subtree_assignment(ball, z);
  const auto d = detail::ball_data(sub, sub.tree().depth());
  detail::check_capacity(d.count);
  const std::uint64_t total = std::uint64_t{1} << d.count;
  const double bj = coupling.beta_j();

  std::vector<double> lw(total);
  double max_lw = -std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    lw[mask] = detail::log_weight_mask(d, bj, mask);
    max_lw = std::max(max_lw, lw[mask] + std::fabs(bj));
  }
  // Plus-probability at z with the parent pinned to s (s = 0: edge erased).
  auto plus_prob = [&](int s, double& minus_over_plus) {
    double plus = 0.0;
    double minus = 0.0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      const int sz = (mask & 1U) ? 1 : -1;
      const double w = std::exp(lw[mask] + bj * s * sz - max_lw);
      (sz > 0 ? plus : minus) += w;
    }
    minus_over_plus = minus / plus;
    return plus / (plus + minus);
  };
  PinnedVariation out;
  double dummy = 0.0;
  const double p_up = plus_prob(+1, dummy);
  const double p_down = plus_prob(-1, dummy);
  plus_prob(0, out.free_ratio);
  // Two-point variation distance: half the L1 distance of the marginals.
  out.variation = 0.5 * (std::fabs(p_up - p_down) + std::fabs((1.0 - p_up) - (1.0 - p_down)));
  return out;
}

}  // namespace cayley_gibbs
