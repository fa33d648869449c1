#pragma once

// Upper bounds on the disagreement-percolation quantities kappa and gamma of a
// four-valued Gibbs measure, and the sufficient extremality test
// k * kappa * gamma < 1.

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cayley_gibbs/field_pair.hpp"
#include "cayley_gibbs/scheme.hpp"
#include "cayley_gibbs/solver.hpp"
#include "cayley_gibbs/special_functions.hpp"

namespace cayley_gibbs {

class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Verdict { ExtremeCertified, Inconclusive };
enum class KappaMethod { GenericKBeta, RefinedOverK };

/// alpha in F(x) = (alpha + x)/(1 + alpha x). Only DoubleCoupling turns the
/// exponentiated system into an exact restatement of the field equations;
/// SingleCoupling is kept to document the alternative.
enum class AlphaConvention {
  DoubleCoupling,  // alpha = exp(-2 beta J)
  SingleCoupling,  // alpha = exp(-beta J)
};

inline std::string_view to_string(Verdict v) {
  return v == Verdict::ExtremeCertified ? "ExtremeCertified" : "Inconclusive";
}

inline std::string_view to_string(KappaMethod m) {
  return m == KappaMethod::GenericKBeta ? "GenericKBeta" : "RefinedOverK";
}

struct ExtremalityReport {
  double kappa_bound = 0.0;
  double gamma_bound = 0.0;
  double product = 0.0;  // k * kappa * gamma
  Verdict verdict = Verdict::Inconclusive;
  KappaMethod method = KappaMethod::GenericKBeta;
};

namespace detail {

inline void require_ferromagnetic(const Coupling& coupling) {
  if (!(coupling.J() > 0.0)) {
    throw DomainError("extremality bounds are stated for the ferromagnetic model (J > 0)");
  }
}

}  // namespace detail

inline double alpha_of(const Coupling& coupling, AlphaConvention convention) {
  detail::require_ferromagnetic(coupling);
  const double x = coupling.beta_j();
  return convention == AlphaConvention::DoubleCoupling ? std::exp(-2.0 * x) : std::exp(-x);
}

/// Universal bound gamma <= K_beta(1) = theta.
inline double gamma_bound(const Coupling& coupling) {
  detail::require_ferromagnetic(coupling);
  return coupling.theta();
}

/// kappa <= max K_beta(s) over s in {e^{2h}, e^{-2h}, e^{2l}, e^{-2l}}.
inline double kappa_bound_generic(const Coupling& coupling, const FieldPair& solution) {
  detail::require_ferromagnetic(coupling);
  return std::max(k_beta_of_field(coupling, solution.h), k_beta_of_field(coupling, solution.l));
}

/// J(x) = F(x)^k.
inline double big_j(double alpha, int k, double x) { return std::pow(big_f(alpha, x), k); }

/// J'(x) = k F(x)^{k-1} F'(x).
inline double big_j_prime(double alpha, int k, double x) {
  return k * std::pow(big_f(alpha, x), k - 1) * big_f_prime(alpha, x);
}

/// (1/k) * (A / J(A)) * J'(A) with alpha = e^{-2 beta J}. Algebraically equal
/// to K_beta(A) for every A > 0.
///
/// Only evaluated inside the regime theta > 1/k, 0 < h <= h*, where
/// A = e^{2h} and h* is the positive root of h = k f_theta(h). Outside it a
/// RegimeError is thrown. Inside the regime the value is NOT always below 1/k:
/// it exceeds 1/k for h close to 0 because J'(1) = k theta > 1 there.
inline double kappa_bound_refined(const Coupling& coupling, int k, double big_a,
                                  const SolverConfig& cfg = {}) {
  detail::require_ferromagnetic(coupling);
  if (k < 1) {
    throw std::invalid_argument("kappa_bound_refined: k must be at least 1");
  }
  if (!(big_a > 0.0) || !std::isfinite(big_a)) {
    throw DomainError("kappa_bound_refined: A must be positive and finite");
  }
  const double theta = coupling.theta();
  if (!(k * theta > 1.0)) {
    throw RegimeError("kappa_bound_refined: requires theta > 1/k");
  }
  const double h = 0.5 * std::fabs(std::log(big_a));
  const double h_star = solve_scalar(k, theta, cfg).back();
  if (h > h_star + 1e-9) {
    throw RegimeError("kappa_bound_refined: h = " + std::to_string(h) + " exceeds h* = " + std::to_string(h_star));
  }
  const double alpha = alpha_of(coupling, AlphaConvention::DoubleCoupling);
  return (1.0 / k) * (big_a / big_j(alpha, k, big_a)) * big_j_prime(alpha, k, big_a);
}

/// ExtremeCertified iff k * kappa * gamma < 1. The test is sufficient only;
/// Inconclusive makes no claim of non-extremality.
inline ExtremalityReport certify(int k, double kappa, double gamma,
                                 KappaMethod method = KappaMethod::GenericKBeta) {
  if (!(kappa >= 0.0 && kappa < 1.0) || !(gamma >= 0.0 && gamma < 1.0)) {
    throw DomainError("certify: kappa and gamma must lie in [0, 1)");
  }
  ExtremalityReport rep;
  rep.kappa_bound = kappa;
  rep.gamma_bound = gamma;
  rep.product = k * kappa * gamma;
  rep.verdict = rep.product < 1.0 ? Verdict::ExtremeCertified : Verdict::Inconclusive;
  rep.method = method;
  return rep;
}

enum class SolutionSigns { ZeroComponent, BothPositive, Mixed };

struct Theorem2Assessment {
  Verdict verdict = Verdict::Inconclusive;
  SolutionSigns signs = SolutionSigns::ZeroComponent;
  ExtremalityReport report;
  // For BothPositive: whether the evaluated kappa is actually <= 1/k.
  bool kappa_within_one_over_k = false;
};

inline constexpr double kZeroFieldTol = 1e-9;

/// Extremality windows for a solution (h, l) at theta > 0.
///
/// One component zero: kappa = gamma = theta, certified iff
/// 1/k < theta < 1/sqrt(k). Both components of one sign: kappa is evaluated
/// through the J-formula (refined regime) and certified iff the resulting
/// k * kappa * theta < 1; when the regime check fails the generic bound is
/// used. Mixed signs: generic bound.
inline Theorem2Assessment theorem2_windows(int k, double theta, FieldPair solution,
                                           const SolverConfig& cfg = {}) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw DomainError("theorem2_windows: theta must lie in (0, 1)");
  }
  if (k < 1) {
    throw std::invalid_argument("theorem2_windows: k must be at least 1");
  }
  const Coupling coupling = Coupling::from_theta(theta);
  Theorem2Assessment out;

  if (std::fabs(solution.h) <= kZeroFieldTol || std::fabs(solution.l) <= kZeroFieldTol) {
    out.signs = SolutionSigns::ZeroComponent;
    out.report = certify(k, theta, theta);
    const bool window = k * theta > 1.0 && out.report.product < 1.0;
    out.report.verdict = window ? Verdict::ExtremeCertified : Verdict::Inconclusive;
    out.verdict = out.report.verdict;
    return out;
  }

  if ((solution.h > 0.0) != (solution.l > 0.0)) {
    out.signs = SolutionSigns::Mixed;
    out.report = certify(k, kappa_bound_generic(coupling, solution), gamma_bound(coupling));
    out.verdict = out.report.verdict;
    return out;
  }

  out.signs = SolutionSigns::BothPositive;
  if (solution.h < 0.0) {
    solution = -solution;
  }
  double kappa = 0.0;
  KappaMethod method = KappaMethod::RefinedOverK;
  try {
    kappa = std::max(kappa_bound_refined(coupling, k, std::exp(2.0 * solution.h), cfg),
                     kappa_bound_refined(coupling, k, std::exp(2.0 * solution.l), cfg));
  } catch (const RegimeError&) {
    kappa = kappa_bound_generic(coupling, solution);
    method = KappaMethod::GenericKBeta;
  }
  out.report = certify(k, kappa, gamma_bound(coupling), method);
  out.kappa_within_one_over_k = kappa <= 1.0 / k;
  out.verdict = out.report.verdict;
  return out;
}

/// Relative residual of A = F(A)^{a1-a2} F(C)^{a3-a4}, C = F(A)^{b1-b2} F(C)^{b3-b4}
/// with A = e^{2h}, C = e^{2l}: max over both equations of |rhs / lhs - 1|,
/// evaluated in log space.
inline double exp_system_residual(const SchemeMatrix& m, const Coupling& coupling, const FieldPair& solution,
                                  AlphaConvention convention = AlphaConvention::DoubleCoupling) {
  const ReducedParams r = reduce(m);
  const double alpha = alpha_of(coupling, convention);
  const double log_fa = std::log(big_f(alpha, std::exp(2.0 * solution.h)));
  const double log_fc = std::log(big_f(alpha, std::exp(2.0 * solution.l)));
  const double e1 = std::expm1(r.a * log_fa + r.b * log_fc - 2.0 * solution.h);
  const double e2 = std::expm1(r.c * log_fa + r.d * log_fc - 2.0 * solution.l);
  return std::max(std::fabs(e1), std::fabs(e2));
}

}  // namespace cayley_gibbs
