#pragma once

// Scalar kernels of the Ising recursion on Cayley trees: the tree map
// f_theta(h) = arctanh(theta * tanh h), its derivatives, the variation-distance
// kernel K_beta and the Moebius map F used by the extremality bounds.

#include <cmath>
#include <stdexcept>
#include <string>

namespace cayley_gibbs {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Largest |x| accepted by arctanh. Inputs closer to 1 are rejected rather than
/// clamped.
inline constexpr double kArctanhLimit = 1.0 - 1e-15;

inline double arctanh(double x) {
  if (!(std::fabs(x) < kArctanhLimit)) {
    throw DomainError("arctanh: argument " + std::to_string(x) + " outside (-1, 1)");
  }
  return std::atanh(x);
}

/// Interaction J, inverse temperature beta and theta = tanh(beta * J).
class Coupling {
 public:
  static Coupling make(double J, double beta) {
    if (!std::isfinite(J) || !std::isfinite(beta)) {
      throw DomainError("coupling: J and beta must be finite");
    }
    if (!(beta > 0.0)) {
      throw DomainError("coupling: beta must be positive");
    }
    const double theta = std::tanh(beta * J);
    if (!(std::fabs(theta) < 1.0)) {
      throw DomainError("coupling: beta*J too large, theta saturates at +-1");
    }
    return Coupling(J, beta, theta);
  }

  /// Coupling with beta = 1 and J = arctanh(theta).
  static Coupling from_theta(double theta) {
    return make(arctanh(theta), 1.0);
  }

  double J() const { return J_; }
  double beta() const { return beta_; }
  double theta() const { return theta_; }
  double beta_j() const { return beta_ * J_; }

 private:
  Coupling(double J, double beta, double theta) : J_(J), beta_(beta), theta_(theta) {}

  double J_;
  double beta_;
  double theta_;
};

namespace detail {

inline void check_theta(double theta) {
  if (!(std::fabs(theta) < 1.0)) {
    throw DomainError("theta must lie in the open interval (-1, 1)");
  }
}

inline void check_finite(double h) {
  if (!std::isfinite(h)) {
    throw DomainError("field value must be finite");
  }
}

}  // namespace detail

/// Tree recursion kernel f_theta(h) = arctanh(theta * tanh h).
inline double f_theta(double theta, double h) {
  detail::check_theta(theta);
  detail::check_finite(h);
  return arctanh(theta * std::tanh(h));
}

/// d/dh f_theta(h) = theta sech^2(h) / (1 - theta^2 tanh^2 h).
inline double f_theta_prime(double theta, double h) {
  detail::check_theta(theta);
  detail::check_finite(h);
  const double t = std::tanh(h);
  const double c = std::cosh(h);
  return theta / (c * c) / (1.0 - theta * theta * t * t);
}

// Second derivative, used by the concavity diagnostics:
// -2 theta (1 - theta^2) sech^2 h tanh h / (1 - theta^2 tanh^2 h)^2.
inline double f_theta_second(double theta, double h) {
  detail::check_theta(theta);
  detail::check_finite(h);
  const double t = std::tanh(h);
  const double c = std::cosh(h);
  const double den = 1.0 - theta * theta * t * t;
  return -2.0 * theta * (1.0 - theta * theta) * t / (c * c) / (den * den);
}

/// K_beta(a) = 1/(e^{-2 beta J} a + 1) - 1/(e^{2 beta J} a + 1), a >= 0.
/// Maximal at a = 1 where it equals theta (for J > 0).
inline double k_beta(const Coupling& coupling, double a) {
  if (!(a >= 0.0)) {
    throw DomainError("k_beta: argument must be non-negative");
  }
  const double x = 2.0 * coupling.beta_j();
  return 1.0 / (std::exp(-x) * a + 1.0) - 1.0 / (std::exp(x) * a + 1.0);
}

/// K_beta(e^{2h}) evaluated without forming e^{2h}:
/// (tanh(beta J - h) + tanh(beta J + h)) / 2. Even in h.
inline double k_beta_of_field(const Coupling& coupling, double h) {
  detail::check_finite(h);
  const double bj = coupling.beta_j();
  return 0.5 * (std::tanh(bj - h) + std::tanh(bj + h));
}

/// Moebius map F(x) = (alpha + x) / (1 + alpha x) on [0, inf), 0 < alpha < 1.
/// With alpha = e^{-2 beta J}, F(e^{2h}) = e^{2 f_theta(h)}.
inline double big_f(double alpha, double x) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("big_f: alpha must lie in (0, 1)");
  }
  if (!(x >= 0.0)) {
    throw DomainError("big_f: argument must be non-negative");
  }
  if (std::isinf(x)) {
    return 1.0 / alpha;
  }
  return (alpha + x) / (1.0 + alpha * x);
}

/// F'(x) = (1 - alpha^2) / (1 + alpha x)^2.
inline double big_f_prime(double alpha, double x) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("big_f_prime: alpha must lie in (0, 1)");
  }
  if (!(x >= 0.0)) {
    throw DomainError("big_f_prime: argument must be non-negative");
  }
  const double den = 1.0 + alpha * x;
  return (1.0 - alpha * alpha) / (den * den);
}

}  // namespace cayley_gibbs
