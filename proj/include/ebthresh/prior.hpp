#pragma once

#include <stdexcept>
#include <string>

namespace ebthresh {

// Spike-and-slab slab densities: Laplace with scale a, or the quasi-Cauchy
// mixture (normal scale mixture with Beta(1/2, 1) mixing), which has no free
// scale. The marginal g is the convolution of the slab with the standard
// normal; all closed forms below are locked in by the quadrature oracle.

enum class PriorKind { Laplace, QuasiCauchy };

struct PriorSpec {
  PriorKind kind = PriorKind::Laplace;
  double scale = 0.5;  // Laplace only

  static PriorSpec laplace(double a) {
    if (!(a > 0.0)) throw std::invalid_argument("PriorSpec: Laplace scale must be > 0");
    return PriorSpec{PriorKind::Laplace, a};
  }
  static PriorSpec quasi_cauchy() { return PriorSpec{PriorKind::QuasiCauchy, 0.0}; }

  std::string name() const {
    if (kind == PriorKind::QuasiCauchy) return "cauchy";
    return "laplace(a=" + std::to_string(scale) + ")";
  }
};

// Slab density gamma(u).
double gamma_density(const PriorSpec& prior, double u);

// Marginal g(x) = (gamma * phi)(x), closed form, even in x.
double marginal_density(const PriorSpec& prior, double x);

// Adaptive-quadrature evaluation of the same convolution; the validation
// oracle for the closed forms. Absolute tolerance 1e-12.
double marginal_density_quadrature(const PriorSpec& prior, double x);

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// (log g)'(x); odd in x; bounded by the Laplace scale when the slab is Laplace.
double log_marginal_derivative(const PriorSpec& prior, double x);

// beta(x) = g(x)/phi(x) - 1. Overflows to +inf for |x| beyond ~37.7; use
// log_g_over_phi where the magnitude itself is needed at such x.
double beta_fn(const PriorSpec& prior, double x);

// log(g(x)/phi(x)) = log(1 + beta(x)), stable out to |x| well past 40.
double log_g_over_phi(const PriorSpec& prior, double x);

// beta(x, w) = beta(x) / (1 + w beta(x)); requires 0 < w <= 1.
double beta_w(const PriorSpec& prior, double x, double w);

}  // namespace ebthresh
