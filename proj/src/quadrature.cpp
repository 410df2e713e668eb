#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "ebthresh/normal.hpp"
#include "ebthresh/prior.hpp"

namespace ebthresh {

double marginal_density_quadrature(const PriorSpec& prior, double x) {
  x = std::fabs(x);
  if (!std::isfinite(x))
    throw QuadratureError("marginal_density_quadrature: non-finite argument");
  boost::math::quadrature::tanh_sinh<double> integrator;
  const auto f = [&](double u) { return gamma_density(prior, u) * phi(x - u); };
  // gamma has a kink at 0 and the integrand peaks near x; split there and
  // truncate where the normal factor is far below the 1e-12 target.
  const double lo = -(x + 42.0), hi = x + 42.0;
  double result = 0.0, err = 0.0;
  try {
    double err1 = 0, err2 = 0, err3 = 0;
    result = integrator.integrate(f, lo, 0.0, 1e-13, &err1);
    result += integrator.integrate(f, 0.0, x > 0.0 ? x : hi, 1e-13, &err2);
    if (x > 0.0) result += integrator.integrate(f, x, hi, 1e-13, &err3);
    err = err1 + err2 + err3;
  } catch (const std::exception& e) {
    throw QuadratureError(std::string("marginal_density_quadrature: ") + e.what());
  }
  if (!(std::isfinite(result)) || err > 1e-12 * std::max(1.0, result) + 1e-14)
    throw QuadratureError("marginal_density_quadrature did not converge");
  return result;
}

}  // namespace ebthresh
