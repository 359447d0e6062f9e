#include <cmath>

#include "cortexenc/align.hpp"
#include "cortexenc/error.hpp"

namespace cortexenc::align {

namespace {

// Gamma density with shape a and scale b, evaluated in log space.
double gamma_pdf(double t, double a, double b) {
  if (t == 0.0) return a > 1.0 ? 0.0 : (a == 1.0 ? 1.0 / b : INFINITY);
  return std::exp((a - 1.0) * std::log(t) - t / b - a * std::log(b) - std::lgamma(a));
}

}  // namespace

double hrf(double t, const HrfParams& p) {
  require(t >= 0.0, ErrorKind::invalid_argument, "hrf is undefined for negative time");
  return gamma_pdf(t, p.peak_shape, p.scale) -
         p.undershoot_ratio * gamma_pdf(t, p.undershoot_shape, p.scale);
}

Eigen::VectorXd sample_hrf(double dt, const HrfParams& params) {
  require(dt > 0.0, ErrorKind::invalid_argument, "dt must be > 0");
  const auto n = static_cast<Eigen::Index>(std::floor(params.kernel_seconds / dt + 1e-9)) + 1;
  Eigen::VectorXd h(n);
  for (Eigen::Index i = 0; i < n; ++i) h(i) = hrf(static_cast<double>(i) * dt, params);
  return h;
}

}  // namespace cortexenc::align
