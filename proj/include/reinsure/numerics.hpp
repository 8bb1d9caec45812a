#ifndef REINSURE_NUMERICS_HPP
#define REINSURE_NUMERICS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace reinsure {

struct QuadratureSpec {
  int panels = 2048;  // composite-Simpson subintervals, even and >= 2
  double rel_tol = 1e-10;
};

struct QuadratureResult {
  double value = 0.0;
  double refinement_change = 0.0;  // |S(2n) - S(n)|
  bool accurate = true;            // refinement_change < rel_tol (1 + |value|)
};

class EvaluationError : public std::runtime_error {
 public:
  explicit EvaluationError(double abscissa)
      : std::runtime_error("integrand is not finite at s = " + std::to_string(abscissa)),
        abscissa_(abscissa) {}
  double abscissa() const { return abscissa_; }

 private:
  double abscissa_;
};

/// Composite Simpson on [a, b] with a panel-doubling check.
///
/// The integrand is sampled once on the doubled grid; the coarse estimate
/// reuses every other node. The returned value is the doubled-grid estimate.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
  if (spec.panels < 2 || spec.panels % 2 != 0) {
    throw std::invalid_argument("quadrature panels must be even and >= 2");
  }
  if (!(a <= b)) throw std::invalid_argument("integrate: requires a <= b");
  if (a == b) return {};

  const int fine = 2 * spec.panels;
  const double h = (b - a) / fine;
  auto sample = [&](int i) {
    const double s = (i == fine) ? b : a + i * h;
    const double v = f(s);
    if (!std::isfinite(v)) throw EvaluationError(s);
    return v;
  };

  // Fine grid: nodes 0..fine. Coarse grid uses even nodes only.
  double ends = sample(0) + sample(fine);
  double odd_fine = 0.0;  // fine nodes with i % 2 == 1
  double odd_coarse = 0.0;  // i % 4 == 2: odd nodes of the coarse grid
  double even_coarse = 0.0;  // i % 4 == 0, interior
  for (int i = 1; i < fine; ++i) {
    const double v = sample(i);
    if (i % 2 == 1) {
      odd_fine += v;
    } else if (i % 4 == 2) {
      odd_coarse += v;
    } else {
      even_coarse += v;
    }
  }
  const double coarse = (2.0 * h / 3.0) * (ends + 4.0 * odd_coarse + 2.0 * even_coarse);
  const double refined = (h / 3.0) * (ends + 4.0 * odd_fine + 2.0 * (odd_coarse + even_coarse));

  QuadratureResult out;
  out.value = refined;
  out.refinement_change = std::abs(refined - coarse);
  out.accurate = out.refinement_change < spec.rel_tol * (1.0 + std::abs(refined));
  return out;
}

/// Central-difference derivative (fn(t+h) - fn(t-h)) / 2h, used to check ODE residuals.
/// The stencil must stay inside [lo, hi].
template <class F>
double central_difference(F&& fn, double t, double h,
                          double lo = -std::numeric_limits<double>::infinity(),
                          double hi = std::numeric_limits<double>::infinity()) {
  if (!(h > 0.0)) throw std::invalid_argument("central_difference: step must be positive");
  if (t - h < lo || t + h > hi) {
    throw std::domain_error("central_difference: stencil [" + std::to_string(t - h) + ", " +
                            std::to_string(t + h) + "] leaves the domain");
  }
  return (fn(t + h) - fn(t - h)) / (2.0 * h);
}

template <class F>
double ode_residual(F&& fn, double t, double h,
                    double lo = -std::numeric_limits<double>::infinity(),
                    double hi = std::numeric_limits<double>::infinity()) {
  return central_difference(std::forward<F>(fn), t, h, lo, hi);
}

inline double default_residual_step(double horizon) { return 1e-5 * std::max(1.0, horizon); }

/// Step for differencing a function that locally grows like exp(rate * t). The
/// central-difference error is about |rate|^3 step^2 / 6 relative to the value, so
/// the step shrinks with the rate; rounding stays far below it.
inline double residual_step(double horizon, double rate) {
  return std::min(default_residual_step(horizon), 1e-3 / std::pow(1.0 + std::abs(rate), 1.5));
}

}  // namespace reinsure

#endif  // REINSURE_NUMERICS_HPP
