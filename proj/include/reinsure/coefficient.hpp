#ifndef REINSURE_COEFFICIENT_HPP
#define REINSURE_COEFFICIENT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace reinsure {

/// Deterministic, continuous function of time used for every model coefficient.
///
/// Either a constant or a piecewise-linear table. Tables are extended flat
/// beyond their first and last knot, so the function is defined on the whole
/// real line and in particular on [0, T1].
class CoefficientFn {
 public:
  struct Knot {
    double t;
    double value;
  };

  CoefficientFn() = default;
  // Implicit on purpose: `CoefficientFn sigma0 = 0.01;` reads naturally.
  CoefficientFn(double value) : constant_(value) {}

  static CoefficientFn constant(double value) { return CoefficientFn(value); }

  static CoefficientFn piecewise_linear(std::vector<Knot> knots) {
    if (knots.size() < 2) {
      throw std::invalid_argument("piecewise-linear coefficient needs at least two knots");
    }
    for (std::size_t i = 0; i < knots.size(); ++i) {
      if (!std::isfinite(knots[i].t) || !std::isfinite(knots[i].value)) {
        throw std::invalid_argument("piecewise-linear coefficient has a non-finite knot");
      }
      if (i > 0 && !(knots[i].t > knots[i - 1].t)) {
        throw std::invalid_argument("piecewise-linear breakpoints must be strictly increasing");
      }
    }
    CoefficientFn fn;
    fn.knots_ = std::move(knots);
    fn.primitive_.resize(fn.knots_.size(), 0.0);
    for (std::size_t i = 1; i < fn.knots_.size(); ++i) {
      const auto& a = fn.knots_[i - 1];
      const auto& b = fn.knots_[i];
      fn.primitive_[i] = fn.primitive_[i - 1] + 0.5 * (a.value + b.value) * (b.t - a.t);
    }
    return fn;
  }

  /// Pointwise `wa * a(t) + wb * b(t)`, exact: the result is piecewise linear
  /// on the union of both breakpoint sets.
  static CoefficientFn linear_combination(double wa, const CoefficientFn& a, double wb,
                                          const CoefficientFn& b) {
    if (a.is_constant() && b.is_constant()) {
      return CoefficientFn(wa * a.constant_ + wb * b.constant_);
    }
    std::vector<double> times;
    for (const auto& k : a.knots_) times.push_back(k.t);
    for (const auto& k : b.knots_) times.push_back(k.t);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    std::vector<Knot> knots;
    knots.reserve(times.size());
    for (double t : times) knots.push_back({t, wa * a(t) + wb * b(t)});
    if (knots.size() == 1) return CoefficientFn(knots.front().value);
    return piecewise_linear(std::move(knots));
  }

  bool is_constant() const { return knots_.empty(); }
  const std::vector<Knot>& knots() const { return knots_; }

  double operator()(double t) const {
    if (knots_.empty()) return constant_;
    if (t <= knots_.front().t) return knots_.front().value;
    if (t >= knots_.back().t) return knots_.back().value;
    const std::size_t i = segment(t);
    const auto& a = knots_[i];
    const auto& b = knots_[i + 1];
    const double w = (t - a.t) / (b.t - a.t);
    return a.value + w * (b.value - a.value);
  }

  /// Exact integral over [a, b] (a > b gives the negated integral).
  double integral(double a, double b) const {
    if (knots_.empty()) return constant_ * (b - a);
    return primitive(b) - primitive(a);
  }

  /// Smallest value taken on [a, b]; extremes of a piecewise-linear function
  /// sit at the endpoints or at interior knots.
  double min_on(double a, double b) const { return extreme_on(a, b, false); }
  double max_on(double a, double b) const { return extreme_on(a, b, true); }

 private:
  std::size_t segment(double t) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                               [](double x, const Knot& k) { return x < k.t; });
    return static_cast<std::size_t>(std::distance(knots_.begin(), it)) - 1;
  }

  double primitive(double t) const {
    const auto& first = knots_.front();
    const auto& last = knots_.back();
    if (t <= first.t) return (t - first.t) * first.value;
    if (t >= last.t) return primitive_.back() + (t - last.t) * last.value;
    const std::size_t i = segment(t);
    const double v = (*this)(t);
    return primitive_[i] + 0.5 * (knots_[i].value + v) * (t - knots_[i].t);
  }

  double extreme_on(double a, double b, bool want_max) const {
    double best = (*this)(a);
    auto take = [&](double v) { best = want_max ? std::max(best, v) : std::min(best, v); };
    take((*this)(b));
    for (const auto& k : knots_) {
      if (k.t > a && k.t < b) take(k.value);
    }
    return best;
  }

  double constant_ = 0.0;
  std::vector<Knot> knots_;
  std::vector<double> primitive_;
};

}  // namespace reinsure

#endif  // REINSURE_COEFFICIENT_HPP
