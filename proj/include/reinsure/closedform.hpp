#ifndef REINSURE_CLOSEDFORM_HPP
#define REINSURE_CLOSEDFORM_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "reinsure/models.hpp"
#include "reinsure/numerics.hpp"

namespace reinsure {

enum class RateKind { ho_lee, vasicek };

inline RateKind rate_kind(const MarketParams& params) {
  return params.rate.is_vasicek() ? RateKind::vasicek : RateKind::ho_lee;
}

inline const char* to_string(RateKind kind) {
  return kind == RateKind::vasicek ? "vasicek" : "holee";
}

namespace detail {

// Uniform node layout over [0, T] shared by the tabulated pieces below.
struct NodeLayout {
  double T = 0.0;
  int n = 0;

  double node(int j) const { return j == n ? T : T * static_cast<double>(j) / n; }

  // Index of the first node >= t.
  int ceil_index(double t) const {
    int j = static_cast<int>(std::ceil(t / T * n));
    j = std::clamp(j, 0, n);
    while (j < n && node(j) < t) ++j;
    while (j > 0 && node(j - 1) >= t) --j;
    return j;
  }
};

inline QuadratureSpec piece_spec(const QuadratureSpec& spec) { return {2, spec.rel_tol}; }

}  // namespace detail

/// k(t): loading of the short rate in the value function, k(T) = 0.
class KFunction {
 public:
  explicit KFunction(const MarketParams& params)
      : kind_(rate_kind(params)),
        p_(params.p),
        T_(params.T),
        b_hat_(params.rate.is_vasicek() ? params.rate.vasicek().b_hat : 0.0) {}

  double operator()(double t) const {
    if (kind_ == RateKind::vasicek) return -(p_ / b_hat_) * std::expm1(b_hat_ * (t - T_));
    return p_ * (T_ - t);
  }

 private:
  RateKind kind_;
  double p_;
  double T_;
  double b_hat_;
};

inline KFunction solve_k(const MarketParams& params) { return KFunction(params); }

/// A(t) = int_t^T exp(-int_t^s beta(v) dv) ds.
///
/// This is exp(int_0^t beta) int_t^T exp(-int_0^s beta) ds written without the
/// growing factor. Tabulated on a uniform node grid by backward recursion; an
/// arbitrary t is reached from the next node up with one short quadrature.
class InflationAnnuity {
 public:
  InflationAnnuity(CoefficientFn beta, double T, QuadratureSpec spec = {})
      : beta_(std::move(beta)), layout_{T, spec.panels}, spec_(spec) {
    if (spec.panels < 2 || spec.panels % 2 != 0) {
      throw std::invalid_argument("quadrature panels must be even and >= 2");
    }
    table_.assign(static_cast<std::size_t>(layout_.n) + 1, 0.0);
    for (int j = layout_.n - 1; j >= 0; --j) {
      table_[j] = step(layout_.node(j), layout_.node(j + 1), table_[j + 1]);
    }
  }

  double operator()(double t) const {
    detail::require_time(t, 0.0, layout_.T, "inflation annuity");
    const int j = layout_.ceil_index(t);
    if (layout_.node(j) == t) return table_[j];
    return step(t, layout_.node(j), table_[j]);
  }

  bool accurate() const { return accurate_; }

 private:
  // A(a) from A(b), a < b.
  double step(double a, double b, double tail) const {
    auto discount = [&](double s) { return std::exp(-beta_.integral(a, s)); };
    const auto piece = integrate(discount, a, b, detail::piece_spec(spec_));
    if (!piece.accurate) accurate_ = false;
    return piece.value + discount(b) * tail;
  }

  CoefficientFn beta_;
  detail::NodeLayout layout_;
  QuadratureSpec spec_;
  std::vector<double> table_;
  mutable bool accurate_ = true;
};

/// z(t) = -p A(t): loading of expected inflation in the value function.
class ZFunction {
 public:
  ZFunction(const MarketParams& params, QuadratureSpec spec = {})
      : p_(params.p), annuity_(params.inflation.beta, params.T, spec) {}

  double operator()(double t) const { return -p_ * annuity_(t); }
  const InflationAnnuity& annuity() const { return annuity_; }

 private:
  double p_;
  InflationAnnuity annuity_;
};

inline ZFunction solve_z(const MarketParams& params, QuadratureSpec spec = {}) {
  return ZFunction(params, spec);
}

/// h(t): the time-only aggregate left after the r and I terms of the HJB
/// equation are cancelled by k and z. Vasicek uses theta + b xi as the drift level.
class HFunction {
 public:
  HFunction(MarketParams params, std::function<double(double)> k,
            std::function<double(double)> z)
      : params_(std::move(params)), k_(std::move(k)), z_(std::move(z)) {
    if (params_.p == 1.0) throw std::invalid_argument("h(t) is undefined for p = 1");
  }

  double operator()(double t) const {
    const auto& P = params_;
    const double p = P.p;
    const double q = p - 1.0;
    const double b = P.rate.b;
    const double rho = P.rho;
    const double s0 = P.inflation.sigma0(t);
    const double sb = P.inflation.sigma0_bar(t);
    const double alpha = P.inflation.alpha(t);
    const double beta = P.inflation.beta(t);
    const double lam = P.stock.lambda(t);
    const double c = P.surplus.c(t);
    const double s3 = P.surplus.sigma3(t);
    if (s3 == 0.0) throw std::invalid_argument("h(t) is undefined for sigma3 = 0");
    const double et = eta(P, t);
    const double a = rate_drift_level(P.rate, t);
    const double k = k_(t);
    const double z = z_(t);

    double h = s0 * s0 + 0.5 * q * s0 * s0;
    h += a * k / p;
    h += b * b * k * k / (2.0 * p);
    h += alpha * beta * z / p;
    h += sb * sb * z * z / (2.0 * p);
    h -= sb * s0 * z;
    h -= k * rho * s0 * b;
    h += b * rho * sb * k * z / p;
    h -= et * et / (2.0 * q);
    h -= 0.5 * q * rho * rho * s0 * s0;
    h -= rho * rho * sb * sb * z * z / (2.0 * q);
    h -= b * b * k * k / (2.0 * q);
    h += s0 * rho * et;
    h -= et * rho * sb * z / q;
    h -= et * b * k / q;
    h += sb * s0 * rho * rho * z;
    h += s0 * b * rho * k;
    h -= sb * rho * b * k * z / q;
    h -= lam * lam / (2.0 * q);
    h -= c * c / (2.0 * s3 * s3 * q);
    return h;
  }

 private:
  MarketParams params_;
  std::function<double(double)> k_;
  std::function<double(double)> z_;
};

inline HFunction solve_h(const MarketParams& params, std::function<double(double)> k,
                         std::function<double(double)> z) {
  return HFunction(params, std::move(k), std::move(z));
}

/// H_shift(t) = H(t) - H(T) = -int_t^T h, and f(t) = exp(-p H_shift(t)).
class FSolution {
 public:
  FSolution(const MarketParams& params, std::function<double(double)> h, QuadratureSpec spec = {})
      : h_(std::move(h)), p_(params.p), layout_{params.T, spec.panels}, spec_(spec) {
    if (spec.panels < 2 || spec.panels % 2 != 0) {
      throw std::invalid_argument("quadrature panels must be even and >= 2");
    }
    shift_.assign(static_cast<std::size_t>(layout_.n) + 1, 0.0);
    for (int j = layout_.n - 1; j >= 0; --j) {
      shift_[j] = shift_[j + 1] - piece(layout_.node(j), layout_.node(j + 1));
    }
  }

  double H_shift(double t) const {
    detail::require_time(t, 0.0, layout_.T, "H_shift");
    const int j = layout_.ceil_index(t);
    if (layout_.node(j) == t) return shift_[j];
    return shift_[j] - piece(t, layout_.node(j));
  }

  double f(double t) const { return std::exp(-p_ * H_shift(t)); }
  double operator()(double t) const { return f(t); }
  bool accurate() const { return accurate_; }

 private:
  double piece(double a, double b) const {
    const auto r = integrate(h_, a, b, detail::piece_spec(spec_));
    if (!r.accurate) accurate_ = false;
    return r.value;
  }

  std::function<double(double)> h_;
  double p_;
  detail::NodeLayout layout_;
  QuadratureSpec spec_;
  std::vector<double> shift_;
  mutable bool accurate_ = true;
};

inline FSolution solve_f(const MarketParams& params, std::function<double(double)> h,
                         QuadratureSpec spec = {}) {
  return FSolution(params, std::move(h), spec);
}

/// Every time-only function of the value-function ansatz for one parameter set.
/// Immutable after construction; evaluation is safe from concurrent threads.
class AncillarySolution {
 public:
  explicit AncillarySolution(MarketParams params, QuadratureSpec spec = {})
      : params_(std::move(params)),
        k_(params_),
        z_(params_, spec),
        h_(params_, [k = k_](double t) { return k(t); },
           [z = std::cref(z_)](double t) { return z.get()(t); }),
        f_(params_, [h = std::cref(h_)](double t) { return h.get()(t); }, spec) {}

  AncillarySolution(const AncillarySolution&) = delete;
  AncillarySolution& operator=(const AncillarySolution&) = delete;

  RateKind model() const { return rate_kind(params_); }
  const MarketParams& params() const { return params_; }

  double k(double t) const { return k_(t); }
  double z(double t) const { return z_(t); }
  double h(double t) const { return h_(t); }
  double H_shift(double t) const { return f_.H_shift(t); }
  double f(double t) const { return f_.f(t); }
  double inflation_annuity(double t) const { return z_.annuity()(t); }

  bool quadrature_accurate() const { return z_.annuity().accurate() && f_.accurate(); }

 private:
  MarketParams params_;
  KFunction k_;
  ZFunction z_;
  HFunction h_;
  FSolution f_;
};

struct ValueQuery {
  double t = 0.0;
  double x = 1.0;
  double r = 0.0;
  double I = 0.0;
};

/// Candidate value function G(t, x, r, I) = f(t) exp(k r + z I) x^p / p.
inline double value_function(const AncillarySolution& sol, const ValueQuery& q) {
  if (!(q.x > 0.0)) throw std::domain_error("value_function: wealth must be positive");
  const auto& P = sol.params();
  detail::require_time(q.t, 0.0, P.T, "value_function");
  return sol.f(q.t) * std::exp(sol.k(q.t) * q.r + sol.z(q.t) * q.I) * std::pow(q.x, P.p) / P.p;
}

struct PolicyPoint {
  double pi1 = 0.0;      // bond proportion
  double pi2 = 0.0;      // stock proportion
  double u_ratio = 0.0;  // retention per unit of wealth
  double u = 0.0;        // retention at the queried wealth
};

/// Optimal bond/stock proportions and reinsurance retention at (t, x).
///
/// The bond proportion is
///   -eta/(s1 (p-1)) - b/s1 * p/(p-1) * D(t) + rho s0/s1 + rho sb/s1 * p/(p-1) * A(t)
/// with D(t) = T - t (Ho-Lee) or (1 - exp(b_hat (t - T))) / b_hat (Vasicek)
/// and A the inflation annuity.
inline PolicyPoint optimal_policy(const AncillarySolution& sol, double t, double x) {
  if (!(x > 0.0)) throw std::domain_error("optimal_policy: wealth must be positive");
  const auto& P = sol.params();
  detail::require_time(t, 0.0, P.T, "optimal_policy");
  const double p = P.p;
  const double q = p - 1.0;
  const double ratio = p / q;
  const double b = P.rate.b;
  const double s1 = bond_vol(P.rate, t, P.T1);
  const double s0 = P.inflation.sigma0(t);
  const double sb = P.inflation.sigma0_bar(t);

  double decay = P.T - t;
  if (P.rate.is_vasicek()) {
    const double bh = P.rate.vasicek().b_hat;
    decay = -std::expm1(bh * (t - P.T)) / bh;
  }

  PolicyPoint out;
  out.pi1 = -(eta(P, t) / s1) / q - (b / s1) * ratio * decay + P.rho * s0 / s1 +
            (P.rho * sb / s1) * ratio * sol.inflation_annuity(t);
  out.pi2 = -(P.stock.lambda(t) / P.stock.sigma2(t)) / q;
  const double s3 = P.surplus.sigma3(t);
  out.u_ratio = -P.surplus.c(t) / (s3 * s3 * q);
  out.u = out.u_ratio * x;
  return out;
}

/// Grid points in [0, T] where an optimal proportion exceeds the admissibility bound.
inline std::vector<std::string> policy_bound_warnings(const AncillarySolution& sol,
                                                      int points = 1000) {
  std::vector<std::string> out;
  const auto& P = sol.params();
  for (int i = 0; i <= points; ++i) {
    const double t = (i == points) ? P.T : P.T * i / points;
    const auto pol = optimal_policy(sol, t, P.X0);
    if (!(std::abs(pol.pi1) <= P.pi_bound_delta) || !(std::abs(pol.pi2) <= P.pi_bound_delta)) {
      out.push_back("optimal proportion exceeds delta at t = " + std::to_string(t));
    }
  }
  return out;
}

}  // namespace reinsure

#endif  // REINSURE_CLOSEDFORM_HPP
