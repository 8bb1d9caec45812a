#ifndef REINSURE_MODELS_HPP
#define REINSURE_MODELS_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "reinsure/coefficient.hpp"

namespace reinsure {

// Expected-inflation OU process and price index.
struct InflationParams {
  CoefficientFn alpha;       // long-run mean of the inflation rate
  CoefficientFn beta;        // mean-reversion speed, >= 0
  CoefficientFn sigma0;      // price-index volatility
  CoefficientFn sigma0_bar;  // inflation-rate volatility
  double I0 = 0.0;
  double Pi0 = 1.0;
};

struct HoLee {
  CoefficientFn a_tilde;
};

struct Vasicek {
  CoefficientFn theta;
  double b_hat = 0.05;
};

struct RateModel {
  std::variant<HoLee, Vasicek> kind;
  double b = 0.05;   // rate diffusion
  CoefficientFn xi;  // bond risk premium
  double r0 = 0.0;

  bool is_vasicek() const { return std::holds_alternative<Vasicek>(kind); }
  const Vasicek& vasicek() const { return std::get<Vasicek>(kind); }
  const HoLee& ho_lee() const { return std::get<HoLee>(kind); }
};

struct StockParams {
  CoefficientFn lambda;  // risk premium per unit of stock volatility
  CoefficientFn sigma2;
  double S0 = 1.0;
};

struct SurplusParams {
  CoefficientFn c;       // real premium rate
  CoefficientFn sigma3;  // claim volatility
  double R0 = 0.0;
};

struct MarketParams {
  RateModel rate;
  InflationParams inflation;
  StockParams stock;
  SurplusParams surplus;
  double rho = 0.0;  // correlation of the rate and price-index noises
  double T = 1.0;    // investment horizon, years
  double T1 = 2.0;   // bond maturity
  double p = 0.5;    // utility exponent, U(x) = x^p / p
  double X0 = 1.0;
  double pi_bound_delta = 1e6;
};

namespace detail {

inline void require_time(double t, double lo, double hi, const char* what) {
  if (!(t >= lo && t <= hi)) {
    throw std::domain_error(std::string(what) + ": t = " + std::to_string(t) + " outside [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

}  // namespace detail

/// Drift a(t, r) of the short rate.
inline double rate_drift(const RateModel& model, double t, double r, double T1) {
  detail::require_time(t, 0.0, T1, "rate_drift");
  if (model.is_vasicek()) {
    const auto& v = model.vasicek();
    return v.theta(t) - v.b_hat * r + model.b * model.xi(t);
  }
  return model.ho_lee().a_tilde(t) + model.b * model.xi(t);
}

/// The r-free part of the rate drift: a~(t) + b xi(t) or theta(t) + b xi(t).
inline double rate_drift_level(const RateModel& model, double t) {
  if (model.is_vasicek()) return model.vasicek().theta(t) + model.b * model.xi(t);
  return model.ho_lee().a_tilde(t) + model.b * model.xi(t);
}

/// Volatility sigma1(t) of the zero-coupon bond maturing at T1. Negative before maturity.
inline double bond_vol(const RateModel& model, double t, double T1) {
  detail::require_time(t, 0.0, T1, "bond_vol");
  if (model.is_vasicek()) {
    const double bh = model.vasicek().b_hat;
    return (model.b / bh) * std::expm1(-bh * (T1 - t));
  }
  return -model.b * (T1 - t);
}

inline double eta(const MarketParams& params, double t) {
  detail::require_time(t, 0.0, params.T, "eta");
  return params.rate.xi(t) - params.rho * params.inflation.sigma0(t);
}

/// Bond risk premium recovered from a given eta: xi = eta + rho sigma0.
inline CoefficientFn xi_from_eta(const CoefficientFn& eta_fn, double rho,
                                 const CoefficientFn& sigma0) {
  return CoefficientFn::linear_combination(1.0, eta_fn, rho, sigma0);
}

struct Violation {
  std::string field;
  std::string rule;
};

inline std::vector<Violation> validate(const MarketParams& params) {
  std::vector<Violation> out;
  auto check = [&](bool ok, const char* field, const char* rule) {
    if (!ok) out.push_back({field, rule});
  };
  const bool horizon_ok = std::isfinite(params.T) && params.T > 0.0;
  check(horizon_ok, "T", "T must be positive");
  check(std::isfinite(params.T1) && params.T1 > params.T, "T1", "T1 must exceed T");
  check(params.p > 0.0 && params.p < 1.0, "p", "p must lie in (0,1)");
  check(std::abs(params.rho) <= 1.0, "rho", "rho must lie in [-1,1]");
  check(params.X0 > 0.0, "X0", "X0 must be positive");
  check(params.pi_bound_delta > 0.0, "delta", "delta must be positive");
  check(params.inflation.Pi0 > 0.0, "Pi0", "Pi0 must be positive");
  check(params.rate.b > 0.0, "b", "b must be positive");
  check(std::isfinite(params.rate.r0), "r0", "r0 must be finite");
  check(std::isfinite(params.inflation.I0), "I0", "I0 must be finite");
  if (params.rate.is_vasicek()) {
    check(params.rate.vasicek().b_hat > 0.0, "b_hat", "b_hat must be positive");
  }
  if (horizon_ok) {
    const double T = params.T;
    check(params.inflation.beta.min_on(0.0, T) >= 0.0, "beta", "beta(t) must be >= 0 on [0,T]");
    check(params.stock.sigma2.min_on(0.0, T) > 0.0, "sigma2", "sigma2(t) must be > 0 on [0,T]");
    check(params.surplus.c.min_on(0.0, T) > 0.0, "c", "c(t) must be > 0 on [0,T]");
    check(params.surplus.sigma3.min_on(0.0, T) > 0.0, "sigma3", "sigma3(t) must be > 0 on [0,T]");
  }
  return out;
}

inline std::string describe(const Violation& v) { return v.field + ": " + v.rule; }

}  // namespace reinsure

#endif  // REINSURE_MODELS_HPP
