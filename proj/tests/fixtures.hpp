#ifndef REINSURE_TESTS_FIXTURES_HPP
#define REINSURE_TESTS_FIXTURES_HPP

#include <random>

#include "reinsure/models.hpp"

namespace fixtures {

// Published example values plus the project's chosen defaults for the rest.
inline reinsure::MarketParams reference(bool vasicek = false, double T = 80.0, double p = 0.5) {
  using namespace reinsure;
  MarketParams P;
  P.T = T;
  P.T1 = 120.0;
  P.p = p;
  P.rho = -0.06;
  P.X0 = 1.0;
  if (vasicek) {
    P.rate.kind = Vasicek{0.002, 0.05};
  } else {
    P.rate.kind = HoLee{0.005};
  }
  P.rate.b = 0.05;
  P.rate.r0 = 0.03;
  P.inflation.alpha = 0.02;
  P.inflation.beta = 0.02;
  P.inflation.sigma0 = 0.01;
  P.inflation.sigma0_bar = 0.026;
  P.inflation.I0 = 0.02;
  P.inflation.Pi0 = 1.0;
  P.rate.xi = xi_from_eta(0.0606, P.rho, P.inflation.sigma0);
  P.stock.lambda = 0.2;
  P.stock.sigma2 = 0.2;
  P.surplus.c = 0.1;
  P.surplus.sigma3 = 1.0;
  return P;
}

// Every coefficient zero except those needed to keep the parameter set well formed.
inline reinsure::MarketParams zeros(double p = 0.5) {
  using namespace reinsure;
  MarketParams P;
  P.T = 80.0;
  P.T1 = 120.0;
  P.p = p;
  P.rho = 0.0;
  P.rate.kind = HoLee{0.0};
  P.rate.b = 0.0;
  P.rate.xi = 0.0;
  P.inflation = {0.0, 0.0, 0.0, 0.0, 0.0, 1.0};
  P.stock = {0.0, 1.0, 1.0};
  P.surplus = {0.0, 1.0, 0.0};
  return P;
}

// Noise-free market: b = 0 and every volatility zero, so only drifts move the state.
// r is held at r0 and I at I0 unless the caller changes the drifts.
inline reinsure::MarketParams noise_free(double T = 1.0, double r0 = 0.03, double I0 = 0.0) {
  using namespace reinsure;
  MarketParams P = zeros();
  P.T = T;
  P.T1 = T + 1.0;
  P.rate.r0 = r0;
  P.inflation.alpha = I0;
  P.inflation.I0 = I0;
  P.surplus.c = 0.0;
  P.surplus.sigma3 = 1.0;
  return P;
}

// A valid parameter set with randomly drawn constant and piecewise-linear coefficients.
inline reinsure::MarketParams random_params(std::mt19937_64& rng, bool vasicek) {
  using namespace reinsure;
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto in = [&](double lo, double hi) { return lo + (hi - lo) * U(rng); };
  MarketParams P;
  P.T = in(1.0, 60.0);
  P.T1 = P.T + in(1.0, 40.0);
  P.p = in(0.1, 0.9);
  P.rho = in(-0.9, 0.9);
  P.X0 = in(0.5, 3.0);
  P.rate.b = in(0.01, 0.1);
  P.rate.r0 = in(0.0, 0.06);
  if (vasicek) {
    P.rate.kind = Vasicek{in(0.0, 0.01), in(0.01, 0.3)};
  } else {
    P.rate.kind = HoLee{in(0.0, 0.01)};
  }
  P.rate.xi = CoefficientFn::piecewise_linear(
      {{0.0, in(0.0, 0.1)}, {0.5 * P.T, in(0.0, 0.1)}, {P.T, in(0.0, 0.1)}});
  P.inflation.alpha = in(0.0, 0.04);
  P.inflation.beta = CoefficientFn::piecewise_linear({{0.0, in(0.0, 0.2)}, {P.T, in(0.0, 0.2)}});
  P.inflation.sigma0 = in(0.0, 0.03);
  P.inflation.sigma0_bar = in(0.0, 0.04);
  P.inflation.I0 = in(0.0, 0.04);
  P.stock.lambda = in(0.0, 0.4);
  P.stock.sigma2 = in(0.1, 0.4);
  P.surplus.c = in(0.05, 0.3);
  P.surplus.sigma3 = in(0.5, 2.0);
  return P;
}

}  // namespace fixtures

#endif  // REINSURE_TESTS_FIXTURES_HPP
