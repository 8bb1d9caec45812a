#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "reinsure/simengine.hpp"

using namespace reinsure;

TEST(TimeGrid, NodesAndSnapping) {
  const auto g = TimeGrid::per_year(5.0, 250);
  EXPECT_EQ(g.n_steps, 1250);
  EXPECT_EQ(g.size(), 1251u);
  EXPECT_EQ(g.node(0), 0.0);
  EXPECT_EQ(g.node(1250), 5.0);
  EXPECT_EQ(g.nearest_node(2.5), 625);
  EXPECT_EQ(g.nearest_node(5.0), 1250);
  EXPECT_THROW(g.nearest_node(5.1), std::domain_error);
  EXPECT_THROW(TimeGrid(1.0, 1.0, 10), std::invalid_argument);
  EXPECT_THROW(TimeGrid(0.0, 1.0, 0), std::invalid_argument);
}

TEST(Increments, PerfectCorrelationGivesEqualIncrements) {
  const auto inc = sample_increments(TimeGrid(0.0, 1.0, 1000), 1.0, 42, 1).path(0);
  for (const auto& w : inc) EXPECT_EQ(w.dW0, w.dW1);
}

TEST(Increments, ZeroCorrelationSampleCorrelationWithinClt) {
  const int n = 100000;
  const auto inc = sample_increments(TimeGrid(0.0, 1.0, n), 0.0, 7, 1).path(0);
  double s01 = 0, s00 = 0, s11 = 0;
  for (const auto& w : inc) {
    s01 += w.dW0 * w.dW1;
    s00 += w.dW0 * w.dW0;
    s11 += w.dW1 * w.dW1;
  }
  EXPECT_LT(std::abs(s01 / std::sqrt(s00 * s11)), 3.0 / std::sqrt(n));
}

TEST(Increments, MarginalVarianceAndCovariance) {
  const int n = 200000;
  const double rho = -0.4;
  const TimeGrid grid(0.0, 2.0, n);
  const double dt = grid.dt();
  const auto inc = sample_increments(grid, rho, 9, 1).path(0);
  double c01 = 0, v[4] = {0, 0, 0, 0}, c23 = 0;
  for (const auto& w : inc) {
    c01 += w.dW0 * w.dW1;
    c23 += w.dW2 * w.dW3;
    v[0] += w.dW0 * w.dW0;
    v[1] += w.dW1 * w.dW1;
    v[2] += w.dW2 * w.dW2;
    v[3] += w.dW3 * w.dW3;
  }
  const double se_cov = dt * std::sqrt(1.0 + rho * rho) / std::sqrt(n);
  EXPECT_LT(std::abs(c01 / n - rho * dt), 3.0 * se_cov);
  EXPECT_LT(std::abs(c23 / n), 3.0 * dt / std::sqrt(n));
  const double se_var = dt * std::sqrt(2.0) / std::sqrt(n);
  for (double x : v) EXPECT_LT(std::abs(x / n - dt), 3.0 * se_var);
}

TEST(Increments, DeterministicPerSeedAndPath) {
  const auto s = sample_increments(TimeGrid(0.0, 1.0, 50), 0.3, 5, 4);
  const auto a = s.path(2);
  const auto b = sample_increments(TimeGrid(0.0, 1.0, 50), 0.3, 5, 4).path(2);
  const auto c = s.path(3);
  const auto d = sample_increments(TimeGrid(0.0, 1.0, 50), 0.3, 6, 4).path(2);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].dW0, b[i].dW0);
    EXPECT_EQ(a[i].dW3, b[i].dW3);
  }
  EXPECT_NE(a[0].dW1, c[0].dW1);
  EXPECT_NE(a[0].dW1, d[0].dW1);
}

TEST(Increments, RejectsInvalidCorrelation) {
  EXPECT_THROW(sample_increments(TimeGrid(0.0, 1.0, 5), 1.5, 1, 1), std::invalid_argument);
}

TEST(Increments, CoarsenSumsBlocks) {
  const auto fine = sample_increments(TimeGrid(0.0, 1.0, 6), 0.2, 3, 1).path(0);
  const auto coarse = coarsen(fine, 3);
  ASSERT_EQ(coarse.size(), 2u);
  EXPECT_DOUBLE_EQ(coarse[1].dW2, fine[3].dW2 + fine[4].dW2 + fine[5].dW2);
  EXPECT_THROW(coarsen(fine, 4), std::invalid_argument);
}

TEST(SimulatePath, NoiseFreeNoStrategyHoldsWealthConstant) {
  auto P = fixtures::noise_free(1.0, 0.02, 0.02);
  const AncillarySolution sol(P);
  const TimeGrid grid(0.0, 1.0, 500);
  const auto path = simulate_path(sol, ConstantMix{}, grid, PathIncrements(500));
  for (const auto& s : path.states) {
    EXPECT_EQ(s.X, 1.0);
    EXPECT_EQ(s.r, 0.02);
    EXPECT_EQ(s.I, 0.02);
  }
}

TEST(SimulatePath, NoiseFreeRateAndInflationFollowTheirDrifts) {
  auto P = fixtures::noise_free(2.0, 0.03, 0.0);
  P.rate.kind = HoLee{0.01};
  P.inflation.alpha = 0.03;
  P.inflation.beta = 0.5;
  const AncillarySolution sol(P);
  const TimeGrid grid(0.0, 2.0, 20000);
  const auto path = simulate_path(sol, ConstantMix{}, grid, PathIncrements(20000));
  for (std::size_t i = 0; i < path.states.size(); i += 1000) {
    const auto& s = path.states[i];
    EXPECT_NEAR(s.r, 0.03 + 0.01 * s.t, 1e-12);
    EXPECT_NEAR(s.I, 0.03 - 0.03 * std::exp(-0.5 * s.t), 1e-5);
  }
}

TEST(SimulatePath, BankAccount) {
  const AncillarySolution sol(fixtures::noise_free(1.0, 0.03, 0.0));
  const TimeGrid grid(0.0, 1.0, 10000);
  const auto path = simulate_path(sol, ConstantMix{}, grid, PathIncrements(10000));
  EXPECT_NEAR(path.states.back().X, std::exp(0.03), 1e-4);
}

TEST(SimulatePath, CashOnlyWealthCompoundsAtRealRate) {
  auto P = fixtures::reference(true, 5.0);
  P.inflation.sigma0 = 0.0;
  const AncillarySolution sol(P);
  const auto grid = TimeGrid::per_year(5.0, 100);
  const auto inc = sample_increments(grid, P.rho, 31, 1).path(0);
  const auto path = simulate_path(sol, ConstantMix{}, grid, inc);
  double X = P.X0;
  for (std::size_t i = 0; i + 1 < path.states.size(); ++i) {
    X *= 1.0 + (path.states[i].r - path.states[i].I) * grid.dt();
  }
  EXPECT_NEAR(path.states.back().X, X, 1e-12 * X);
}

TEST(SimulatePath, BitwiseDeterministic) {
  const AncillarySolution sol(fixtures::reference(false, 5.0));
  const auto grid = TimeGrid::per_year(5.0, 50);
  const auto inc = sample_increments(grid, -0.06, 77, 1).path(0);
  const auto a = simulate_path(sol, ClosedFormOptimal{}, grid, inc);
  const auto b = simulate_path(sol, ClosedFormOptimal{}, grid, inc);
  ASSERT_EQ(a.states.size(), b.states.size());
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    EXPECT_EQ(a.states[i].X, b.states[i].X);
    EXPECT_EQ(a.states[i].Pi, b.states[i].Pi);
  }
}

TEST(SimulatePath, PriceIndexStaysPositive) {
  auto P = fixtures::reference(false, 5.0);
  P.inflation.sigma0 = 0.5;
  const AncillarySolution sol(P);
  const auto grid = TimeGrid::per_year(5.0, 50);
  const auto stream = sample_increments(grid, P.rho, 4, 200);
  for (std::size_t i = 0; i < 200; ++i) {
    for (const auto& s : simulate_path(sol, ConstantMix{}, grid, stream.path(i)).states) {
      ASSERT_GT(s.Pi, 0.0);
    }
  }
}

TEST(SimulatePath, AbsorbsAtWealthFloor) {
  const AncillarySolution sol(fixtures::reference(false, 5.0));
  const auto grid = TimeGrid::per_year(5.0, 250);
  const PathEngine engine(sol, grid);
  const auto controls = engine.resolve(ConstantMix{0.0, 0.0, 60.0});
  const auto stream = sample_increments(grid, -0.06, 8, 20);
  int absorbed = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    const auto path = engine.simulate(controls, stream.path(i));
    if (!path.absorbed) continue;
    ++absorbed;
    const auto first = std::find_if(path.states.begin(), path.states.end(),
                                    [&](const PathState& s) { return s.X == engine.wealth_floor(); });
    ASSERT_NE(first, path.states.end());
    for (auto it = first; it != path.states.end(); ++it) EXPECT_EQ(it->X, engine.wealth_floor());
  }
  EXPECT_GT(absorbed, 0);
}

TEST(SimulatePath, RejectsInadmissibleStrategies) {
  const AncillarySolution sol(fixtures::reference(false, 5.0));
  const auto grid = TimeGrid::per_year(5.0, 10);
  const PathIncrements inc(50);
  EXPECT_THROW(simulate_path(sol, ConstantMix{2e6, 0.0, 0.0}, grid, inc), std::invalid_argument);
  EXPECT_THROW(simulate_path(sol, ConstantMix{0.0, 0.0, -0.1}, grid, inc), std::invalid_argument);
  EXPECT_THROW(simulate_path(sol, ConstantMix{}, grid, PathIncrements(49)), std::invalid_argument);
}

TEST(SimulatePath, ClosedFormUnavailableWithoutRateNoise) {
  const AncillarySolution sol(fixtures::noise_free());
  const PathEngine engine(sol, TimeGrid(0.0, 1.0, 10));
  EXPECT_FALSE(engine.closed_form_available());
  EXPECT_THROW(engine.resolve(ClosedFormOptimal{}), std::invalid_argument);
  EXPECT_THROW(engine.exact_optimal(PathIncrements(10)), std::invalid_argument);
}

TEST(SimulatePath, EulerConvergesToExactOptimalWealth) {
  const auto P = fixtures::reference(false, 5.0);
  const AncillarySolution sol(P);
  const auto fine_grid = TimeGrid::per_year(5.0, 250);
  const auto coarse_grid = TimeGrid::per_year(5.0, 125);
  const PathEngine fine(sol, fine_grid);
  const PathEngine coarse(sol, coarse_grid);
  const auto cf = fine.resolve(ClosedFormOptimal{});
  const auto cc = coarse.resolve(ClosedFormOptimal{});
  const auto stream = sample_increments(fine_grid, P.rho, 2024, 100);
  double gap_fine = 0.0, gap_coarse = 0.0;
  for (std::size_t i = 0; i < 100; ++i) {
    const auto inc = stream.path(i);
    const auto inc2 = coarsen(inc, 2);
    const double xf = fine.terminal_wealth(cf, inc).X;
    const double ef = fine.exact_optimal(inc).back().X;
    const double xc = coarse.terminal_wealth(cc, inc2).X;
    const double ec = coarse.exact_optimal(inc2).back().X;
    gap_fine = std::max(gap_fine, std::abs(xf - ef) / ef);
    gap_coarse = std::max(gap_coarse, std::abs(xc - ec) / ec);
  }
  const double ratio = gap_fine / gap_coarse;
  EXPECT_GE(ratio, 0.3);
  EXPECT_LE(ratio, 0.8);
}

TEST(ExactOptimalWealth, StartsAtInitialWealth) {
  auto P = fixtures::reference(false, 5.0);
  P.X0 = 2.5;
  const AncillarySolution sol(P);
  const auto grid = TimeGrid::per_year(5.0, 20);
  const auto path = exact_optimal_wealth(sol, grid, sample_increments(grid, P.rho, 1, 1).path(0));
  EXPECT_EQ(path.front().X, 2.5);
  EXPECT_EQ(path.front().t, 0.0);
}

TEST(ExactOptimalWealth, NoiseFreeMatchesDeterministicGrowth) {
  auto P = fixtures::reference(false, 5.0);
  P.rate.kind = HoLee{-P.rate.b * P.rate.xi(0.0)};  // zero rate drift keeps r at r0
  P.inflation.alpha = 0.01;
  P.inflation.I0 = 0.01;
  const AncillarySolution sol(P);
  const auto grid = TimeGrid::per_year(5.0, 50);
  const auto path = exact_optimal_wealth(sol, grid, PathIncrements(grid.n_steps));
  const auto D = integrate(
      [&](double t) { return oracle::log_d1_rate(P, t, sol.k(t), sol.z(t)); }, 0.0, 5.0, {4096});
  const double expected = P.X0 * std::exp(D.value) * std::exp((0.03 - 0.01) * 5.0);
  EXPECT_NEAR(path.back().X, expected, 1e-9 * expected);
  for (const auto& s : path) {
    EXPECT_NEAR(s.r, 0.03, 1e-15);
    EXPECT_NEAR(s.I, 0.01, 1e-15);
  }
}

TEST(ExactOptimalWealth, PositiveOnEveryPath) {
  const auto P = fixtures::reference(true, 5.0);
  const AncillarySolution sol(P);
  const auto grid = TimeGrid::per_year(5.0, 50);
  const PathEngine engine(sol, grid);
  const auto stream = sample_increments(grid, P.rho, 55, 10000);
  double lowest = INFINITY;
  PathIncrements inc;
  for (std::size_t i = 0; i < 10000; ++i) {
    stream.fill(i, inc);
    for (const auto& s : engine.exact_optimal(inc)) lowest = std::min(lowest, s.X);
  }
  EXPECT_GT(lowest, 0.0);
}

TEST(ValueAlongPath, EndpointsMatchValueFunction) {
  const auto P = fixtures::reference(false, 5.0);
  const AncillarySolution sol(P);
  const auto grid = TimeGrid::per_year(5.0, 50);
  const auto path = exact_optimal_wealth(sol, grid, sample_increments(grid, P.rho, 3, 1).path(0));
  const auto G = value_along_path(sol, path);
  ASSERT_EQ(G.size(), path.size());
  EXPECT_EQ(G.front(), value_function(sol, {0.0, P.X0, P.rate.r0, P.inflation.I0}));
  EXPECT_EQ(G.back(), std::pow(path.back().X, P.p) / P.p);
  EXPECT_EQ(std::exp(sol.k(5.0) * 0.7 + sol.z(5.0) * -0.3), 1.0);
}

TEST(Trace, HeaderAndRowShape) {
  const AncillarySolution sol(fixtures::reference(false, 5.0));
  const auto grid = TimeGrid::per_year(5.0, 2);
  const PathEngine engine(sol, grid);
  const auto controls = engine.resolve(ClosedFormOptimal{});
  const auto path = engine.simulate(controls, sample_increments(grid, -0.06, 1, 1).path(0));
  std::ostringstream os;
  write_trace_header(os);
  write_trace_rows(os, 3, path, controls);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "path,step,t,X,r,I,Pi,pi1,pi2,u");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 9);
    EXPECT_EQ(line.rfind("3,", 0), 0u);
  }
  EXPECT_EQ(rows, 11);
}
