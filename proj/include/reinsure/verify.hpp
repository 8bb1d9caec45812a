#ifndef REINSURE_VERIFY_HPP
#define REINSURE_VERIFY_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "reinsure/csv.hpp"
#include "reinsure/parallel.hpp"
#include "reinsure/simengine.hpp"

namespace reinsure {

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
  std::size_t absorbed = 0;
};

/// Mean and standard error, reduced in index order. Values are shifted by the
/// first sample, so a constant sample gives exactly that constant and zero error.
inline MCEstimate summarize(std::span<const double> values, std::uint64_t seed,
                            std::size_t absorbed = 0) {
  MCEstimate out;
  out.n_paths = values.size();
  out.seed = seed;
  out.absorbed = absorbed;
  if (values.empty()) return out;
  const double shift = values.front();
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v - shift;
  const double mean_dev = sum / n;
  out.mean = shift + mean_dev;
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) {
    const double d = (v - shift) - mean_dev;
    ss += d * d;
  }
  out.std_error = std::sqrt(ss / (n - 1.0) / n);
  return out;
}

inline double utility(double x, double p) { return std::pow(x, p) / p; }

enum class PathScheme {
  euler,          // simulate_path under the given strategy
  exact_optimal,  // closed-form optimal wealth; ClosedFormOptimal only
};

/// E[(1/p) X_T^p] under `strategy` from n_paths seeded paths.
inline MCEstimate mc_expected_utility(const PathEngine& engine, const Strategy& strategy,
                                      std::size_t n_paths, std::uint64_t seed,
                                      PathScheme scheme = PathScheme::euler) {
  if (n_paths < 2) throw std::invalid_argument("mc_expected_utility: needs at least 2 paths");
  if (scheme == PathScheme::exact_optimal &&
      !std::holds_alternative<ClosedFormOptimal>(strategy)) {
    throw std::invalid_argument("exact scheme is only defined for the closed-form optimal policy");
  }
  const auto& P = engine.solution().params();
  const auto controls = engine.resolve(strategy);
  const IncrementStream stream(engine.grid(), P.rho, seed, n_paths);
  std::vector<double> values(n_paths);
  std::vector<unsigned char> absorbed(n_paths, 0);
  parallel_for(n_paths, [&](std::size_t i) {
    PathIncrements inc;
    stream.fill(i, inc);
    if (scheme == PathScheme::exact_optimal) {
      values[i] = utility(engine.exact_optimal(inc).back().X, P.p);
    } else {
      const auto term = engine.terminal_wealth(controls, inc);
      values[i] = utility(term.X, P.p);
      absorbed[i] = term.absorbed;
    }
  });
  std::size_t n_absorbed = 0;
  for (auto a : absorbed) n_absorbed += a;
  return summarize(values, seed, n_absorbed);
}

inline MCEstimate mc_expected_utility(const AncillarySolution& sol, const Strategy& strategy,
                                      const TimeGrid& grid, std::size_t n_paths,
                                      std::uint64_t seed, PathScheme scheme = PathScheme::euler) {
  return mc_expected_utility(PathEngine(sol, grid), strategy, n_paths, seed, scheme);
}

inline double initial_value(const AncillarySolution& sol, const TimeGrid& grid) {
  const auto& P = sol.params();
  return value_function(sol, {grid.t0, P.X0, P.rate.r0, P.inflation.I0});
}

struct CheckpointEstimate {
  double t = 0.0;
  MCEstimate estimate;
  double G0 = 0.0;
  bool within_band = true;  // |mean - G0| <= 3 std_error
};

/// Mean of G(s, X*_s, r_s, I_s) along closed-form optimal paths at each checkpoint.
/// Under the optimal policy G is a martingale, so every mean should sit within
/// three standard errors of G(t0, X0, r0, I0). Checkpoints snap to the nearest node.
inline std::vector<CheckpointEstimate> martingale_diagnostic(const PathEngine& engine,
                                                             std::size_t n_paths,
                                                             std::uint64_t seed,
                                                             std::span<const double> checkpoints) {
  if (n_paths < 2) throw std::invalid_argument("martingale_diagnostic: needs at least 2 paths");
  const auto& sol = engine.solution();
  const auto& P = sol.params();
  const auto& grid = engine.grid();
  std::vector<int> nodes;
  for (double s : checkpoints) nodes.push_back(grid.nearest_node(s));

  // Time-only factors of G at each checkpoint node.
  struct Factor {
    double t, f, k, z;
  };
  std::vector<Factor> factors;
  for (int j : nodes) {
    const double t = grid.node(j);
    factors.push_back({t, sol.f(t), sol.k(t), sol.z(t)});
  }

  const std::size_t m = nodes.size();
  std::vector<double> values(n_paths * m);
  const IncrementStream stream(grid, P.rho, seed, n_paths);
  parallel_for(n_paths, [&](std::size_t i) {
    PathIncrements inc;
    stream.fill(i, inc);
    const auto path = engine.exact_optimal(inc);
    for (std::size_t c = 0; c < m; ++c) {
      const auto& s = path[static_cast<std::size_t>(nodes[c])];
      const auto& F = factors[c];
      values[c * n_paths + i] = F.f * std::exp(F.k * s.r + F.z * s.I) * utility(s.X, P.p);
    }
  });

  const double G0 = initial_value(sol, grid);
  std::vector<CheckpointEstimate> out;
  for (std::size_t c = 0; c < m; ++c) {
    CheckpointEstimate ce;
    ce.t = factors[c].t;
    ce.estimate = summarize(std::span<const double>(values).subspan(c * n_paths, n_paths), seed);
    ce.G0 = G0;
    ce.within_band = std::abs(ce.estimate.mean - G0) <= 3.0 * ce.estimate.std_error;
    out.push_back(ce);
  }
  return out;
}

inline std::vector<CheckpointEstimate> martingale_diagnostic(const AncillarySolution& sol,
                                                             const TimeGrid& grid,
                                                             std::size_t n_paths,
                                                             std::uint64_t seed,
                                                             std::span<const double> checkpoints) {
  return martingale_diagnostic(PathEngine(sol, grid), n_paths, seed, checkpoints);
}

struct DominanceRow {
  std::string name;
  MCEstimate estimate;
  bool violates = false;  // mean - 3 std_error > G0
};

struct DominanceReport {
  double G0 = 0.0;
  DominanceRow optimal;
  bool optimal_contains_G0 = false;
  std::vector<DominanceRow> alternatives;

  bool passed() const {
    if (!optimal_contains_G0) return false;
    for (const auto& a : alternatives) {
      if (a.violates) return false;
    }
    return true;
  }
};

/// Expected utility of the optimal policy and of each alternative on common
/// random numbers. Alternatives must not beat G0 beyond three standard errors.
inline DominanceReport dominance_scan(const PathEngine& engine, std::size_t n_paths,
                                      std::uint64_t seed,
                                      const std::vector<NamedStrategy>& alternatives) {
  if (n_paths < 2) throw std::invalid_argument("dominance_scan: needs at least 2 paths");
  const auto& sol = engine.solution();
  const auto& P = sol.params();

  std::vector<std::vector<Controls>> controls;
  controls.push_back(engine.resolve(ClosedFormOptimal{}));
  for (const auto& alt : alternatives) {
    try {
      controls.push_back(engine.resolve(alt.strategy));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("alternative '" + alt.name + "' rejected: " + e.what());
    }
  }

  const std::size_t m = controls.size();
  std::vector<double> values(n_paths * m);
  std::vector<unsigned char> absorbed(n_paths * m, 0);
  const IncrementStream stream(engine.grid(), P.rho, seed, n_paths);
  parallel_for(n_paths, [&](std::size_t i) {
    PathIncrements inc;
    stream.fill(i, inc);
    for (std::size_t s = 0; s < m; ++s) {
      const auto term = engine.terminal_wealth(controls[s], inc);
      values[s * n_paths + i] = utility(term.X, P.p);
      absorbed[s * n_paths + i] = term.absorbed;
    }
  });

  auto estimate = [&](std::size_t s) {
    std::size_t n_abs = 0;
    for (std::size_t i = 0; i < n_paths; ++i) n_abs += absorbed[s * n_paths + i];
    return summarize(std::span<const double>(values).subspan(s * n_paths, n_paths), seed, n_abs);
  };

  DominanceReport report;
  report.G0 = initial_value(sol, engine.grid());
  report.optimal = {"optimal", estimate(0), false};
  const auto& opt = report.optimal.estimate;
  report.optimal_contains_G0 = std::abs(opt.mean - report.G0) <= 3.0 * opt.std_error;
  report.optimal.violates = !report.optimal_contains_G0;
  for (std::size_t s = 1; s < m; ++s) {
    DominanceRow row{alternatives[s - 1].name, estimate(s), false};
    row.violates = row.estimate.mean - 3.0 * row.estimate.std_error > report.G0;
    report.alternatives.push_back(row);
  }
  return report;
}

inline DominanceReport dominance_scan(const AncillarySolution& sol, const TimeGrid& grid,
                                      std::size_t n_paths, std::uint64_t seed,
                                      const std::vector<NamedStrategy>& alternatives) {
  return dominance_scan(PathEngine(sol, grid), n_paths, seed, alternatives);
}

/// The three built-in comparison strategies: optimal controls frozen at t0,
/// nothing but the savings account, and half of every optimal control.
inline std::vector<NamedStrategy> builtin_alternatives(const PathEngine& engine) {
  const auto& opt = engine.optimal_controls();
  const auto& first = opt.front();
  Tabulated half;
  const auto& grid = engine.grid();
  for (std::size_t i = 0; i < opt.size(); ++i) {
    half.t.push_back(grid.node(static_cast<int>(i)));
    half.controls.push_back({0.5 * opt[i].pi1, 0.5 * opt[i].pi2, 0.5 * opt[i].u_ratio});
  }
  return {
      {"frozen_optimal", ConstantMix{first.pi1, first.pi2, first.u_ratio}},
      {"all_cash", ConstantMix{0.0, 0.0, 0.0}},
      {"half_optimal", std::move(half)},
  };
}

inline void write_report_header(std::ostream& os) {
  os << "strategy,mean,std_error,n_paths,absorbed,G0,violates\n";
}

inline void write_report_row(std::ostream& os, const std::string& name, const MCEstimate& e,
                             double G0, bool violates) {
  csv::RowWriter(os).row(name, e.mean, e.std_error, e.n_paths, e.absorbed, G0,
                         csv::boolean(violates));
}

}  // namespace reinsure

#endif  // REINSURE_VERIFY_HPP
