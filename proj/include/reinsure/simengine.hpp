#ifndef REINSURE_SIMENGINE_HPP
#define REINSURE_SIMENGINE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "reinsure/closedform.hpp"
#include "reinsure/csv.hpp"
#include "reinsure/random.hpp"

namespace reinsure {

struct TimeGrid {
  double t0 = 0.0;
  double T = 1.0;
  int n_steps = 1;

  TimeGrid(double t0_, double T_, int n) : t0(t0_), T(T_), n_steps(n) {
    if (!(t0 < T)) throw std::invalid_argument("TimeGrid: requires t0 < T");
    if (n < 1) throw std::invalid_argument("TimeGrid: requires n_steps >= 1");
  }

  static TimeGrid per_year(double T, int steps_per_year, double t0 = 0.0) {
    if (steps_per_year < 1) throw std::invalid_argument("steps per year must be >= 1");
    const long n = std::lround(steps_per_year * (T - t0));
    return TimeGrid(t0, T, static_cast<int>(std::max(1L, n)));
  }

  double dt() const { return (T - t0) / n_steps; }
  double node(int i) const { return i == n_steps ? T : t0 + i * dt(); }
  std::size_t size() const { return static_cast<std::size_t>(n_steps) + 1; }

  // Node closest to t; t must lie in [t0, T].
  int nearest_node(double t) const {
    if (!(t >= t0 && t <= T)) throw std::domain_error("time outside the simulation grid");
    return static_cast<int>(std::lround((t - t0) / dt()));
  }
};

/// One step of the four driving Brownian motions. Cov(dW0, dW1) = rho dt,
/// W2 and W3 independent of everything else.
struct Increment {
  double dW0 = 0.0;
  double dW1 = 0.0;
  double dW2 = 0.0;
  double dW3 = 0.0;
};

using PathIncrements = std::vector<Increment>;

/// Seeded source of Brownian increments; path i is a pure function of (seed, i).
class IncrementStream {
 public:
  IncrementStream(TimeGrid grid, double rho, std::uint64_t seed, std::size_t n_paths)
      : grid_(grid), rho_(rho), seed_(seed), n_paths_(n_paths) {
    if (!(std::abs(rho) <= 1.0)) throw std::invalid_argument("rho must lie in [-1,1]");
  }

  std::size_t n_paths() const { return n_paths_; }
  std::uint64_t seed() const { return seed_; }
  const TimeGrid& grid() const { return grid_; }

  void fill(std::size_t path, PathIncrements& out) const {
    out.resize(static_cast<std::size_t>(grid_.n_steps));
    std::mt19937_64 gen(path_seed(seed_, path));
    std::normal_distribution<double> normal;
    const double sq = std::sqrt(grid_.dt());
    const double comp = std::sqrt(std::max(0.0, 1.0 - rho_ * rho_));
    for (auto& inc : out) {
      const double z1 = normal(gen);
      const double z0 = normal(gen);
      const double z2 = normal(gen);
      const double z3 = normal(gen);
      inc.dW1 = sq * z1;
      inc.dW0 = sq * (rho_ * z1 + comp * z0);
      inc.dW2 = sq * z2;
      inc.dW3 = sq * z3;
    }
  }

  PathIncrements path(std::size_t index) const {
    PathIncrements out;
    fill(index, out);
    return out;
  }

 private:
  TimeGrid grid_;
  double rho_;
  std::uint64_t seed_;
  std::size_t n_paths_;
};

inline IncrementStream sample_increments(const TimeGrid& grid, double rho, std::uint64_t seed,
                                         std::size_t n_paths) {
  return IncrementStream(grid, rho, seed, n_paths);
}

/// Sums consecutive blocks of `factor` increments: the same Brownian path on a coarser grid.
inline PathIncrements coarsen(const PathIncrements& fine, int factor) {
  if (factor < 1 || fine.size() % static_cast<std::size_t>(factor) != 0) {
    throw std::invalid_argument("coarsen: factor must divide the step count");
  }
  PathIncrements out(fine.size() / static_cast<std::size_t>(factor));
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (int j = 0; j < factor; ++j) {
      const auto& f = fine[i * factor + j];
      out[i].dW0 += f.dW0;
      out[i].dW1 += f.dW1;
      out[i].dW2 += f.dW2;
      out[i].dW3 += f.dW3;
    }
  }
  return out;
}

struct Controls {
  double pi1 = 0.0;
  double pi2 = 0.0;
  double u_ratio = 0.0;  // retention u = u_ratio * X
};

struct ClosedFormOptimal {};

struct ConstantMix {
  double pi1 = 0.0;
  double pi2 = 0.0;
  double u_ratio = 0.0;
};

/// Controls tabulated against time, linearly interpolated and held flat outside the table.
struct Tabulated {
  std::vector<double> t;
  std::vector<Controls> controls;

  Controls at(double s) const {
    if (t.empty() || t.size() != controls.size()) {
      throw std::invalid_argument("Tabulated strategy needs matching, non-empty columns");
    }
    if (s <= t.front()) return controls.front();
    if (s >= t.back()) return controls.back();
    const auto it = std::upper_bound(t.begin(), t.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - t.begin()) - 1;
    const double w = (s - t[i]) / (t[i + 1] - t[i]);
    const auto& a = controls[i];
    const auto& b = controls[i + 1];
    return {a.pi1 + w * (b.pi1 - a.pi1), a.pi2 + w * (b.pi2 - a.pi2),
            a.u_ratio + w * (b.u_ratio - a.u_ratio)};
  }
};

using Strategy = std::variant<ClosedFormOptimal, ConstantMix, Tabulated>;

struct NamedStrategy {
  std::string name;
  Strategy strategy;
};

struct PathState {
  double t = 0.0;
  double X = 0.0;
  double r = 0.0;
  double I = 0.0;
  double Pi = 1.0;
};

struct SimulatedPath {
  std::vector<PathState> states;
  bool absorbed = false;
};

/// Grid-bound simulator for one parameter set.
///
/// Every time-only quantity (coefficients, optimal controls, D1, exact-form
/// loadings) is evaluated once per node at construction, so per-path work is
/// plain arithmetic. Immutable afterwards and shareable across threads.
class PathEngine {
 public:
  PathEngine(const AncillarySolution& sol, TimeGrid grid) : sol_(sol), grid_(grid) {
    const auto& P = sol.params();
    if (grid.T > P.T + 1e-12 || grid.t0 < 0.0) {
      throw std::invalid_argument("simulation grid must lie inside [0, T]");
    }
    floor_ = 1e-8 * P.X0;
    b_hat_ = P.rate.is_vasicek() ? P.rate.vasicek().b_hat : 0.0;
    const std::size_t n = grid.size();
    nodes_.resize(n);
    optimal_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = grid.node(static_cast<int>(i));
      auto& c = nodes_[i];
      c.t = t;
      c.rate_level = rate_drift_level(P.rate, t);
      c.s0 = P.inflation.sigma0(t);
      c.sb = P.inflation.sigma0_bar(t);
      c.beta = P.inflation.beta(t);
      c.alpha = P.inflation.alpha(t);
      c.s1 = bond_vol(P.rate, t, P.T1);
      c.eta = eta(P, t);
      c.lam = P.stock.lambda(t);
      c.s2 = P.stock.sigma2(t);
      c.c = P.surplus.c(t);
      c.s3 = P.surplus.sigma3(t);
      const auto pol = optimal_policy(sol, t, 1.0);
      optimal_[i] = {pol.pi1, pol.pi2, pol.u_ratio};
    }
    build_exact_form();
  }

  const TimeGrid& grid() const { return grid_; }
  const AncillarySolution& solution() const { return sol_; }
  double wealth_floor() const { return floor_; }
  const std::vector<Controls>& optimal_controls() const { return optimal_; }

  /// Admissibility on the grid: bounded proportions, u >= 0.
  std::vector<std::string> admissibility_violations(const std::vector<Controls>& controls) const {
    std::vector<std::string> out;
    const double delta = sol_.params().pi_bound_delta;
    for (std::size_t i = 0; i < controls.size(); ++i) {
      const auto& c = controls[i];
      const std::string at = " at t = " + std::to_string(nodes_[i].t);
      if (!(std::abs(c.pi1) <= delta)) out.push_back("|pi1| exceeds delta" + at);
      if (!(std::abs(c.pi2) <= delta)) out.push_back("|pi2| exceeds delta" + at);
      if (!(c.u_ratio >= 0.0)) out.push_back("retention is negative" + at);
    }
    return out;
  }

  /// Controls of `strategy` at every node; throws if they are not admissible.
  std::vector<Controls> resolve(const Strategy& strategy) const {
    std::vector<Controls> out;
    if (std::holds_alternative<ClosedFormOptimal>(strategy)) {
      require_closed_form();
      out = optimal_;
    } else if (const auto* mix = std::get_if<ConstantMix>(&strategy)) {
      out.assign(grid_.size(), Controls{mix->pi1, mix->pi2, mix->u_ratio});
    } else {
      const auto& tab = std::get<Tabulated>(strategy);
      out.reserve(grid_.size());
      for (const auto& c : nodes_) out.push_back(tab.at(c.t));
    }
    const auto bad = admissibility_violations(out);
    if (!bad.empty()) throw std::invalid_argument("inadmissible strategy: " + bad.front());
    return out;
  }

  /// Euler-Maruyama for X, r, I and a log-Euler step for Pi. Wealth at or below
  /// the floor (1e-8 X0) is absorbed and frozen there.
  SimulatedPath simulate(const std::vector<Controls>& controls, const PathIncrements& inc) const {
    SimulatedPath path;
    path.states.reserve(grid_.size());
    path.absorbed = run_euler(controls, inc, [&](const PathState& s) { path.states.push_back(s); });
    return path;
  }

  struct Terminal {
    double X = 0.0;
    bool absorbed = false;
  };

  Terminal terminal_wealth(const std::vector<Controls>& controls, const PathIncrements& inc) const {
    Terminal out;
    out.absorbed = run_euler(controls, inc, [&](const PathState& s) { out.X = s.X; });
    return out;
  }

  /// Closed-form optimal wealth X* = D1(t) exp(int r - int I + stochastic integrals)
  /// along Euler-simulated r and I. Time integrals use the trapezoid rule on the
  /// grid; stochastic integrals are left-point sums on the given increments.
  std::vector<PathState> exact_optimal(const PathIncrements& inc) const {
    require_closed_form();
    std::vector<PathState> out;
    out.reserve(grid_.size());
    exact_kernel(inc, [&](const PathState& s) { out.push_back(s); });
    return out;
  }

  double log_D1(std::size_t node) const {
    require_closed_form();
    return log_d1_[node];
  }

  /// False when the closed-form policy is undefined on the grid (e.g. b = 0 makes sigma1 vanish).
  bool closed_form_available() const { return closed_form_; }

 private:
  struct NodeCoefficients {
    double t, rate_level, s0, sb, beta, alpha, s1, eta, lam, s2, c, s3;
  };

  void require_closed_form() const {
    if (!closed_form_) {
      throw std::invalid_argument("closed-form optimal policy is undefined for these parameters");
    }
  }

  void check_steps(const PathIncrements& inc) const {
    if (inc.size() != static_cast<std::size_t>(grid_.n_steps)) {
      throw std::invalid_argument("increment count does not match the grid");
    }
  }

  template <class Sink>
  bool run_euler(const std::vector<Controls>& controls, const PathIncrements& inc,
                 Sink&& sink) const {
    check_steps(inc);
    if (controls.size() != grid_.size()) throw std::invalid_argument("controls/grid mismatch");
    const auto& P = sol_.params();
    const double dt = grid_.dt();
    const double b = P.rate.b;
    PathState s{grid_.t0, P.X0, P.rate.r0, P.inflation.I0, P.inflation.Pi0};
    bool absorbed = false;
    sink(s);
    for (int i = 0; i < grid_.n_steps; ++i) {
      const auto& c = nodes_[i];
      const auto& u = controls[i];
      const auto& w = inc[i];
      const double X = s.X;
      if (!absorbed) {
        const double ret = u.u_ratio * X;
        const double drift = X * (s.r + c.s0 * c.s0 - s.I + c.s1 * c.eta * u.pi1 +
                                  c.lam * c.s2 * u.pi2) +
                             ret * c.c;
        const double diffusion = ret * c.s3 * w.dW3 + X * u.pi1 * c.s1 * w.dW1 +
                                 X * u.pi2 * c.s2 * w.dW2 - X * c.s0 * w.dW0;
        double next = X + drift * dt + diffusion;
        if (!(next > floor_)) {
          next = floor_;
          absorbed = true;
        }
        s.X = next;
      }
      const double r = s.r;
      const double I = s.I;
      s.r = r + (c.rate_level - b_hat_ * r) * dt + b * w.dW1;
      s.I = I + c.beta * (c.alpha - I) * dt + c.sb * w.dW0;
      s.Pi *= std::exp((I - 0.5 * c.s0 * c.s0) * dt + c.s0 * w.dW0);
      s.t = grid_.node(i + 1);
      sink(s);
    }
    return absorbed;
  }

  template <class Sink>
  void exact_kernel(const PathIncrements& inc, Sink&& sink) const {
    check_steps(inc);
    const auto& P = sol_.params();
    const double dt = grid_.dt();
    const double b = P.rate.b;
    PathState s{grid_.t0, P.X0, P.rate.r0, P.inflation.I0, P.inflation.Pi0};
    double stochastic = 0.0;  // time integrals of r - I plus the Ito sums
    sink(s);
    for (int i = 0; i < grid_.n_steps; ++i) {
      const auto& c = nodes_[i];
      const auto& g = loadings_[i];
      const auto& w = inc[i];
      const double r = s.r;
      const double I = s.I;
      s.r = r + (c.rate_level - b_hat_ * r) * dt + b * w.dW1;
      s.I = I + c.beta * (c.alpha - I) * dt + c.sb * w.dW0;
      s.Pi *= std::exp((I - 0.5 * c.s0 * c.s0) * dt + c.s0 * w.dW0);
      stochastic += 0.5 * ((r + s.r) - (I + s.I)) * dt;
      stochastic += g.w3 * w.dW3 + g.w1 * w.dW1 + g.w2 * w.dW2 - c.s0 * w.dW0;
      s.X = std::exp(log_d1_[i + 1] + stochastic);
      s.t = grid_.node(i + 1);
      sink(s);
    }
  }

  void build_exact_form() {
    const auto& P = sol_.params();
    const double p = P.p;
    const double rho = P.rho;
    auto phi = [&](double t) {
      const auto pol = optimal_policy(sol_, t, 1.0);
      const double s0 = P.inflation.sigma0(t);
      const double s1 = bond_vol(P.rate, t, P.T1);
      const double s2 = P.stock.sigma2(t);
      const double c = P.surplus.c(t);
      const double s3 = P.surplus.sigma3(t);
      const double ins = c * c / (s3 * s3);
      return pol.pi1 * eta(P, t) * s1 + pol.pi2 * s2 * P.stock.lambda(t) + s0 * s0 +
             ins / (1.0 - p) - ins / (2.0 * (1.0 - p) * (1.0 - p)) -
             0.5 * s1 * s1 * pol.pi1 * pol.pi1 - 0.5 * s2 * s2 * pol.pi2 * pol.pi2 -
             0.5 * s0 * s0 + s1 * s0 * pol.pi1 * rho;
    };
    log_d1_.assign(grid_.size(), std::log(P.X0));
    loadings_.resize(grid_.size());
    for (const auto& u : optimal_) {
      if (!std::isfinite(u.pi1) || !std::isfinite(u.pi2) || !std::isfinite(u.u_ratio)) {
        closed_form_ = false;
        return;
      }
    }
    const QuadratureSpec piece{2, 1e-10};
    try {
      for (int i = 0; i < grid_.n_steps; ++i) {
        log_d1_[i + 1] =
            log_d1_[i] + integrate(phi, grid_.node(i), grid_.node(i + 1), piece).value;
      }
    } catch (const EvaluationError&) {
      closed_form_ = false;
      return;
    }
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const auto& c = nodes_[i];
      const auto& u = optimal_[i];
      loadings_[i] = {c.c / (c.s3 * (1.0 - p)), c.s1 * u.pi1, c.s2 * u.pi2};
    }
  }

  struct Loading {
    double w3, w1, w2;
  };

  const AncillarySolution& sol_;
  TimeGrid grid_;
  double floor_ = 0.0;
  double b_hat_ = 0.0;
  bool closed_form_ = true;
  std::vector<NodeCoefficients> nodes_;
  std::vector<Controls> optimal_;
  std::vector<double> log_d1_;
  std::vector<Loading> loadings_;
};

inline SimulatedPath simulate_path(const AncillarySolution& sol, const Strategy& strategy,
                                   const TimeGrid& grid, const PathIncrements& increments) {
  PathEngine engine(sol, grid);
  return engine.simulate(engine.resolve(strategy), increments);
}

inline std::vector<PathState> exact_optimal_wealth(const AncillarySolution& sol,
                                                   const TimeGrid& grid,
                                                   const PathIncrements& increments) {
  return PathEngine(sol, grid).exact_optimal(increments);
}

/// G(t_i, X_i, r_i, I_i) at every state of a path.
inline std::vector<double> value_along_path(const AncillarySolution& sol,
                                            const std::vector<PathState>& path) {
  std::vector<double> out;
  out.reserve(path.size());
  for (const auto& s : path) out.push_back(value_function(sol, {s.t, s.X, s.r, s.I}));
  return out;
}

inline void write_trace_header(std::ostream& os) {
  os << "path,step,t,X,r,I,Pi,pi1,pi2,u\n";
}

inline void write_trace_rows(std::ostream& os, std::size_t path_index, const SimulatedPath& path,
                             const std::vector<Controls>& controls) {
  csv::RowWriter w(os);
  for (std::size_t i = 0; i < path.states.size(); ++i) {
    const auto& s = path.states[i];
    const auto& c = controls[i];
    w.row(path_index, i, s.t, s.X, s.r, s.I, s.Pi, c.pi1, c.pi2, c.u_ratio * s.X);
  }
}

}  // namespace reinsure

#endif  // REINSURE_SIMENGINE_HPP
