#ifndef REINSURE_COMMANDS_HPP
#define REINSURE_COMMANDS_HPP

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "reinsure/closedform.hpp"
#include "reinsure/config.hpp"
#include "reinsure/csv.hpp"
#include "reinsure/simengine.hpp"
#include "reinsure/verify.hpp"

namespace reinsure {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw OutputError("cannot create output directory '" + dir.string() + "': " + ec.message());
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot write '" + path.string() + "'");
  return out;
}

inline void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw OutputError("write failed for '" + path.string() + "'");
}

inline double sample_time(double T, int i, int points) {
  return i == points - 1 ? T : T * static_cast<double>(i) / (points - 1);
}

constexpr int kPolicyPoints = 1001;

}  // namespace detail

/// policy.csv: t,pi1,pi2,u_ratio,k,z,f,H_shift on 1001 uniform points of [0, T].
inline std::filesystem::path cmd_policy(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  const AncillarySolution sol(cfg.market());
  auto out = detail::open_output(out_dir, "policy.csv");
  out << "t,pi1,pi2,u_ratio,k,z,f,H_shift\n";
  csv::RowWriter w(out);
  for (int i = 0; i < detail::kPolicyPoints; ++i) {
    const double t = detail::sample_time(cfg.T, i, detail::kPolicyPoints);
    const auto pol = optimal_policy(sol, t, cfg.X0);
    w.row(t, pol.pi1, pol.pi2, pol.u_ratio, sol.k(t), sol.z(t), sol.f(t), sol.H_shift(t));
  }
  const auto path = out_dir / "policy.csv";
  detail::finish(out, path);
  return path;
}

/// figure1.csv / figure2.csv: bond proportion against time, one column per p in
/// the sweep, for Ho-Lee and Vasicek. figure3.csv: both models at the configured p.
inline std::vector<std::filesystem::path> cmd_figures(const RunConfig& cfg,
                                                      const std::filesystem::path& out_dir) {
  if (!cfg.b_hat) {
    throw ConfigError({"figures need b_hat in [rate]: the Vasicek reversion speed has no "
                       "published value for this parameter set, so it must be chosen explicitly"});
  }
  auto bond_curve = [&](ModelChoice model, double p) {
    RunConfig c = cfg;
    c.p = p;
    const AncillarySolution sol(c.market(model));
    std::vector<double> col;
    for (int i = 0; i < detail::kPolicyPoints; ++i) {
      col.push_back(optimal_policy(sol, detail::sample_time(cfg.T, i, detail::kPolicyPoints), cfg.X0).pi1);
    }
    return col;
  };

  std::vector<std::filesystem::path> written;
  auto sweep = [&](ModelChoice model, const std::string& name) {
    std::vector<std::vector<double>> cols;
    for (double p : cfg.p_sweep) cols.push_back(bond_curve(model, p));
    auto out = detail::open_output(out_dir, name);
    out << 't';
    for (double p : cfg.p_sweep) out << ",pi1_p" << csv::number(p);
    out << '\n';
    for (int i = 0; i < detail::kPolicyPoints; ++i) {
      out << csv::number(detail::sample_time(cfg.T, i, detail::kPolicyPoints));
      for (const auto& col : cols) out << ',' << csv::number(col[i]);
      out << '\n';
    }
    detail::finish(out, out_dir / name);
    written.push_back(out_dir / name);
  };
  sweep(ModelChoice::holee, "figure1.csv");
  sweep(ModelChoice::vasicek, "figure2.csv");

  const auto holee = bond_curve(ModelChoice::holee, cfg.p);
  const auto vasicek = bond_curve(ModelChoice::vasicek, cfg.p);
  auto out = detail::open_output(out_dir, "figure3.csv");
  out << "t,pi1_holee,pi1_vasicek\n";
  csv::RowWriter w(out);
  for (int i = 0; i < detail::kPolicyPoints; ++i) {
    w.row(detail::sample_time(cfg.T, i, detail::kPolicyPoints), holee[i], vasicek[i]);
  }
  detail::finish(out, out_dir / "figure3.csv");
  written.push_back(out_dir / "figure3.csv");
  return written;
}

/// trace.csv: Euler paths under the closed-form optimal policy.
inline std::filesystem::path cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  const AncillarySolution sol(cfg.market());
  const PathEngine engine(sol, TimeGrid::per_year(cfg.T, cfg.steps_per_year));
  const auto controls = engine.resolve(ClosedFormOptimal{});
  const IncrementStream stream(engine.grid(), cfg.rho, cfg.seed, cfg.trace_paths);
  auto out = detail::open_output(out_dir, "trace.csv");
  write_trace_header(out);
  PathIncrements inc;
  for (std::size_t i = 0; i < cfg.trace_paths; ++i) {
    stream.fill(i, inc);
    write_trace_rows(out, i, engine.simulate(controls, inc), controls);
  }
  const auto path = out_dir / "trace.csv";
  detail::finish(out, path);
  return path;
}

struct VerifyOutcome {
  std::filesystem::path report;
  std::vector<CheckpointEstimate> checkpoints;
  DominanceReport dominance;
  bool passed = false;
};

/// verify.csv: martingale checkpoints at 0, T/4, T/2, 3T/4, T, then the optimal
/// policy and the built-in alternatives. `passed` is false if any row violates.
inline VerifyOutcome cmd_verify(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  const AncillarySolution sol(cfg.market());
  const PathEngine engine(sol, TimeGrid::per_year(cfg.T, cfg.steps_per_year));
  const std::vector<double> checkpoints{0.0, 0.25 * cfg.T, 0.5 * cfg.T, 0.75 * cfg.T, cfg.T};

  VerifyOutcome res;
  res.checkpoints = martingale_diagnostic(engine, cfg.n_paths, cfg.seed, checkpoints);
  res.dominance = dominance_scan(engine, cfg.n_paths, cfg.seed, builtin_alternatives(engine));

  res.passed = res.dominance.passed();
  auto out = detail::open_output(out_dir, "verify.csv");
  write_report_header(out);
  for (const auto& cp : res.checkpoints) {
    write_report_row(out, "martingale_t" + csv::number(cp.t), cp.estimate, cp.G0, !cp.within_band);
    res.passed = res.passed && cp.within_band;
  }
  const auto& d = res.dominance;
  write_report_row(out, d.optimal.name, d.optimal.estimate, d.G0, d.optimal.violates);
  for (const auto& a : d.alternatives) write_report_row(out, a.name, a.estimate, d.G0, a.violates);
  res.report = out_dir / "verify.csv";
  detail::finish(out, res.report);
  return res;
}

}  // namespace reinsure

#endif  // REINSURE_COMMANDS_HPP
