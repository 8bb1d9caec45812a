#ifndef REINSURE_CONFIG_HPP
#define REINSURE_CONFIG_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "reinsure/models.hpp"

namespace reinsure {

/// Configuration failures. `messages` lists every problem found, one per entry.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> messages)
      : std::runtime_error(join(messages)), messages_(std::move(messages)) {}
  const std::vector<std::string>& messages() const { return messages_; }

 private:
  static std::string join(const std::vector<std::string>& m) {
    std::string out;
    for (const auto& s : m) out += (out.empty() ? "" : "\n") + s;
    return out;
  }
  std::vector<std::string> messages_;
};

enum class ModelChoice { holee, vasicek };

inline std::optional<ModelChoice> parse_model(const std::string& s) {
  if (s == "holee" || s == "ho-lee" || s == "ho_lee") return ModelChoice::holee;
  if (s == "vasicek") return ModelChoice::vasicek;
  return std::nullopt;
}

inline const char* to_string(ModelChoice m) { return m == ModelChoice::vasicek ? "vasicek" : "holee"; }

/// Everything a run needs. Parameters of both rate models are kept so the model
/// can be switched from the command line.
struct RunConfig {
  // [market]
  double T = 0.0;
  double T1 = 0.0;
  double p = 0.0;
  double X0 = 1.0;
  double rho = 0.0;
  double delta = 1e6;
  // [rate]
  ModelChoice model = ModelChoice::holee;
  double b = 0.0;
  std::optional<double> b_hat;  // no paper value; Vasicek runs fall back to kDefaultBHat
  CoefficientFn a_tilde = 0.005;
  CoefficientFn theta = 0.002;
  CoefficientFn xi;
  double r0 = 0.03;
  // [inflation]
  CoefficientFn alpha = 0.02;
  CoefficientFn beta;
  CoefficientFn sigma0;
  CoefficientFn sigma0_bar;
  double I0 = 0.02;
  double Pi0 = 1.0;
  // [stock]
  CoefficientFn lambda = 0.2;
  CoefficientFn sigma2 = 0.2;
  double S0 = 1.0;
  // [surplus]
  CoefficientFn c = 0.1;
  CoefficientFn sigma3 = 1.0;
  double R0 = 0.0;
  // [run]
  int steps_per_year = 250;
  std::size_t n_paths = 200000;
  std::size_t trace_paths = 10;
  std::uint64_t seed = 12345;
  std::string out_dir = ".";
  std::vector<double> p_sweep{0.3, 0.5, 0.7};

  static constexpr double kDefaultBHat = 0.05;

  MarketParams market(ModelChoice which) const {
    MarketParams P;
    P.T = T;
    P.T1 = T1;
    P.p = p;
    P.X0 = X0;
    P.rho = rho;
    P.pi_bound_delta = delta;
    if (which == ModelChoice::vasicek) {
      P.rate.kind = Vasicek{theta, b_hat.value_or(kDefaultBHat)};
    } else {
      P.rate.kind = HoLee{a_tilde};
    }
    P.rate.b = b;
    P.rate.xi = xi;
    P.rate.r0 = r0;
    P.inflation = {alpha, beta, sigma0, sigma0_bar, I0, Pi0};
    P.stock = {lambda, sigma2, S0};
    P.surplus = {c, sigma3, R0};
    return P;
  }

  MarketParams market() const { return market(model); }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline std::optional<double> to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (...) {
    return std::nullopt;
  }
}

// `0.01` or `pwl 0:0.01 40:0.015 120:0.02`
inline std::optional<CoefficientFn> to_coefficient(const std::string& s, std::string& why) {
  if (s.rfind("pwl", 0) != 0) {
    auto v = to_double(s);
    if (!v) why = "expected a number or 'pwl t:v ...'";
    if (v) return CoefficientFn(*v);
    return std::nullopt;
  }
  std::istringstream in(s.substr(3));
  std::vector<CoefficientFn::Knot> knots;
  std::string tok;
  while (in >> tok) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) {
      why = "table entry '" + tok + "' is not t:v";
      return std::nullopt;
    }
    auto t = to_double(tok.substr(0, colon));
    auto v = to_double(tok.substr(colon + 1));
    if (!t || !v) {
      why = "table entry '" + tok + "' is not numeric";
      return std::nullopt;
    }
    knots.push_back({*t, *v});
  }
  try {
    return CoefficientFn::piecewise_linear(std::move(knots));
  } catch (const std::invalid_argument& e) {
    why = e.what();
    return std::nullopt;
  }
}

}  // namespace detail

/// Parses the `key = value` format with `[section]` headers.
///
/// Sections: market, rate, inflation, stock, surplus, run. Blank lines and
/// lines starting with '#' or ';' are ignored. Unknown or repeated keys are
/// errors, as is giving both `xi` and `eta`. Missing required keys are all
/// reported together. Validation of the resulting parameters is separate
/// (see validate_config).
inline RunConfig parse_config_text(const std::string& text) {
  static const std::map<std::string, std::set<std::string>> allowed = {
      {"market", {"T", "T1", "p", "X0", "rho", "delta", "xi", "eta"}},
      {"rate", {"model", "b", "b_hat", "a_tilde", "theta", "xi", "eta", "r0"}},
      {"inflation", {"alpha", "beta", "sigma0", "sigma0_bar", "I0", "Pi0"}},
      {"stock", {"lambda", "sigma2", "S0"}},
      {"surplus", {"c", "sigma3", "R0"}},
      {"run", {"steps_per_year", "n_paths", "trace_paths", "seed", "out", "p_sweep"}},
  };

  RunConfig cfg;
  std::vector<std::string> errors;
  std::set<std::string> seen;
  std::optional<CoefficientFn> eta_fn;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::trim(raw);
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back(where + "malformed section header");
        continue;
      }
      section = detail::trim(line.substr(1, line.size() - 2));
      if (!allowed.count(section)) errors.push_back(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back(where + "expected key = value");
      continue;
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (section.empty()) {
      errors.push_back(where + "key '" + key + "' outside any section");
      continue;
    }
    auto sec = allowed.find(section);
    if (sec == allowed.end()) continue;
    if (!sec->second.count(key)) {
      errors.push_back(where + "unknown key '" + key + "' in [" + section + "]");
      continue;
    }
    const std::string canonical = (key == "xi" || key == "eta") ? key : section + "." + key;
    if (!seen.insert(canonical).second) {
      errors.push_back(where + "duplicate key '" + key + "'");
      continue;
    }

    auto number = [&](double& dst) {
      if (auto v = detail::to_double(value)) {
        dst = *v;
      } else {
        errors.push_back(where + key + ": expected a number, got '" + value + "'");
      }
    };
    auto coefficient = [&](CoefficientFn& dst) {
      std::string why;
      if (auto v = detail::to_coefficient(value, why)) {
        dst = *v;
      } else {
        errors.push_back(where + key + ": " + why);
      }
    };
    auto count = [&](auto& dst) {
      auto v = detail::to_double(value);
      if (v && *v >= 0 && *v == static_cast<double>(static_cast<long long>(*v))) {
        dst = static_cast<std::remove_reference_t<decltype(dst)>>(*v);
      } else {
        errors.push_back(where + key + ": expected a non-negative integer, got '" + value + "'");
      }
    };

    if (key == "T") number(cfg.T);
    else if (key == "T1") number(cfg.T1);
    else if (key == "p") number(cfg.p);
    else if (key == "X0") number(cfg.X0);
    else if (key == "rho") number(cfg.rho);
    else if (key == "delta") number(cfg.delta);
    else if (key == "xi") coefficient(cfg.xi);
    else if (key == "eta") {
      CoefficientFn tmp;
      coefficient(tmp);
      eta_fn = tmp;
    } else if (key == "model") {
      if (auto m = parse_model(value)) {
        cfg.model = *m;
      } else {
        errors.push_back(where + "model must be holee or vasicek, got '" + value + "'");
      }
    } else if (key == "b") number(cfg.b);
    else if (key == "b_hat") {
      double v = 0.0;
      number(v);
      cfg.b_hat = v;
    } else if (key == "a_tilde") coefficient(cfg.a_tilde);
    else if (key == "theta") coefficient(cfg.theta);
    else if (key == "r0") number(cfg.r0);
    else if (key == "alpha") coefficient(cfg.alpha);
    else if (key == "beta") coefficient(cfg.beta);
    else if (key == "sigma0") coefficient(cfg.sigma0);
    else if (key == "sigma0_bar") coefficient(cfg.sigma0_bar);
    else if (key == "I0") number(cfg.I0);
    else if (key == "Pi0") number(cfg.Pi0);
    else if (key == "lambda") coefficient(cfg.lambda);
    else if (key == "sigma2") coefficient(cfg.sigma2);
    else if (key == "S0") number(cfg.S0);
    else if (key == "c") coefficient(cfg.c);
    else if (key == "sigma3") coefficient(cfg.sigma3);
    else if (key == "R0") number(cfg.R0);
    else if (key == "steps_per_year") count(cfg.steps_per_year);
    else if (key == "n_paths") count(cfg.n_paths);
    else if (key == "trace_paths") count(cfg.trace_paths);
    else if (key == "seed") count(cfg.seed);
    else if (key == "out") cfg.out_dir = value;
    else if (key == "p_sweep") {
      cfg.p_sweep.clear();
      std::string item;
      std::istringstream list(value);
      while (std::getline(list, item, ',')) {
        if (auto v = detail::to_double(detail::trim(item))) {
          cfg.p_sweep.push_back(*v);
        } else {
          errors.push_back(where + "p_sweep: '" + item + "' is not a number");
        }
      }
    }
  }

  const std::pair<const char*, const char*> required[] = {
      {"market.T", "T"},           {"market.T1", "T1"},
      {"market.p", "p"},           {"market.rho", "rho"},
      {"rate.b", "b"},             {"inflation.beta", "beta"},
      {"inflation.sigma0", "sigma0"}, {"inflation.sigma0_bar", "sigma0_bar"},
  };
  for (const auto& [id, name] : required) {
    if (!seen.count(id)) errors.push_back(std::string("missing required key '") + name + "'");
  }
  const bool has_xi = seen.count("xi") > 0;
  const bool has_eta = seen.count("eta") > 0;
  if (has_xi && has_eta) errors.push_back("give either xi or eta, not both");
  if (!has_xi && !has_eta) errors.push_back("missing required key 'xi' or 'eta'");
  if (!errors.empty()) throw ConfigError(errors);

  if (eta_fn) cfg.xi = xi_from_eta(*eta_fn, cfg.rho, cfg.sigma0);
  return cfg;
}

/// Parameter violations of the selected model plus run-setting checks.
inline std::vector<std::string> validate_config(const RunConfig& cfg) {
  std::vector<std::string> out;
  for (const auto& v : validate(cfg.market())) out.push_back(describe(v));
  if (cfg.steps_per_year < 1) out.push_back("steps_per_year: must be >= 1");
  if (cfg.n_paths < 2) out.push_back("n_paths: must be >= 2");
  for (double p : cfg.p_sweep) {
    if (!(p > 0.0 && p < 1.0)) out.push_back("p_sweep: every p must lie in (0,1)");
  }
  if (cfg.p_sweep.empty()) out.push_back("p_sweep: must not be empty");
  return out;
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  std::ostringstream text;
  text << in.rdbuf();
  RunConfig cfg = parse_config_text(text.str());
  const auto problems = validate_config(cfg);
  if (!problems.empty()) throw ConfigError(problems);
  return cfg;
}

}  // namespace reinsure

#endif  // REINSURE_CONFIG_HPP
