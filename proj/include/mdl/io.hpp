#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "sim.hpp"

namespace mdl::io {

class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& key, const std::string& what)
      : Error(describe(line, key, what)), line_(line), key_(key) {}

  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  static std::string describe(int line, const std::string& key, const std::string& what) {
    std::string where = line > 0 ? "line " + std::to_string(line) : line == 0 ? "override" : "config";
    if (!key.empty()) where += ", key '" + key + "'";
    return where + ": " + what;
  }
  int line_;
  std::string key_;
};

/// Accepted configuration keys.
///   n, p, snr, seed          required
///   lambda, beta, eps, tau   divergence order and bound parameters (0.5, 0.5, 0.5, 0.03)
///   num_trials               100
///   sparsity, magnitude      θ* has `magnitude` on its first `sparsity` coordinates (10, 1.0)
///   covariance, rho          identity | ar1 | equicorrelated, with correlation rho
///   tol, max_iter, accelerate, workers   solver and scheduling
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "n",        "p",         "snr",        "seed",    "lambda",   "beta",
      "eps",      "tau",       "num_trials", "sparsity", "magnitude", "covariance",
      "rho",      "tol",       "max_iter",   "accelerate", "workers"};
  return keys;
}

using KeyValues = std::map<std::string, std::pair<std::string, int>>;  // key -> (value, line)

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline bool known_key(const std::string& key) {
  for (const auto& k : config_keys())
    if (k == key) return true;
  return false;
}

template <typename T>
T parse_number(const std::string& key, const std::pair<std::string, int>& entry) {
  const std::string& text = entry.first;
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw ConfigError(entry.second, key, "expected a number, got '" + text + "'");
  return value;
}

inline bool parse_bool(const std::string& key, const std::pair<std::string, int>& entry) {
  if (entry.first == "true" || entry.first == "1") return true;
  if (entry.first == "false" || entry.first == "0") return false;
  throw ConfigError(entry.second, key, "expected true/false, got '" + entry.first + "'");
}

}  // namespace detail

/// Splits a `key = value` document; `#` starts a comment. Later lines win.
inline KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(line_no, "", "expected 'key = value'");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string value(detail::trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(line_no, "", "missing key");
    if (!detail::known_key(key)) throw ConfigError(line_no, key, "unknown key");
    if (value.empty()) throw ConfigError(line_no, key, "missing value");
    kv[key] = {value, line_no};
  }
  return kv;
}

/// Builds and validates an ExperimentConfig. `overrides` take precedence over
/// the document and are reported as line 0.
/// `default_seed` is used only when neither the document nor the overrides set one.
inline ExperimentConfig parse_config(std::string_view text,
                                     const std::map<std::string, std::string>& overrides = {},
                                     std::optional<std::uint64_t> default_seed = std::nullopt) {
  KeyValues kv = parse_key_values(text);
  if (default_seed && !kv.count("seed") && !overrides.count("seed"))
    kv["seed"] = {std::to_string(*default_seed), -1};
  for (const auto& [key, value] : overrides) {
    if (!detail::known_key(key)) throw ConfigError(0, key, "unknown key");
    kv[key] = {value, 0};
  }
  auto required = [&](const std::string& key) -> const std::pair<std::string, int>& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError(-1, key, "required key missing");
    return it->second;
  };
  auto get = [&](const std::string& key) -> std::optional<std::pair<std::string, int>> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };

  const long n = detail::parse_number<long>("n", required("n"));
  const long p = detail::parse_number<long>("p", required("p"));
  const double snr = detail::parse_number<double>("snr", required("snr"));
  const auto seed = detail::parse_number<std::uint64_t>("seed", required("seed"));
  if (n < 1) throw ConfigError(required("n").second, "n", "must be >= 1");
  if (p < 1) throw ConfigError(required("p").second, "p", "must be >= 1");
  if (!(snr > 0.0)) throw ConfigError(required("snr").second, "snr", "must be positive");

  auto real = [&](const std::string& key, double fallback, double lo, double hi, bool open_lo,
                  bool open_hi) {
    const auto entry = get(key);
    if (!entry) return fallback;
    const double v = detail::parse_number<double>(key, *entry);
    const bool ok = (open_lo ? v > lo : v >= lo) && (open_hi ? v < hi : v <= hi);
    if (!ok)
      throw ConfigError(entry->second, key,
                        "value " + entry->first + " out of range " + (open_lo ? "(" : "[") +
                            std::to_string(lo) + ", " + std::to_string(hi) + (open_hi ? ")" : "]"));
    return v;
  };
  auto integer = [&](const std::string& key, long fallback, long lo) {
    const auto entry = get(key);
    if (!entry) return fallback;
    const long v = detail::parse_number<long>(key, *entry);
    if (v < lo) throw ConfigError(entry->second, key, "must be >= " + std::to_string(lo));
    return v;
  };
  const double inf = std::numeric_limits<double>::infinity();

  ExperimentConfig cfg(n, p, snr, seed);
  cfg.lambda = real("lambda", 0.5, 0.0, 1.0, true, true);
  cfg.beta = real("beta", 0.5, 0.0, 1.0, true, true);
  cfg.eps = real("eps", 0.5, 0.0, 1.0, true, true);
  cfg.tau = real("tau", 0.03, 0.0, inf, true, true);
  cfg.num_trials = integer("num_trials", 100, 1);
  if (cfg.lambda > 1.0 - cfg.beta + 1e-12) {
    const auto entry = get("lambda");
    throw ConfigError(entry ? entry->second : -1, "lambda",
                      "inadmissible: lambda must not exceed 1 - beta");
  }

  const long sparsity = integer("sparsity", std::min<long>(10, p), 1);
  if (sparsity > p) throw ConfigError(get("sparsity")->second, "sparsity", "must not exceed p");
  const double magnitude = real("magnitude", 1.0, 0.0, inf, true, true);
  cfg.theta_star = sparse_theta(p, sparsity, magnitude);

  const std::string cov = get("covariance") ? get("covariance")->first : "identity";
  const double rho = real("rho", 0.0, -1.0, 1.0, true, true);
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(p, p);
  if (cov == "ar1") {
    for (long i = 0; i < p; ++i)
      for (long j = 0; j < p; ++j) sigma(i, j) = std::pow(rho, std::abs(i - j));
  } else if (cov == "equicorrelated") {
    sigma.setConstant(rho);
    sigma.diagonal().setOnes();
  } else if (cov != "identity") {
    throw ConfigError(get("covariance")->second, "covariance",
                      "expected identity, ar1 or equicorrelated");
  }
  try {
    cfg.sigma = matops::SpdMatrix(sigma);
  } catch (const Error& e) {
    throw ConfigError(get("rho") ? get("rho")->second : -1, "rho", e.what());
  }

  cfg.solver.tol = real("tol", 1e-6, 0.0, inf, true, true);
  cfg.solver.max_iter = static_cast<int>(integer("max_iter", 10000, 1));
  if (const auto entry = get("accelerate")) cfg.solver.accelerate = detail::parse_bool("accelerate", *entry);
  cfg.workers = static_cast<unsigned>(integer("workers", 1, 1));
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path,
                                    const std::map<std::string, std::string>& overrides = {},
                                    std::optional<std::uint64_t> default_seed = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides, default_seed);
}

/// %.10g: ten significant digits.
inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline constexpr std::string_view kTrialCsvHeader =
    "trial,snr,sigma2,d_bhatta,two_hellinger_sq,regret_bound,typical,dominated";
inline constexpr std::string_view kProbCurveCsvHeader =
    "epsilon,floor_exact,floor_linear,floor_simplified,floor_minus_tau_term";

inline std::string trials_csv(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw DomainError("emit_csv: no records");
  std::string out(kTrialCsvHeader);
  out += '\n';
  for (const TrialRecord& r : records) {
    out += std::to_string(r.trial_index) + ',' + format_real(r.snr) + ',' + format_real(r.sigma2) +
           ',' + format_real(r.d_bhatta) + ',' + format_real(r.two_hellinger_sq) + ',' +
           format_real(r.regret_bound) + ',' + (r.typical ? '1' : '0') + ',' +
           (r.dominated ? '1' : '0') + '\n';
  }
  return out;
}

inline std::string prob_curve_csv(const std::vector<ProbCurvePoint>& points) {
  std::string out(kProbCurveCsvHeader);
  out += '\n';
  for (const ProbCurvePoint& pt : points)
    out += format_real(pt.eps) + ',' + format_real(pt.floor_exact) + ',' +
           format_real(pt.floor_linear) + ',' + format_real(pt.floor_simplified) + ',' +
           format_real(pt.floor_minus_tau) + '\n';
  return out;
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << contents;
  if (!out) throw Error("write to '" + path + "' failed");
}

/// Writes records ordered by trial index, LF line endings.
inline void emit_csv(const std::vector<TrialRecord>& records, const std::string& path) {
  write_file(path, trials_csv(records));
}

inline std::string format_certificate(const RegretCertificate& cert, const Experiment& exp) {
  std::ostringstream os;
  const ExperimentConfig& cfg = exp.config();
  os << "n = " << cfg.n << '\n'
     << "p = " << cfg.p << '\n'
     << "snr = " << format_real(cfg.snr) << '\n'
     << "sigma2 = " << format_real(exp.sigma2()) << '\n'
     << "lambda = " << format_real(cert.lambda) << '\n'
     << "beta = " << format_real(cfg.beta) << '\n'
     << "eps = " << format_real(cfg.eps) << '\n'
     << "tau = " << format_real(cfg.tau) << '\n'
     << "mu1 = " << format_real(cert.mu1) << '\n'
     << "mu2 = " << format_real(cert.mu2) << '\n'
     << "main_term = " << format_real(cert.main_term) << '\n'
     << "bound = " << format_real(cert.bound) << '\n'
     << "probability_floor = " << format_real(cert.probability_floor) << '\n'
     << "vacuous = " << (cert.vacuous ? "true" : "false") << '\n'
     << "kappa = " << format_real(cert.kappa) << '\n'
     << "simplified_floor = " << format_real(cert.simplified_floor) << '\n';
  return os.str();
}

}  // namespace mdl::io
