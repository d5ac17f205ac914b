#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "bounds.hpp"
#include "divergences.hpp"
#include "error.hpp"
#include "lasso.hpp"
#include "model.hpp"
#include "penalty.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "typical_set.hpp"

namespace mdl {

/// k-sparse coefficient vector with `magnitude` on the first k coordinates.
inline Eigen::VectorXd sparse_theta(long p, long k, double magnitude = 1.0) {
  if (p < 1 || k < 1 || k > p) throw DomainError("sparse_theta: need 1 <= k <= p");
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  theta.head(k).setConstant(magnitude);
  return theta;
}

/// σ² = θ*ᵀΣθ* / SNR, so that E[(xᵀθ*)²]/σ² = SNR.
inline double snr_to_sigma2(const Eigen::VectorXd& theta_star, const matops::SpdMatrix& sigma,
                            double snr) {
  require_dims(theta_star.size() == sigma.dim(), "snr_to_sigma2: dimension mismatch");
  if (!(snr > 0.0)) throw DomainError("snr must be positive");
  const double signal = theta_star.dot(sigma.matrix() * theta_star);
  if (!(signal > 0.0)) throw DomainError("snr_to_sigma2: theta_star must be nonzero");
  return signal / snr;
}

struct ExperimentConfig {
  long n;
  long p;
  matops::SpdMatrix sigma;
  Eigen::VectorXd theta_star;
  double snr;
  double lambda = 0.5;
  double beta = 0.5;
  double eps = 0.5;
  double tau = 0.03;
  long num_trials = 100;
  std::uint64_t seed = 0;
  SolveOptions solver{};
  unsigned workers = 1;

  /// Σ = I and a 10-sparse unit-magnitude θ* (fewer nonzeros when p < 10).
  ExperimentConfig(long n_, long p_, double snr_, std::uint64_t seed_)
      : n(n_),
        p(p_),
        sigma(matops::SpdMatrix::identity(std::max<long>(p_, 1))),
        theta_star(sparse_theta(std::max<long>(p_, 1), std::min<long>(10, std::max<long>(p_, 1)))),
        snr(snr_),
        seed(seed_) {}

  BoundConfig bound_config() const { return BoundConfig(DivergenceOrder(lambda), beta, eps, tau); }

  void validate() const {
    if (n < 1 || p < 1) throw DomainError("n and p must be >= 1");
    if (num_trials < 1) throw DomainError("num_trials must be >= 1");
    require_dims(sigma.dim() == p && theta_star.size() == p,
                 "Sigma and theta_star must have dimension p");
    if (!(snr > 0.0)) throw DomainError("snr must be positive");
    (void)bound_config();
  }
};

struct TrialRecord {
  long trial_index = 0;
  double snr = 0.0;
  double sigma2 = 0.0;
  double d_bhatta = 0.0;          // d_{0.5}(p*, p_θ̂)
  double two_hellinger_sq = 0.0;  // 2 d²_H(p*, p_θ̂)
  double d_lambda = 0.0;          // d_λ(p*, p_θ̂) at the configured order
  double regret_bound = 0.0;
  double main_term = 0.0;
  bool typical = false;
  bool dominated = false;  // regret_bound >= d_bhatta
  bool violated = false;   // d_lambda > regret_bound
  bool converged = false;
  int iterations = 0;
  long nonzeros = 0;
};

struct ExperimentSummary {
  long num_trials = 0;
  long counted = 0;  // converged trials; aggregates use these only
  long nonconverged = 0;
  long dominated = 0;
  long violated = 0;
  long typical = 0;
  double dominance_fraction = 0.0;
  double violation_fraction = 0.0;
  double typical_fraction = 0.0;
  double mean_ratio = 0.0;  // regret_bound / two_hellinger_sq over trials with 2d²_H > 0
  long ratio_count = 0;
  double probability_floor = 0.0;
  bool floor_vacuous = false;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;
  ExperimentSummary summary;
};

/// Experiment state shared by all trials: the true model and penalty level.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig cfg)
      : cfg_((cfg.validate(), std::move(cfg))),
        sigma2_(snr_to_sigma2(cfg_.theta_star, cfg_.sigma, cfg_.snr)),
        model_(cfg_.theta_star, sigma2_, cfg_.sigma),
        bounds_(cfg_.bound_config()),
        coeffs_(min_coefficients(cfg_.n, cfg_.p, bounds_.lambda, cfg_.beta, cfg_.eps, sigma2_)),
        diagonal_(cfg_.sigma.is_diagonal()) {}

  const ExperimentConfig& config() const noexcept { return cfg_; }
  const GaussianLinearModel& model() const noexcept { return model_; }
  const PenaltyCoefficients& coefficients() const noexcept { return coeffs_; }
  double sigma2() const noexcept { return sigma2_; }

  /// Draws (X, Y) for a trial; deterministic in (seed, trial_index).
  LassoProblem draw_problem(long trial_index) const {
    NormalSampler normal(substream(cfg_.seed, {static_cast<std::uint64_t>(trial_index), 0x5349ULL}));
    Eigen::MatrixXd x = normal.matrix(cfg_.n, cfg_.p);
    if (diagonal_)
      x = x * model_.sqrt_covariance().matrix().diagonal().asDiagonal();
    else
      x = x * model_.sqrt_covariance().matrix();
    Eigen::VectorXd y = x * cfg_.theta_star + std::sqrt(sigma2_) * normal.vector(cfg_.n);
    return LassoProblem(std::move(x), std::move(y), sigma2_, coeffs_);
  }

  TrialRecord run_trial(long trial_index) const {
    const LassoProblem prob = draw_problem(trial_index);
    const SolveReport rep = solve(prob, cfg_.solver);
    const RegretCertificate cert = regret_certificate(prob, model_, bounds_, rep.theta_hat);

    TrialRecord r;
    r.trial_index = trial_index;
    r.snr = cfg_.snr;
    r.sigma2 = sigma2_;
    r.d_bhatta = bhattacharyya(model_, rep.theta_hat);
    r.two_hellinger_sq = 2.0 * hellinger_sq(model_, rep.theta_hat);
    r.d_lambda = renyi_div(model_, rep.theta_hat, bounds_.lambda);
    r.regret_bound = cert.bound;
    r.main_term = cert.main_term;
    r.typical = is_typical(prob.X(), cfg_.sigma, cfg_.eps);
    r.dominated = r.regret_bound >= r.d_bhatta;
    r.violated = r.d_lambda > r.regret_bound;
    r.converged = rep.converged;
    r.iterations = rep.iterations;
    r.nonzeros = static_cast<long>((rep.theta_hat.array() != 0.0).count());
    return r;
  }

 private:
  ExperimentConfig cfg_;
  double sigma2_;
  GaussianLinearModel model_;
  BoundConfig bounds_;
  PenaltyCoefficients coeffs_;
  bool diagonal_;
};

inline TrialRecord run_trial(const ExperimentConfig& cfg, long trial_index) {
  return Experiment(cfg).run_trial(trial_index);
}

/// Deterministic fold over records ordered by trial index.
inline ExperimentSummary summarize(const std::vector<TrialRecord>& records,
                                   const ExperimentConfig& cfg) {
  ExperimentSummary s;
  s.num_trials = static_cast<long>(records.size());
  double ratio_sum = 0.0;
  for (const TrialRecord& r : records) {
    if (!r.converged) {
      ++s.nonconverged;
      continue;
    }
    ++s.counted;
    s.dominated += r.dominated;
    s.violated += r.violated;
    s.typical += r.typical;
    if (r.two_hellinger_sq > 0.0) {
      ratio_sum += r.regret_bound / r.two_hellinger_sq;
      ++s.ratio_count;
    }
  }
  if (s.counted > 0) {
    const double c = static_cast<double>(s.counted);
    s.dominance_fraction = static_cast<double>(s.dominated) / c;
    s.violation_fraction = static_cast<double>(s.violated) / c;
    s.typical_fraction = static_cast<double>(s.typical) / c;
  }
  if (s.ratio_count > 0) s.mean_ratio = ratio_sum / static_cast<double>(s.ratio_count);
  std::tie(s.probability_floor, s.floor_vacuous) =
      probability_floor(cfg.n, cfg.p, cfg.bound_config());
  return s;
}

/// Runs all trials, distributing indices over `cfg.workers` threads. Records
/// are identical for any worker count.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const Experiment exp(cfg);
  std::vector<TrialRecord> records(static_cast<std::size_t>(cfg.num_trials));
  const unsigned workers =
      std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(cfg.num_trials)));
  auto work = [&](unsigned first) {
    for (long t = first; t < cfg.num_trials; t += workers)
      records[static_cast<std::size_t>(t)] = exp.run_trial(t);
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  ExperimentResult out{std::move(records), {}};
  out.summary = summarize(out.records, cfg);
  return out;
}

struct ProbCurvePoint {
  double eps;
  double floor_exact;       // product bound on P(typical)
  double floor_linear;
  double floor_simplified;
  double floor_minus_tau;   // product bound - e^{-τnβ}, clamped at 0
  bool vacuous;
};

inline std::vector<double> linspace(double lo, double hi, long steps) {
  if (steps < 1) throw DomainError("steps must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (long i = 0; i < steps; ++i)
    out[static_cast<std::size_t>(i)] =
        steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
  return out;
}

inline std::vector<ProbCurvePoint> prob_curve(long n, long p, double tau, double beta,
                                              const std::vector<double>& eps_grid) {
  if (!(tau > 0.0)) throw DomainError("tau must be positive");
  detail::check_unit_open(beta, "beta");
  std::vector<ProbCurvePoint> out;
  out.reserve(eps_grid.size());
  for (double eps : eps_grid) {
    const ProbBoundTriple b = prob_lower_bounds(n, p, eps);
    const double tau_term = std::exp(-tau * static_cast<double>(n) * beta);
    const double raw = b.exact_product - tau_term;
    const bool vacuous = b.vacuous || raw <= 0.0;
    out.push_back({eps, b.exact_product, b.linearized, b.simplified, vacuous ? 0.0 : raw, vacuous});
  }
  return out;
}

}  // namespace mdl
