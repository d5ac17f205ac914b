#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bounds.hpp"
#include "divergences.hpp"
#include "instances.hpp"
#include "lasso.hpp"
#include "matops.hpp"
#include "model.hpp"
#include "numdiff.hpp"
#include "penalty.hpp"
#include "sim.hpp"
#include "typical_set.hpp"

// Invariant suite behind `mdl_lasso verify`.

namespace mdl::verify {

struct CheckResult {
  std::string module;
  std::string name;
  bool passed;
  std::string detail;
};

struct Options {
  bool quick = false;
  std::uint64_t seed = 20240229;
};

namespace detail {

class Suite {
 public:
  explicit Suite(Options opts) : opts_(opts) {}

  int scale(int full, int quick) const { return opts_.quick ? quick : full; }
  std::uint64_t seed() const { return opts_.seed; }

  void run(const std::string& module, const std::string& name,
           const std::function<std::string(bool&)>& body) {
    bool ok = true;
    std::string detail;
    try {
      detail = body(ok);
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    results_.push_back({module, name, ok, detail});
  }

  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  Options opts_;
  std::vector<CheckResult> results_;
};

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

}  // namespace detail

inline void check_matops(detail::Suite& s) {
  s.run("matops", "sqrt_sym reconstructs S", [&](bool& ok) {
    NormalSampler rng(substream(s.seed(), {1, 1}));
    double worst = 0.0;
    for (int k = 0; k < s.scale(50, 10); ++k) {
      const Eigen::MatrixXd a = instances::random_spd(rng, 2 + k % 7);
      const Eigen::MatrixXd r = matops::sqrt_sym(a);
      worst = std::max(worst, numdiff::rel_error(r * r, a));
      if (matops::min_eigenvalue(r) <= 0.0) ok = false;
    }
    ok = ok && worst <= 1e-10;
    return "max rel err " + detail::fmt(worst);
  });
  s.run("matops", "sherman_morrison matches direct inversion", [&](bool& ok) {
    NormalSampler rng(substream(s.seed(), {1, 2}));
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Eigen::Index p = 2 + k % 7;
      const Eigen::MatrixXd a = instances::random_spd(rng, p);
      const Eigen::VectorXd c = 0.3 * rng.vector(p), d = 0.3 * rng.vector(p);
      const Eigen::MatrixXd direct = (a + c * d.transpose()).fullPivLu().inverse();
      worst = std::max(worst, numdiff::rel_error(matops::sherman_morrison(a.inverse(), c, d), direct));
    }
    ok = worst <= 1e-9;
    return "max rel err " + detail::fmt(worst);
  });
  s.run("matops", "min_eigenvalue below Rayleigh quotients", [&](bool& ok) {
    NormalSampler rng(substream(s.seed(), {1, 3}));
    for (int k = 0; k < s.scale(20, 5); ++k) {
      const Eigen::MatrixXd a = instances::random_symmetric(rng, 6);
      const double lo = matops::min_eigenvalue(a);
      for (int v = 0; v < 20; ++v) {
        const Eigen::VectorXd x = rng.vector(6);
        if (lo > x.dot(a * x) / x.squaredNorm() + 1e-12) ok = false;
      }
    }
    return std::string();
  });
}

inline void check_model(detail::Suite& s) {
  const int instances_n = s.scale(100, 20);
  s.run("model", "Renyi divergence nonnegative and increasing in lambda", [&](bool& ok) {
    NormalSampler rng(substream(s.seed(), {2, 1}));
    for (int k = 0; k < instances_n; ++k) {
      const auto model = instances::random_model(rng, 1 + k % 5);
      const Eigen::VectorXd theta = instances::displaced_theta(rng, model, 0.1 + 3.0 * rng.uniform());
      double prev = 0.0;
      for (int i = 1; i <= 19; ++i) {
        const double d = renyi_div(model, theta, DivergenceOrder(0.05 * i));
        if (d < prev || d <= 0.0) ok = false;
        prev = d;
      }
      if (renyi_div(model, model.theta_star(), DivergenceOrder(0.5)) != 0.0) ok = false;
    }
    return std::string();
  });
  s.run("model", "gradient matches finite differences", [&](bool& ok) {
    NormalSampler rng(substream(s.seed(), {2, 2}));
    double worst = 0.0;
    for (int k = 0; k < instances_n; ++k) {
      const auto model = instances::random_model(rng, 1 + k % 5);
      const DivergenceOrder order(0.05 + 0.9 * rng.uniform());
      const Eigen::VectorXd theta = instances::displaced_theta(rng, model, 0.1 + 3.0 * rng.uniform());
      const auto f = [&](const Eigen::VectorXd& t) { return renyi_div(model, t, order); };
      worst = std::max(worst, numdiff::rel_error(renyi_grad(model, theta, order),
                                                 numdiff::gradient(f, theta)));
    }
    ok = worst <= 1e-5;
    return "max rel err " + detail::fmt(worst);
  });
  s.run("model", "Hessian matches finite differences of the gradient", [&](bool& ok) {
    NormalSampler rng(substream(s.seed(), {2, 3}));
    double worst = 0.0;
    for (int k = 0; k < instances_n; ++k) {
      const auto model = instances::random_model(rng, 1 + k % 5);
      const DivergenceOrder order(0.05 + 0.9 * rng.uniform());
      const Eigen::VectorXd theta = instances::displaced_theta(rng, model, 0.1 + 3.0 * rng.uniform());
      const auto g = [&](const Eigen::VectorXd& t) { return renyi_grad(model, t, order); };
      worst = std::max(worst, numdiff::rel_error(renyi_hess(model, theta, order),
                                                 numdiff::jacobian(g, theta)));
    }
    ok = worst <= 1e-4;
    return "max rel err " + detail::fmt(worst);
  });
  s.run("model", "negative Hessian dominated by (lambda/8 sigma2) Sigma", [&](bool& ok) {
    NormalSampler rng(substream(s.seed(), {2, 4}));
    double worst = 1.0;
    for (int k = 0; k < s.scale(1000, 100); ++k) {
      const auto model = instances::random_model(rng, 1 + k % 6);
      const DivergenceOrder order(0.02 + 0.96 * rng.uniform());
      const double ratio = std::exp(8.0 * rng.uniform() - 4.0) / (order * (1.0 - order));
      const Eigen::VectorXd theta = instances::displaced_theta(rng, model, ratio);
      worst = std::min(worst, hessian_bound_gap(model, theta, order));
    }
    ok = worst >= -1e-8;
    return "min gap " + detail::fmt(worst);
  });
  s.run("model", "tilted covariance closed form equals rank-one inverse", [&](bool& ok) {
    NormalSampler rng(substream(s.seed(), {2, 5}));
    double worst = 0.0;
    for (int k = 0; k < instances_n; ++k) {
      const auto model = instances::random_model(rng, 1 + k % 6);
      const DivergenceOrder order(0.05 + 0.9 * rng.uniform());
      const Eigen::VectorXd theta = instances::displaced_theta(rng, model, 4.0 * rng.uniform());
      worst = std::max(worst, numdiff::rel_error(tilted(model, theta, order).Sigma_tilted,
                                                 tilted_covariance_rank_one(model, theta, order)));
    }
    ok = worst <= 1e-9;
    return "max rel err " + detail::fmt(worst);
  });
  s.run("model", "Renyi divergence tends to KL as lambda -> 1", [&](bool& ok) {
    NormalSampler rng(substream(s.seed(), {2, 6}));
    double worst = 0.0;
    for (int k = 0; k < instances_n; ++k) {
      const auto model = instances::random_model(rng, 1 + k % 5);
      const DivergenceOrder order(0.999);
      const Eigen::VectorXd theta = instances::displaced_theta(rng, model, 0.1 * rng.uniform());
      const double kl = kl_closed(model, theta);
      worst = std::max(worst, std::abs(renyi_div(model, theta, order) - kl) / kl);
    }
    ok = worst <= 2e-3;
    return "max rel err " + detail::fmt(worst);
  });
}

inline void check_divergences(detail::Suite& s) {
  s.run("divergences", "alpha-divergence bounded and dominated by Renyi", [&](bool& ok) {
    NormalSampler rng(substream(s.seed(), {3, 1}));
    double slack = 1.0;
    for (int k = 0; k < s.scale(1000, 100); ++k) {
      const auto model = instances::random_model(rng, 1 + k % 5);
      const AlphaOrder a(-0.98 + 1.96 * rng.uniform());
      const Eigen::VectorXd theta =
          instances::displaced_theta(rng, model, std::exp(26.0 * rng.uniform() - 8.0));
      const double d = alpha_div(model, theta, a);
      const double alpha = a.value();
      if (d < 0.0 || d > 4.0 / (1.0 - alpha * alpha)) ok = false;
      const double lam = (1.0 - alpha) / 2.0;
      slack = std::min(slack, renyi_div(model, theta, DivergenceOrder(lam)) - lam * d);
      if (2.0 * hellinger_sq(model, theta) > bhattacharyya(model, theta) + 1e-12) ok = false;
    }
    ok = ok && slack >= -1e-12;
    return "min slack " + detail::fmt(slack);
  });
  s.run("divergences", "Monte-Carlo agrees with closed form", [&](bool& ok) {
    NormalSampler rng(substream(s.seed(), {3, 2}));
    const int runs = s.scale(100, 10);
    int within = 0;
    for (int k = 0; k < runs; ++k) {
      const auto model = instances::random_model(rng, 1 + k % 5);
      const DivergenceOrder order(0.5);
      const Eigen::VectorXd theta = instances::displaced_theta(rng, model, 0.05 + 0.45 * rng.uniform());
      const McEstimate mc = renyi_mc(model, theta, order, s.scale(100000, 20000), s.seed() + k);
      within += std::abs(mc.estimate - renyi_div(model, theta, order)) <= 3.0 * mc.std_error;
    }
    ok = within >= s.scale(99, runs - 1);
    return std::to_string(within) + "/" + std::to_string(runs) + " within 3 SE";
  });
}

inline void check_penalty(detail::Suite& s) {
  s.run("penalty", "Kraft sum at most one", [&](bool& ok) {
    for (double e = 0.0; e <= 4.0 + 1e-9; e += 0.05) {
      const long p = static_cast<long>(std::llround(std::pow(10.0, e)));
      if (kraft_sum(p) > 1.0) ok = false;
    }
    return std::string();
  });
  s.run("penalty", "randomized rounding is unbiased in value and magnitude", [&](bool& ok) {
    const QuantizerSpec spec(0.7, WeightVector(Eigen::Vector3d(1.0, 2.0, 0.5)), 0.5);
    const Eigen::VectorXd theta = Eigen::Vector3d(0.33, -1.21, 2.9);
    const int draws = s.scale(100000, 20000);
    std::vector<RunningStats> mean(3), absval(3), sq(3);
    for (int k = 0; k < draws; ++k) {
      const QuantizedPoint q = randomize_quantize(theta, spec, s.seed(), k);
      for (int j = 0; j < 3; ++j) {
        mean[j].push(q.theta[j]);
        absval[j].push(std::abs(q.theta[j]));
        sq[j].push((q.theta[j] - theta[j]) * (q.theta[j] - theta[j]));
      }
    }
    for (int j = 0; j < 3; ++j) {
      if (std::abs(mean[j].mean() - theta[j]) > 4.0 * mean[j].std_error()) ok = false;
      if (std::abs(absval[j].mean() - std::abs(theta[j])) > 4.0 * absval[j].std_error()) ok = false;
      if (sq[j].mean() > spec.spacing(j) * std::abs(theta[j]) + 4.0 * sq[j].std_error()) ok = false;
    }
    return std::string();
  });
  s.run("penalty", "coefficient ratio reproduces design_ratio", [&](bool& ok) {
    double worst = 0.0;
    for (double lam = 0.05; lam < 0.96; lam += 0.05) {
      const DivergenceOrder order(lam);
      const double ratio = min_coefficients(200, 1000, order, 1.0 - lam, 1e-12, 1.0).mu1 /
                           fixed_design_mu1(200, 1000, 1.0);
      worst = std::max(worst, std::abs(ratio - design_ratio(order)));
    }
    double prev = 0.0;
    for (int i = 1; i < 100; ++i) {
      const double r = design_ratio(DivergenceOrder(i / 100.0));
      if (r <= prev || r < 1.0) ok = false;
      prev = r;
    }
    ok = ok && worst <= 1e-9;
    return "max abs err " + detail::fmt(worst);
  });
}

inline void check_typical_set(detail::Suite& s) {
  s.run("typical_set", "exponent dominates eps^2/7", [&](bool& ok) {
    for (int i = 1; i <= 1000; ++i) {
      const double eps = i * 1e-3;
      if (0.5 * (eps - std::log1p(eps)) < eps * eps / 7.0) ok = false;
    }
    return std::string();
  });
  s.run("typical_set", "bound chain ordering", [&](bool& ok) {
    for (long n : {10L, 100L, 1000L})
      for (long p : {1L, 10L, 1000L})
        for (int e = 1; e <= 9; ++e) {
          const ProbBoundTriple b = prob_lower_bounds(n, p, e / 10.0);
          if (b.linearized >= 0.0 && !(b.exact_product >= b.linearized)) ok = false;
          if (!(b.linearized >= b.simplified - 1e-15)) ok = false;
        }
    return std::string();
  });
  s.run("typical_set", "empirical membership above product bound", [&](bool& ok) {
    const long n = 50, p = 5;
    const double eps = 0.3;
    const int draws = s.scale(10000, 2000);
    const auto sigma = matops::SpdMatrix::identity(p);
    NormalSampler rng(substream(s.seed(), {5, 1}));
    int inside = 0, conj_mismatch = 0;
    for (int k = 0; k < draws; ++k) {
      const Eigen::MatrixXd x = rng.matrix(n, p);
      const bool all = is_typical(x, sigma, eps);
      bool conj = true;
      for (long j = 0; j < p; ++j) conj = conj && column_is_typical(x, j, 1.0, eps);
      conj_mismatch += all != conj;
      inside += all;
    }
    const double freq = static_cast<double>(inside) / draws;
    const double bound = prob_lower_bounds(n, p, eps).exact_product;
    ok = conj_mismatch == 0 && freq >= bound - 3.0 * proportion_std_error(freq, draws);
    return "freq " + detail::fmt(freq) + " vs bound " + detail::fmt(bound);
  });
  s.run("typical_set", "Gamma tail below Sanov bound", [&](bool& ok) {
    const GammaTailResult r = gamma_tail_check(50, 0.3, s.scale(100000, 10000), s.seed());
    ok = r.empirical_tail <= r.analytic_bound + 3.0 * r.std_error;
    return "tail " + detail::fmt(r.empirical_tail) + " vs bound " + detail::fmt(r.analytic_bound);
  });
}

inline void check_lasso(detail::Suite& s) {
  s.run("lasso", "monotone descent and KKT convergence", [&](bool& ok) {
    NormalSampler rng(substream(s.seed(), {6, 1}));
    for (int k = 0; k < s.scale(20, 5); ++k) {
      const long n = 30 + 5 * k, p = 10 + 7 * k;
      Eigen::MatrixXd x = rng.matrix(n, p);
      Eigen::VectorXd y = x.leftCols(3) * Eigen::Vector3d(1.0, -2.0, 0.5) + rng.vector(n);
      const LassoProblem prob(x, y, 1.0, PenaltyCoefficients(0.05 + 0.1 * rng.uniform(), 0.0));
      double prev = objective(prob, Eigen::VectorXd::Zero(p));
      const SolveReport rep = solve(prob, {}, [&](int, const Eigen::VectorXd&, double obj) {
        if (obj > prev + 1e-12) ok = false;
        prev = obj;
      });
      if (!rep.converged) ok = false;
    }
    return std::string();
  });
  s.run("lasso", "orthonormal design matches separable solution", [&](bool& ok) {
    NormalSampler rng(substream(s.seed(), {6, 2}));
    const long n = 64, p = 8;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(rng.matrix(n, p));
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
    const Eigen::MatrixXd x = q * std::sqrt(static_cast<double>(n));
    const Eigen::VectorXd y = x * rng.vector(p) + rng.vector(n);
    const double sigma2 = 1.3, mu1 = 0.4;
    const LassoProblem prob(x, y, sigma2, PenaltyCoefficients(mu1, 0.0));
    const SolveReport rep = solve(prob, {1e-10, 100000});
    const Eigen::VectorXd b = x.transpose() * y / static_cast<double>(n);
    double worst = 0.0;
    for (long j = 0; j < p; ++j)
      worst = std::max(worst, std::abs(rep.theta_hat[j] - soft_threshold(b[j], mu1 * sigma2)));
    ok = worst <= 1e-6;
    return "max abs err " + detail::fmt(worst);
  });
}

inline void check_bounds(detail::Suite& s) {
  s.run("bounds", "probability floor structure", [&](bool& ok) {
    const BoundConfig cfg(DivergenceOrder(0.5), 0.5, 0.5, 0.03);
    const double expect = prob_lower_bounds(200, 1000, 0.5).exact_product - std::exp(-3.0);
    ok = std::abs(probability_floor(200, 1000, cfg).first - expect) <= 1e-12;
    return "floor " + detail::fmt(expect);
  });
  s.run("bounds", "main term is the infimum over probes", [&](bool& ok) {
    NormalSampler rng(substream(s.seed(), {7, 1}));
    const long n = 40, p = 15;
    const Eigen::VectorXd theta_star = sparse_theta(p, 3);
    Eigen::MatrixXd x = rng.matrix(n, p);
    Eigen::VectorXd y = x * theta_star + rng.vector(n);
    const LassoProblem prob(x, y, 1.0, min_coefficients(n, p, DivergenceOrder(0.5), 0.5, 0.5, 1.0));
    const SolveReport rep = solve(prob, {1e-10, 100000});
    const double main = regret_main_term(prob, theta_star, rep.theta_hat);
    for (int k = 0; k < 100; ++k) {
      const Eigen::VectorXd probe = rep.theta_hat + 0.3 * rng.uniform() * rng.vector(p);
      if (regret_probe(prob, theta_star, probe) < main - 1e-9) ok = false;
    }
    return std::string();
  });
  s.run("bounds", "alpha bound decreasing in P above 1/e", [&](bool& ok) {
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 200; ++i) {
      const double prob = std::exp(-1.0) + (1.0 - std::exp(-1.0)) * i / 200.0;
      const double v = alpha_risk_bound_at(1.0, prob, 0.5, AlphaOrder(0.0));
      if (v > prev + 1e-15) ok = false;
      prev = v;
    }
    return std::string();
  });
}

inline void check_sim(detail::Suite& s) {
  s.run("sim", "deterministic records and Hellinger/Bhattacharyya chain", [&](bool& ok) {
    ExperimentConfig cfg(40, 30, 2.0, s.seed());
    cfg.num_trials = s.scale(8, 3);
    const ExperimentResult a = run_experiment(cfg);
    cfg.workers = 3;
    const ExperimentResult b = run_experiment(cfg);
    for (std::size_t i = 0; i < a.records.size(); ++i) {
      const TrialRecord &ra = a.records[i], &rb = b.records[i];
      if (ra.d_bhatta != rb.d_bhatta || ra.regret_bound != rb.regret_bound) ok = false;
      if (ra.two_hellinger_sq > ra.d_bhatta + 1e-12) ok = false;
    }
    return std::string();
  });
  s.run("sim", "dominance frequency at least the probability floor", [&](bool& ok) {
    ExperimentConfig cfg(50, 20, 10.0, s.seed());
    cfg.theta_star = sparse_theta(20, 5);
    cfg.eps = 0.9;
    cfg.tau = 0.2;
    cfg.num_trials = s.scale(1000, 100);
    const ExperimentResult r = run_experiment(cfg);
    const double freq = r.summary.dominance_fraction;
    const double se = proportion_std_error(freq, static_cast<std::uint64_t>(r.summary.counted));
    const double typical_freq = r.summary.typical_fraction;
    const double typical_bound = prob_lower_bounds(cfg.n, cfg.p, cfg.eps).exact_product;
    ok = freq >= r.summary.probability_floor - 3.0 * se &&
         typical_freq >= typical_bound -
                             3.0 * proportion_std_error(typical_freq,
                                                        static_cast<std::uint64_t>(r.summary.counted));
    return "dominance " + detail::fmt(freq) + " vs floor " + detail::fmt(r.summary.probability_floor);
  });
}

/// Runs every module's invariant checks.
inline std::vector<CheckResult> run_all(Options opts = {}) {
  detail::Suite s(opts);
  check_matops(s);
  check_model(s);
  check_divergences(s);
  check_penalty(s);
  check_typical_set(s);
  check_lasso(s);
  check_bounds(s);
  check_sim(s);
  return s.take();
}

}  // namespace mdl::verify
