// mdl_lasso: simulations, probability-floor curves, regret certificates and
// the invariant suite from the command line.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mdl/io.hpp"
#include "mdl/sim.hpp"
#include "mdl/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

constexpr const char* kSeedEnv = "MDL_LASSO_SEED";

std::optional<std::uint64_t> env_seed() {
  const char* text = std::getenv(kSeedEnv);
  if (text == nullptr || *text == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text, &end, 10);
  if (*end != '\0') throw mdl::Error(std::string(kSeedEnv) + " is not an unsigned integer");
  return v;
}

std::map<std::string, std::string> parse_overrides(const std::vector<std::string>& items) {
  std::map<std::string, std::string> out;
  for (const std::string& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw mdl::io::ConfigError(0, item, "override must look like key=value");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

struct ConfigArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  std::optional<unsigned> workers;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value experiment file")->required();
    cmd->add_option("--seed", seed, "RNG seed (overrides the file and $MDL_LASSO_SEED)");
    cmd->add_option("--set", overrides, "override a config key, e.g. --set snr=10");
    cmd->add_option("--workers", workers, "worker threads for trials")->check(CLI::PositiveNumber);
  }

  mdl::ExperimentConfig load() const {
    auto kv = parse_overrides(overrides);
    if (seed) kv["seed"] = std::to_string(*seed);
    if (workers) kv["workers"] = std::to_string(*workers);
    return mdl::io::load_config(config_path, kv, env_seed());
  }
};

int run_simulate(const ConfigArgs& args, const std::string& out_path) {
  const mdl::ExperimentConfig cfg = args.load();
  const mdl::ExperimentResult result = mdl::run_experiment(cfg);
  mdl::io::emit_csv(result.records, out_path);
  const mdl::ExperimentSummary& s = result.summary;
  std::cout << "trials = " << s.num_trials << '\n'
            << "nonconverged = " << s.nonconverged << '\n'
            << "dominated = " << s.dominated << '/' << s.counted << '\n'
            << "typical = " << s.typical << '/' << s.counted << '\n'
            << "mean_ratio_bound_over_2h2 = " << mdl::io::format_real(s.mean_ratio) << '\n'
            << "probability_floor = " << mdl::io::format_real(s.probability_floor) << '\n'
            << "wrote " << result.records.size() << " records to " << out_path << '\n';
  return kExitOk;
}

int run_bounds(const ConfigArgs& args, long trial) {
  const mdl::ExperimentConfig cfg = args.load();
  const mdl::Experiment exp(cfg);
  const mdl::LassoProblem prob = exp.draw_problem(trial);
  const mdl::SolveReport rep = mdl::solve(prob, cfg.solver);
  const mdl::RegretCertificate cert =
      mdl::regret_certificate(prob, exp.model(), cfg.bound_config(), rep.theta_hat);
  std::cout << "trial = " << trial << '\n'
            << mdl::io::format_certificate(cert, exp)
            << "converged = " << (rep.converged ? "true" : "false") << '\n'
            << "d_lambda = "
            << mdl::io::format_real(mdl::renyi_div(exp.model(), rep.theta_hat, cfg.bound_config().lambda))
            << '\n';
  return kExitOk;
}

int run_verify(bool quick, std::optional<std::uint64_t> seed) {
  mdl::verify::Options opts;
  opts.quick = quick;
  if (seed) opts.seed = *seed;
  const auto results = mdl::verify::run_all(opts);
  int failed = 0;
  for (const auto& r : results) {
    failed += !r.passed;
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.module << ": " << r.name;
    if (!r.detail.empty()) std::cout << " (" << r.detail << ')';
    std::cout << '\n';
  }
  std::cout << results.size() - failed << '/' << results.size() << " checks passed\n";
  return failed == 0 ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MDL risk and regret bounds for lasso under Gaussian random design"};
  app.require_subcommand(1);

  ConfigArgs sim_args;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "run repeated lasso trials and write a CSV");
  sim_args.attach(simulate);
  simulate->add_option("--out", sim_out, "output CSV path")->required();

  long n = 200, p = 1000, steps = 99;
  double tau = 0.03, beta = 0.5, eps_min = 0.01, eps_max = 0.99;
  std::string curve_out;
  auto* curve = app.add_subcommand("prob-curve", "probability floor of the regret bound against epsilon");
  curve->add_option("--n", n, "sample size")->check(CLI::PositiveNumber);
  curve->add_option("--p", p, "dimension")->check(CLI::PositiveNumber);
  curve->add_option("--tau", tau, "regret slack tau")->check(CLI::PositiveNumber);
  curve->add_option("--beta", beta, "beta in (0,1)");
  curve->add_option("--eps-min", eps_min, "smallest epsilon");
  curve->add_option("--eps-max", eps_max, "largest epsilon");
  curve->add_option("--steps", steps, "grid points")->check(CLI::PositiveNumber);
  curve->add_option("--out", curve_out, "output CSV path")->required();

  ConfigArgs bound_args;
  long trial = 0;
  auto* bounds = app.add_subcommand("bounds", "print the regret certificate for one trial");
  bound_args.attach(bounds);
  bounds->add_option("--trial", trial, "trial index")->check(CLI::NonNegativeNumber);

  bool quick = false;
  std::optional<std::uint64_t> verify_seed;
  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  verify->add_flag("--quick", quick, "reduced sample sizes");
  verify->add_option("--seed", verify_seed, "seed for the randomized checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) return run_simulate(sim_args, sim_out);
    if (*curve) {
      if (!(eps_min > 0.0 && eps_max < 1.0 && eps_min <= eps_max)) {
        std::cerr << "error: need 0 < eps-min <= eps-max < 1\n";
        return kExitUsage;
      }
      const auto points = mdl::prob_curve(n, p, tau, beta, mdl::linspace(eps_min, eps_max, steps));
      mdl::io::write_file(curve_out, mdl::io::prob_curve_csv(points));
      std::cout << "wrote " << points.size() << " points to " << curve_out << '\n';
      return kExitOk;
    }
    if (*bounds) return run_bounds(bound_args, trial);
    if (*verify) return run_verify(quick, verify_seed);
  } catch (const mdl::io::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const mdl::InvalidCertificateError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
