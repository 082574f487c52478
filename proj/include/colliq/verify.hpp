// verify.hpp — Self-check suite: randomized physical-invariant checks shared
// by the `verify` subcommand and the release gate. Every check is
// deterministic for a fixed seed and reports its worst observed residual.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "colliq/monitoring.hpp"
#include "colliq/ops.hpp"
#include "colliq/rng.hpp"
#include "colliq/scattering.hpp"

namespace colliq::verify {

using rng::CounterRng;

struct CheckResult {
  std::string name;
  bool passed = false;
  double residual = 0.0;  // worst value of the check's primary metric
  std::string detail;
};

struct Options {
  std::uint64_t seed = 20260822;
  int n_collision_models = 50;   // finite-step CPTP and generator consistency
  int n_unitaries = 100;         // scattering-operator unitarity residuals
  int n_k_models = 20;           // optical-theorem models
  int n_energies = 20;           // energies per optical-theorem model
  std::size_t mc_samples = 1000000;  // Monte Carlo oracle sample count
  int n_hermitian = 100;         // trace-annihilation probe inputs
  std::size_t n_trajectories = 10000;
  int n_threads = 4;             // second thread count for the bitwise repeat
};

// Random fixtures, all driven by CounterRng streams so suites stay
// reproducible sample by sample.
Matrix random_complex_matrix(CounterRng& rng, Eigen::Index rows, Eigen::Index cols);
Matrix random_unitary(CounterRng& rng, Eigen::Index dim);
Matrix random_density_matrix(CounterRng& rng, Eigen::Index dim);
monitoring::CollisionModel random_collision_model(CounterRng& rng, Eigen::Index max_dim);
scattering::ChannelSet random_channel_set(CounterRng& rng, Eigen::Index n, double spread);
Eigen::MatrixXd random_reactance_matrix(CounterRng& rng, Eigen::Index n, double scale);

CheckResult check_finite_step_cptp(const Options& options);
CheckResult check_generator_consistency(const Options& options);
CheckResult check_t_unitarity(const Options& options);
CheckResult check_optical_theorem(const Options& options);
CheckResult check_mc_oracle_agreement(const Options& options);
CheckResult check_analytic_closed_forms(const Options& options);
CheckResult check_dynamics_limits(const Options& options);
CheckResult check_trace_annihilation_psd(const Options& options);
CheckResult check_unravelling_equivalence(const Options& options);

// Deliberate-failure fixtures behind `verify --inject ...`; each returns a
// failing result naming the triggered check.
CheckResult injected_nonunitary_s();
CheckResult injected_negative_rate_tensor();

// All nine standard checks, plus one injected failure per requested name
// ("nonunitary_s" or "negative_rate_tensor"). Unknown names raise ConfigError.
// A check that throws is converted into a failed result carrying the message.
std::vector<CheckResult> run_all(const Options& options,
                                 const std::vector<std::string>& injections = {});

}  // namespace colliq::verify
