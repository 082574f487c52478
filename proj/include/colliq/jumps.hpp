// jumps.hpp — Quantum-jump unravelling of the channel master equation: an
// independent stochastic solution path whose ensemble mean reproduces the
// deterministic propagation.
#pragma once

#include <cstdint>
#include <vector>

#include "colliq/ops.hpp"
#include "colliq/scattering.hpp"
#include "colliq/thermal.hpp"

namespace colliq::jumps {

struct JumpOperatorSet {
  scattering::ChannelSet channels;
  std::vector<Matrix> operators;     // weights absorbed, at most n^2 of them
  Eigen::VectorXd shifted_energies;  // E_alpha + epsilon_alpha
  Matrix loss;                       // sum L'L rebuilt from the operators
  Matrix h_eff;                      // diag(shifted_energies) - (i/2) loss
  double reconstruction_residual = 0.0;  // worst gap rebuilding the dissipator
};

// Spectral decomposition of the rate-coefficient matrix: each eigenpair
// (lambda, u) with lambda above 1e-12 of the norm becomes
// L = sqrt(lambda) sum u[alpha, alpha0] |alpha><alpha0|. The dissipator
// rebuilt from the operators is compared entrywise against the tensor and the
// residual recorded.
JumpOperatorSet lindblad_operators(const thermal::RateTensor& rates,
                                   const thermal::EnergyShifts& shifts);
// Same with zero energy shifts.
JumpOperatorSet lindblad_operators(const thermal::RateTensor& rates);

struct PureTrajectory {
  std::vector<double> times;
  std::vector<Vector> states;  // conditional states, normalized at output times
  std::size_t n_jumps = 0;
};

// Standard jump algorithm: drift under h_eff between jumps, a jump fires when
// the squared norm decays to a uniform draw (jump time bisected to 1e-10 in
// squared norm, valid because the norm decreases monotonically), the channel
// is chosen proportional to ||L psi||^2 and the state renormalized. A fixed
// (seed, stream) pair reproduces the trajectory bitwise.
PureTrajectory simulate_trajectory(const JumpOperatorSet& ops, const Vector& psi0,
                                   const std::vector<double>& t_grid, std::uint64_t seed,
                                   std::uint64_t stream = 0);

struct EnsembleConfig {
  std::size_t n_traj = 1;
  std::uint64_t master_seed = 1;
  int n_threads = 1;
};

struct EnsembleRecord {
  std::vector<double> times;
  std::vector<Matrix> mean;                // averaged projectors per grid time
  std::vector<Eigen::MatrixXd> stderr_re;  // standard error of each real part
  std::vector<Eigen::MatrixXd> stderr_im;  // standard error of each imaginary part
};

// Mean projector over n_traj trajectories with entrywise standard errors.
// Trajectory i always consumes random stream i of the master seed, and
// partial sums are reduced in fixed 64-trajectory blocks in index order, so
// the result is bitwise independent of the thread count. A mixed rho0 is
// sampled by eigenvalue weight; the selection draw is consumed even for pure
// states so trajectories do not depend on the rank of rho0.
EnsembleRecord ensemble_average(const JumpOperatorSet& ops, const Matrix& rho0,
                                const std::vector<double>& t_grid, const EnsembleConfig& config);
// Pure-state start; identical to passing the projector of psi0.
EnsembleRecord ensemble_average(const JumpOperatorSet& ops, const Vector& psi0,
                                const std::vector<double>& t_grid, const EnsembleConfig& config);

}  // namespace colliq::jumps
