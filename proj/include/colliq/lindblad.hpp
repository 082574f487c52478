// lindblad.hpp — Channel-basis master equation: assembly from shifts and
// rates, deterministic propagation with a dual-integrator cross-check, and the
// classical limits (population rate equation, elastic dephasing).
#pragma once

#include <vector>

#include "colliq/ops.hpp"
#include "colliq/scattering.hpp"
#include "colliq/thermal.hpp"

namespace colliq::lindblad {

// Hermitian within herm_tol, unit trace within trace_tol, PSD down to
// -psd_tol; rejects anything else.
void require_density_matrix(const Matrix& rho, double herm_tol = 1e-12, double trace_tol = 1e-12,
                            double psd_tol = 1e-10);

struct AssembledGenerator {
  scattering::ChannelSet channels;
  Eigen::VectorXd shifted_energies;  // E_alpha + epsilon_alpha
  Matrix hamiltonian;                // diag(shifted_energies)
  Matrix loss;                       // Lambda from the rate tensor, Hermitian PSD
  Matrix superop;                    // n^2 x n^2 generator matrix, column stacking
  // Set when some channel gap is at or below the chi tolerance; the
  // population-coherence decoupling is then marginal.
  bool near_degenerate_warning = false;
};

// d rho / dt = -i [H, rho] + gain(rho) - (1/2)(Lambda rho + rho Lambda'),
// with H = diag(E + epsilon), gain_{alpha beta} = sum rho_{alpha0 beta0}
// M_{alpha beta}^{alpha0 beta0}, and Lambda(alpha, alpha0) =
// sum_gamma M_{gamma gamma}^{alpha0 alpha}. The generator annihilates the
// trace identically and its exponential is CPTP for valid rate tensors.
AssembledGenerator assemble(const scattering::ChannelSet& channels,
                            const thermal::EnergyShifts& shifts,
                            const thermal::RateTensor& rates);

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<Matrix> states;
  std::vector<double> trace_errors;      // |tr(rho) - 1| per snapshot
  std::vector<double> min_eigenvalues;   // smallest eigenvalue per snapshot
  double integrator_mismatch = 0.0;      // worst entrywise gap between the two routes
  bool completed = true;                 // false when the adaptive route underflowed
  double abort_time = 0.0;               // last confirmed time when not completed
};

// Propagates rho0 from t = 0 through the grid twice: by stepwise matrix
// exponentials of the generator (reported states) and by an adaptive embedded
// 5(4) Runge-Kutta integration whose disagreement is recorded. On adaptive
// step-size underflow the record is truncated at the last confirmed grid time.
TrajectoryRecord propagate(const AssembledGenerator& gen, const Matrix& rho0,
                           const std::vector<double>& t_grid);

// Classical generator of the population subsystem:
// R_{alpha alpha0} = Re M_{alpha alpha}^{alpha0 alpha0} off the diagonal,
// diagonal entries minus the column losses; columns sum to zero.
Eigen::MatrixXd population_rate_matrix(const thermal::RateTensor& rates);

// Rotation frequency of arg rho_{alpha beta}(t), extracted by a phase
// increment fit on a propagated equal-weight superposition of the two
// channels. For elastic models this is the shifted Bohr frequency
// E_alpha + epsilon_alpha - E_beta - epsilon_beta plus any collisional phase.
double coherence_phase_rate(const AssembledGenerator& gen, Eigen::Index alpha, Eigen::Index beta);

}  // namespace colliq::lindblad
