// monitoring.hpp — Markovian generator of collisional dynamics built from a
// scattering operator, a collision-rate operator, and an environment state.
#pragma once

#include "colliq/ops.hpp"

namespace colliq::monitoring {

// Inputs of one collisional time step on the system x environment space.
// Validated on construction: s unitary, gamma PSD, rho_env a density operator,
// composite dimension bounded at 64.
struct CollisionModel {
  ops::CompositeSpace space;
  Matrix s;
  Matrix gamma;
  Matrix rho_env;
  Matrix gamma_sqrt;
  double gamma_norm = 0.0;

  CollisionModel(const ops::CompositeSpace& space_in, Matrix s_in, Matrix gamma_in,
                 Matrix rho_env_in, double tol = 1e-10);
};

// Probability that a collision is registered during dt for a system state rho:
// dt * tr(gamma (rho x rho_env)). Requires dt * ||gamma|| <= 1.
double collision_probability(const Matrix& rho_sys, const CollisionModel& model, double dt);

struct MeasurementBranches {
  Matrix collided;      // dt * G rho G with G = gamma^(1/2); trace = collision probability
  Matrix not_collided;  // K rho K with K = (I - dt*gamma)^(1/2); trace complement
};

// Unnormalized conditional states after one monitoring interval. Both branches
// are completely positive and their traces add up to tr(rho_total). The
// no-collision branch uses the exact square-root Kraus operator, which keeps
// complete positivity at finite dt; to first order its effect is
// rho - (dt/2){gamma, rho}.
MeasurementBranches measurement_maps(const Matrix& rho_total, const CollisionModel& model, double dt);

// Non-selective step: scattered collided branch plus no-collision branch,
// dt S G rho G S' + K rho K. Exactly trace preserving and CPTP for
// dt * ||gamma|| <= 1.
Matrix finite_dt_map(const Matrix& rho_total, const CollisionModel& model, double dt);

// ||i(T - T') + T'T||_max for T = -i(S - I); vanishes iff S is unitary.
double t_unitarity_residual(const Matrix& s);

struct GeneratorReport {
  Matrix generator;                  // superoperator on the system, column stacking
  double t_unitarity_residual = 0.0;
  double semigroup_cptp_residual = 0.0;  // worst Choi negativity of exp(t L) over probe times
};

// dt -> 0 limit of the traced finite-dt map:
//   L(rho) = Tr_env(S G (rho x rho_env) G S') - (1/2){Tr_env(gamma (I x rho_env)), rho},
// which is of Lindblad form with the Kraus family of S G and therefore
// generates a completely positive trace-preserving semigroup.
GeneratorReport build_generator(const CollisionModel& model);

}  // namespace colliq::monitoring
