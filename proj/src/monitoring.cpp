// monitoring.cpp — Markovian generator of collisional dynamics.
#include "colliq/monitoring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include <unsupported/Eigen/MatrixFunctions>

namespace colliq::monitoring {

namespace {

constexpr Complex kImag{0.0, 1.0};

void require_dt(const CollisionModel& model, double dt) {
  if (!(dt >= 0.0)) throw std::invalid_argument("monitoring: dt must be nonnegative");
  if (dt * model.gamma_norm > 1.0 + 1e-12)
    throw std::invalid_argument("monitoring: dt * ||gamma|| exceeds 1, complement map would lose positivity");
}

void require_total_dim(const CollisionModel& model, const Matrix& rho, const char* who) {
  if (rho.rows() != model.space.total() || rho.cols() != model.space.total())
    throw std::invalid_argument(std::string(who) + ": state dimension does not match the composite space");
}

// (I - dt*gamma)^(1/2), the exact Kraus operator of the no-collision branch.
Matrix complement_kraus(const CollisionModel& model, double dt) {
  const auto dim = model.space.total();
  return ops::positive_sqrt(Matrix::Identity(dim, dim) - dt * model.gamma, 1e-9);
}

}  // namespace

CollisionModel::CollisionModel(const ops::CompositeSpace& space_in, Matrix s_in, Matrix gamma_in,
                               Matrix rho_env_in, double tol)
    : space(space_in), s(std::move(s_in)), gamma(std::move(gamma_in)), rho_env(std::move(rho_env_in)) {
  const auto dim = space.total();
  if (dim > 64) throw std::invalid_argument("CollisionModel: composite dimension above 64 is not supported");
  if (s.rows() != dim || s.cols() != dim || gamma.rows() != dim || gamma.cols() != dim)
    throw std::invalid_argument("CollisionModel: s and gamma must act on the composite space");
  if (rho_env.rows() != space.dim_env || rho_env.cols() != space.dim_env)
    throw std::invalid_argument("CollisionModel: rho_env must act on the environment factor");
  if (!ops::is_unitary(s, tol)) throw std::invalid_argument("CollisionModel: s is not unitary");
  if (!ops::is_positive_semidefinite(gamma, tol))
    throw std::invalid_argument("CollisionModel: gamma is not positive semidefinite");
  if (!ops::is_positive_semidefinite(rho_env, tol))
    throw std::invalid_argument("CollisionModel: rho_env is not positive semidefinite");
  if (std::abs(rho_env.trace() - Complex(1.0)) > 1e-12)
    throw std::invalid_argument("CollisionModel: rho_env must have unit trace");
  gamma_sqrt = ops::positive_sqrt(gamma, tol);
  gamma_norm = ops::hermitian_operator_norm(gamma);
}

double collision_probability(const Matrix& rho_sys, const CollisionModel& model, double dt) {
  if (rho_sys.rows() != model.space.dim_sys || rho_sys.cols() != model.space.dim_sys)
    throw std::invalid_argument("collision_probability: rho must act on the system factor");
  if (!ops::is_positive_semidefinite(rho_sys, 1e-8) || std::abs(rho_sys.trace() - Complex(1.0)) > 1e-8)
    throw std::invalid_argument("collision_probability: rho is not a density matrix");
  require_dt(model, dt);
  const Matrix rho_total = ops::tensor_product(rho_sys, model.rho_env);
  return dt * (model.gamma * rho_total).trace().real();
}

MeasurementBranches measurement_maps(const Matrix& rho_total, const CollisionModel& model, double dt) {
  require_total_dim(model, rho_total, "measurement_maps");
  require_dt(model, dt);
  MeasurementBranches branches;
  branches.collided = dt * (model.gamma_sqrt * rho_total * model.gamma_sqrt);
  const Matrix kraus = complement_kraus(model, dt);
  branches.not_collided = kraus * rho_total * kraus;
  return branches;
}

Matrix finite_dt_map(const Matrix& rho_total, const CollisionModel& model, double dt) {
  require_total_dim(model, rho_total, "finite_dt_map");
  require_dt(model, dt);
  const Matrix scattered = model.s * model.gamma_sqrt * rho_total * model.gamma_sqrt * model.s.adjoint();
  const Matrix kraus = complement_kraus(model, dt);
  return dt * scattered + kraus * rho_total * kraus;
}

double t_unitarity_residual(const Matrix& s) {
  if (s.rows() != s.cols()) throw std::invalid_argument("t_unitarity_residual: s must be square");
  const Matrix t = -kImag * (s - Matrix::Identity(s.rows(), s.cols()));
  return ops::max_abs(kImag * (t - t.adjoint()) + t.adjoint() * t);
}

GeneratorReport build_generator(const CollisionModel& model) {
  const auto dim_sys = model.space.dim_sys;
  const Matrix g = model.gamma_sqrt;
  const Matrix sg = model.s * g;
  const Matrix env_avg_gamma = ops::partial_trace_env(
      model.gamma * ops::tensor_product(Matrix::Identity(dim_sys, dim_sys), model.rho_env), model.space);

  const auto action = [&](const Matrix& x) -> Matrix {
    const Matrix lifted = ops::tensor_product(x, model.rho_env);
    const Matrix gain = ops::partial_trace_env(sg * lifted * sg.adjoint(), model.space);
    return gain - 0.5 * (env_avg_gamma * x + x * env_avg_gamma);
  };

  GeneratorReport report;
  report.generator = ops::superop_from_map(action, dim_sys);
  report.t_unitarity_residual = t_unitarity_residual(model.s);

  const double scale = std::max(model.gamma_norm, 1e-300);
  for (double factor : {1e-3, 1.0, 10.0}) {
    const Matrix propagator = (factor / scale * report.generator).exp();
    report.semigroup_cptp_residual =
        std::max(report.semigroup_cptp_residual, ops::choi_negativity(propagator));
  }
  return report;
}

}  // namespace colliq::monitoring
