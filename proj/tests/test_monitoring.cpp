#include <stdexcept>

#include <doctest.h>

#include "colliq/monitoring.hpp"
#include "colliq/ops.hpp"
#include "colliq/verify.hpp"

using namespace colliq;
using namespace colliq::monitoring;

namespace {

CollisionModel simple_model() {
  ops::CompositeSpace space(2, 2);
  rng::CounterRng r(5, 0);
  Matrix s = verify::random_unitary(r, 4);
  Matrix g = verify::random_complex_matrix(r, 4, 4);
  Matrix gamma = g * g.adjoint();
  Matrix rho_env = verify::random_density_matrix(r, 2);
  return CollisionModel(space, s, gamma, rho_env);
}

}  // namespace

TEST_CASE("collision model construction validates its inputs") {
  ops::CompositeSpace space(2, 2);
  Matrix s = Matrix::Identity(4, 4);
  Matrix gamma = Matrix::Identity(4, 4);
  Matrix rho_env = 0.5 * Matrix::Identity(2, 2);
  CHECK_NOTHROW(CollisionModel(space, s, gamma, rho_env));

  Matrix shrunk = 0.9 * s;
  CHECK_THROWS_AS(CollisionModel(space, shrunk, gamma, rho_env), std::invalid_argument);

  Matrix indefinite = gamma;
  indefinite(0, 0) = Complex(-1.0, 0.0);
  CHECK_THROWS_AS(CollisionModel(space, s, indefinite, rho_env), std::invalid_argument);

  Matrix unnormalized = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(CollisionModel(space, s, gamma, unnormalized), std::invalid_argument);

  ops::CompositeSpace too_big(9, 9);
  CHECK_THROWS_AS(CollisionModel(too_big, Matrix::Identity(81, 81), Matrix::Identity(81, 81),
                                 Matrix::Identity(9, 9) / 9.0),
                  std::invalid_argument);
}

TEST_CASE("collision probability is the rate expectation times dt") {
  ops::CompositeSpace space(2, 2);
  Matrix s = Matrix::Identity(4, 4);
  Matrix gamma = 2.0 * Matrix::Identity(4, 4);
  Matrix rho_env = 0.5 * Matrix::Identity(2, 2);
  CollisionModel model(space, s, gamma, rho_env);

  Matrix rho_sys = Matrix::Zero(2, 2);
  rho_sys(0, 0) = Complex(1.0, 0.0);
  CHECK(collision_probability(rho_sys, model, 0.25) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK_THROWS_AS(collision_probability(rho_sys, model, 0.6), std::invalid_argument);
  CHECK_THROWS_AS(collision_probability(rho_sys, model, -0.1), std::invalid_argument);
}

TEST_CASE("measurement branches split the trace") {
  CollisionModel model = simple_model();
  rng::CounterRng r(17, 0);
  Matrix rho_sys = verify::random_density_matrix(r, 2);
  Matrix rho_total = ops::tensor_product(rho_sys, model.rho_env);
  const double dt = 0.4 / model.gamma_norm;

  MeasurementBranches branches = measurement_maps(rho_total, model, dt);
  double p = collision_probability(rho_sys, model, dt);
  CHECK(branches.collided.trace().real() == doctest::Approx(p).epsilon(1e-12));
  CHECK(std::abs(branches.collided.trace().imag()) < 1e-14);
  CHECK((branches.collided.trace() + branches.not_collided.trace()).real() ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ops::is_positive_semidefinite(branches.collided, 1e-10));
  CHECK(ops::is_positive_semidefinite(branches.not_collided, 1e-10));
}

TEST_CASE("finite-dt step is completely positive and trace preserving") {
  CollisionModel model = simple_model();
  const double dt = 0.5 / model.gamma_norm;
  Matrix step = ops::superop_from_map(
      [&](const Matrix& rho) { return finite_dt_map(rho, model, dt); }, model.space.total());
  CHECK(ops::choi_negativity(step) < 1e-11);
  CHECK(ops::trace_preservation_residual(step) < 1e-12);
}

TEST_CASE("t-operator unitarity residual") {
  CHECK(t_unitarity_residual(Matrix::Identity(3, 3)) == 0.0);

  Matrix contraction = Matrix::Identity(2, 2);
  contraction(1, 1) = Complex(0.5, 0.0);
  CHECK(t_unitarity_residual(contraction) == doctest::Approx(0.75).epsilon(1e-14));

  rng::CounterRng r(23, 0);
  Matrix u = verify::random_unitary(r, 5);
  CHECK(t_unitarity_residual(u) < 1e-13);
}

TEST_CASE("generator limit matches the finite step and stays CPTP") {
  CollisionModel model = simple_model();
  GeneratorReport report = build_generator(model);
  CHECK(report.t_unitarity_residual < 1e-12);
  CHECK(report.semigroup_cptp_residual < 1e-9);

  const Eigen::Index dim_sys = model.space.dim_sys;
  rng::CounterRng r(29, 0);
  Matrix rho_sys = verify::random_density_matrix(r, dim_sys);

  const double dt = 1e-7 / model.gamma_norm;
  Matrix rho_total = ops::tensor_product(rho_sys, model.rho_env);
  Matrix stepped = ops::partial_trace_env(finite_dt_map(rho_total, model, dt), model.space);
  Matrix quotient = (stepped - rho_sys) / dt;
  Matrix limit = ops::apply_superop(report.generator, rho_sys);
  CHECK(ops::max_abs(quotient - limit) < 1e-5 * std::max(1.0, ops::max_abs(limit)));

  Matrix probe = verify::random_complex_matrix(r, dim_sys, dim_sys);
  Matrix hermitian_probe = probe + probe.adjoint();
  CHECK(std::abs(ops::apply_superop(report.generator, hermitian_probe).trace()) < 1e-12);
}
