#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "colliq/ops.hpp"
#include "colliq/quadrature.hpp"
#include "colliq/rng.hpp"

using namespace colliq;
using namespace colliq::ops;

namespace {

Matrix random_matrix(rng::CounterRng& r, Eigen::Index n) {
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(r.next_normal(), r.next_normal());
  return m;
}

}  // namespace

TEST_CASE("composite space dimensions") {
  CompositeSpace space(2, 3);
  CHECK(space.total() == 6);
  CHECK_THROWS_AS(CompositeSpace(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(CompositeSpace(2, -1), std::invalid_argument);
}

TEST_CASE("tensor product entries and shape") {
  Matrix a(2, 2), b(2, 2);
  a << Complex(1, 0), Complex(2, 0), Complex(3, 0), Complex(4, 0);
  b << Complex(0, 1), Complex(0, 0), Complex(0, 0), Complex(0, -1);
  Matrix t = tensor_product(a, b);
  REQUIRE(t.rows() == 4);
  CHECK(t(0, 0) == Complex(0, 1));
  CHECK(t(1, 1) == Complex(0, -1));
  CHECK(t(0, 2) == Complex(0, 2));
  CHECK(t(3, 3) == Complex(0, -4));
}

TEST_CASE("partial trace over the environment inverts tensoring") {
  rng::CounterRng r(7, 0);
  Matrix a = random_matrix(r, 3);
  Matrix b = random_matrix(r, 2);
  CompositeSpace space(3, 2);
  Matrix reduced = partial_trace_env(tensor_product(a, b), space);
  CHECK(max_abs(reduced - b.trace() * a) < 1e-12);
  CHECK_THROWS_AS(partial_trace_env(a, space), std::invalid_argument);
}

TEST_CASE("vec uses column stacking") {
  Matrix m(2, 2);
  m << Complex(1, 0), Complex(3, 0), Complex(2, 0), Complex(4, 0);
  Vector v = vec(m);
  CHECK(v(0) == Complex(1, 0));
  CHECK(v(1) == Complex(2, 0));
  CHECK(v(2) == Complex(3, 0));
  CHECK(v(3) == Complex(4, 0));
  CHECK(max_abs(unvec(v, 2) - m) == 0.0);
  CHECK_THROWS_AS(unvec(v, 3), std::invalid_argument);
}

TEST_CASE("superoperators of one-sided products") {
  rng::CounterRng r(11, 0);
  Matrix a = random_matrix(r, 3);
  Matrix b = random_matrix(r, 3);
  Matrix x = random_matrix(r, 3);
  CHECK(max_abs(apply_superop(superop_left(a), x) - a * x) < 1e-12);
  CHECK(max_abs(apply_superop(superop_right(b), x) - x * b) < 1e-12);
  Matrix sandwich = superop_from_map([&](const Matrix& y) { return a * y * b; }, 3);
  CHECK(max_abs(sandwich - tensor_product(b.transpose(), a)) < 1e-12);
  CHECK(max_abs(apply_superop(sandwich, x) - a * x * b) < 1e-11);
}

TEST_CASE("choi diagnostics separate CP from non-CP maps") {
  Matrix identity_superop = Matrix::Identity(4, 4);
  CHECK(choi_negativity(identity_superop) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(trace_preservation_residual(identity_superop) < 1e-14);

  Matrix transpose_superop =
      superop_from_map([](const Matrix& y) { return Matrix(y.transpose()); }, 2);
  CHECK(trace_preservation_residual(transpose_superop) < 1e-14);
  CHECK(choi_negativity(transpose_superop) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("positive square root") {
  rng::CounterRng r(13, 0);
  Matrix a = random_matrix(r, 4);
  Matrix g = a * a.adjoint();
  Matrix root = positive_sqrt(g);
  CHECK(max_abs(root * root - g) < 1e-10 * std::max(1.0, max_abs(g)));

  Matrix negative = Matrix::Identity(2, 2);
  negative(1, 1) = Complex(-1.0, 0.0);
  CHECK_THROWS_AS(positive_sqrt(negative), std::invalid_argument);
  CHECK_THROWS_AS(positive_sqrt(a), std::invalid_argument);
}

TEST_CASE("matrix predicates and norms") {
  Matrix h(2, 2);
  h << Complex(3, 0), Complex(0, 0), Complex(0, 0), Complex(-5, 0);
  CHECK(is_hermitian(h));
  CHECK_FALSE(is_positive_semidefinite(h));
  CHECK(hermitian_operator_norm(h) == doctest::Approx(5.0));
  CHECK(is_unitary(Matrix::Identity(3, 3)));
  Matrix scaled = 0.5 * Matrix::Identity(3, 3);
  CHECK_FALSE(is_unitary(scaled));
  CHECK(max_abs(h) == 5.0);
}

TEST_CASE("counter rng streams are reproducible and independent") {
  rng::CounterRng a(42, 3);
  rng::CounterRng b(42, 3);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  rng::CounterRng c(42, 4);
  bool any_difference = false;
  rng::CounterRng a2(42, 3);
  for (int i = 0; i < 20; ++i) any_difference |= (a2.next_u64() != c.next_u64());
  CHECK(any_difference);
  CHECK(rng::mix64(0) != 0);
}

TEST_CASE("uniform and normal draws stay in range") {
  rng::CounterRng r(9, 1);
  double mean = 0.0, mean_sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double u = r.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    double o = r.next_open_double();
    CHECK(o > 0.0);
    CHECK(o < 1.0);
    double g = r.next_normal();
    mean += g / n;
    mean_sq += g * g / n;
  }
  CHECK(std::abs(mean) < 0.05);
  CHECK(std::abs(mean_sq - 1.0) < 0.05);
  CHECK(r.next_unit_vector().norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  const auto& rule = quadrature::gauss_legendre(8);
  for (int k = 0; k <= 15; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      sum += rule.weights[i] * std::pow(rule.nodes[i], k);
    double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
    CHECK(sum == doctest::Approx(exact).epsilon(1e-13));
  }
  CHECK_THROWS_AS(quadrature::gauss_legendre(0), std::invalid_argument);
}

TEST_CASE("mapped rule integrates a smooth function") {
  auto rule = quadrature::gauss_legendre_on(16, 0.0, 2.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    sum += rule.weights[i] * std::exp(rule.nodes[i]);
  CHECK(sum == doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-13));
}

TEST_CASE("sqrt-endpoint panel absorbs root singularities") {
  auto rule = quadrature::sqrt_endpoint_panel(12, 0.0, 1.0);
  double root_integral = 0.0, inverse_root_integral = 0.0, mirrored = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    root_integral += rule.weights[i] * std::sqrt(rule.nodes[i]);
    inverse_root_integral += rule.weights[i] / std::sqrt(rule.nodes[i]);
    mirrored += rule.weights[i] * std::sqrt(1.0 - rule.nodes[i]);
  }
  CHECK(root_integral == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(inverse_root_integral == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(mirrored == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(quadrature::sqrt_endpoint_panel(8, 1.0, 1.0), std::invalid_argument);
}
