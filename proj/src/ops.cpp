// ops.cpp — Dense operator algebra on system-environment product spaces.
#include "colliq/ops.hpp"

#include <cmath>
#include <stdexcept>

namespace colliq::ops {

namespace {

void require_square(const Matrix& m, const char* who) {
  if (m.rows() != m.cols()) throw std::invalid_argument(std::string(who) + ": operator must be square");
}

}  // namespace

CompositeSpace::CompositeSpace(Eigen::Index sys, Eigen::Index env) : dim_sys(sys), dim_env(env) {
  if (sys < 1 || env < 1) throw std::invalid_argument("CompositeSpace: dimensions must be positive");
}

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermitian_operator_norm(const Matrix& m) {
  require_square(m, "hermitian_operator_norm");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& m, double tol) {
  return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

bool is_positive_semidefinite(const Matrix& m, double tol) {
  if (!is_hermitian(m, tol)) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff() >= -tol;
}

bool is_unitary(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m.adjoint() * m - Matrix::Identity(m.rows(), m.cols())) <= tol;
}

Matrix tensor_product(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix partial_trace_env(const Matrix& x, const CompositeSpace& space) {
  require_square(x, "partial_trace_env");
  if (x.rows() != space.total())
    throw std::invalid_argument("partial_trace_env: operator dimension does not match the composite space");
  Matrix out = Matrix::Zero(space.dim_sys, space.dim_sys);
  for (Eigen::Index i = 0; i < space.dim_sys; ++i)
    for (Eigen::Index j = 0; j < space.dim_sys; ++j)
      for (Eigen::Index e = 0; e < space.dim_env; ++e)
        out(i, j) += x(i * space.dim_env + e, j * space.dim_env + e);
  return out;
}

Matrix positive_sqrt(const Matrix& g, double clip_tol) {
  require_square(g, "positive_sqrt");
  if (!is_hermitian(g, clip_tol)) throw std::invalid_argument("positive_sqrt: operator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (g + g.adjoint()));
  Eigen::VectorXd evals = solver.eigenvalues();
  const double scale = std::max(1.0, evals.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    if (evals(i) < -clip_tol * scale)
      throw std::invalid_argument("positive_sqrt: operator has a negative eigenvalue beyond tolerance");
    evals(i) = std::sqrt(std::max(0.0, evals(i)));
  }
  Matrix root = solver.eigenvectors() * evals.asDiagonal() * solver.eigenvectors().adjoint();
  return 0.5 * (root + root.adjoint());
}

Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvec(const Vector& v, Eigen::Index dim) {
  if (v.size() != dim * dim) throw std::invalid_argument("unvec: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

Matrix superop_from_map(const std::function<Matrix(const Matrix&)>& map, Eigen::Index dim) {
  Matrix out(dim * dim, dim * dim);
  Matrix unit = Matrix::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      unit(i, j) = 1.0;
      out.col(j * dim + i) = vec(map(unit));
      unit(i, j) = 0.0;
    }
  }
  return out;
}

Matrix apply_superop(const Matrix& superop, const Matrix& rho) {
  return unvec(superop * vec(rho), rho.rows());
}

Matrix superop_left(const Matrix& a) {
  return tensor_product(Matrix::Identity(a.rows(), a.cols()), a);
}

Matrix superop_right(const Matrix& b) {
  return tensor_product(b.transpose(), Matrix::Identity(b.rows(), b.cols()));
}

Matrix choi_matrix(const Matrix& superop) {
  const auto dim2 = superop.rows();
  const auto dim = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(dim2))));
  if (dim * dim != dim2 || superop.cols() != dim2)
    throw std::invalid_argument("choi_matrix: superoperator must be d^2 x d^2");
  Matrix choi(dim2, dim2);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      for (Eigen::Index m = 0; m < dim; ++m)
        for (Eigen::Index n = 0; n < dim; ++n)
          choi(i * dim + m, j * dim + n) = superop(n * dim + m, j * dim + i);
  return choi;
}

double choi_negativity(const Matrix& superop) {
  Matrix choi = choi_matrix(superop);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (choi + choi.adjoint()), Eigen::EigenvaluesOnly);
  return std::max(0.0, -solver.eigenvalues().minCoeff());
}

double trace_preservation_residual(const Matrix& superop) {
  Matrix choi = choi_matrix(superop);
  const auto dim = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(superop.rows()))));
  Matrix traced = partial_trace_env(choi, CompositeSpace(dim, dim));
  return max_abs(traced - Matrix::Identity(dim, dim));
}

}  // namespace colliq::ops
