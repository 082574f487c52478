// ops.hpp — Dense operator algebra on system-environment product spaces.
#pragma once

#include <complex>
#include <functional>

#include <Eigen/Dense>

namespace colliq {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Complex = std::complex<double>;

namespace ops {

// Bipartite dimensions with the system factor first in every Kronecker index.
struct CompositeSpace {
  Eigen::Index dim_sys = 0;
  Eigen::Index dim_env = 0;

  CompositeSpace() = default;
  CompositeSpace(Eigen::Index sys, Eigen::Index env);
  Eigen::Index total() const { return dim_sys * dim_env; }
};

double max_abs(const Matrix& m);

// Largest-magnitude eigenvalue of a Hermitian operator.
double hermitian_operator_norm(const Matrix& m);

bool is_hermitian(const Matrix& m, double tol = 1e-10);
bool is_positive_semidefinite(const Matrix& m, double tol = 1e-10);
bool is_unitary(const Matrix& m, double tol = 1e-10);

// Kronecker product with the first argument on the left (system) factor.
Matrix tensor_product(const Matrix& a, const Matrix& b);

// Trace over the environment (second) factor of an operator on sys x env.
Matrix partial_trace_env(const Matrix& x, const CompositeSpace& space);

// Principal square root of a positive semidefinite operator. Eigenvalues in
// [-clip_tol, 0) are clipped to zero; anything lower is rejected.
Matrix positive_sqrt(const Matrix& g, double clip_tol = 1e-10);

// Column-stacking convention throughout: vec(A X B) = (B^T kron A) vec(X).
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, Eigen::Index dim);

// Superoperator matrix of a linear map, assembled column by column from the
// images of the matrix units.
Matrix superop_from_map(const std::function<Matrix(const Matrix&)>& map, Eigen::Index dim);

Matrix apply_superop(const Matrix& superop, const Matrix& rho);

// Superoperators for X -> A X and X -> X B.
Matrix superop_left(const Matrix& a);
Matrix superop_right(const Matrix& b);

// Choi matrix C = sum_ij |i><j| kron Phi(|i><j|) of the map with the given
// superoperator matrix; the map is CP iff C is PSD and trace-preserving iff
// the partial trace of C over its output (second) factor is the identity.
Matrix choi_matrix(const Matrix& superop);

// max(0, -lambda_min(C)) for the Hermitized Choi matrix; zero for CP maps.
double choi_negativity(const Matrix& superop);

// ||Tr_out(C) - I||_max; zero for trace-preserving maps.
double trace_preservation_residual(const Matrix& superop);

}  // namespace ops
}  // namespace colliq
