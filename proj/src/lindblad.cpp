// lindblad.cpp — Master-equation assembly, propagation, classical limits.
#include "colliq/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "colliq/errors.hpp"

namespace colliq::lindblad {

namespace {

constexpr Complex kImag{0.0, 1.0};

void require_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw std::invalid_argument("propagate: empty time grid");
  if (t_grid.front() < 0.0 || !std::isfinite(t_grid.front()))
    throw std::invalid_argument("propagate: grid times must be nonnegative and finite");
  for (std::size_t k = 1; k < t_grid.size(); ++k)
    if (!(t_grid[k] > t_grid[k - 1]) || !std::isfinite(t_grid[k]))
      throw std::invalid_argument("propagate: time grid must be strictly increasing");
}

bool same_channels(const scattering::ChannelSet& a, const scattering::ChannelSet& b) {
  return a.labels == b.labels && a.energies.size() == b.energies.size() &&
         a.energies == b.energies;
}

// Classic embedded Dormand-Prince 5(4) pair for the linear system y' = L y.
// Returns false on step-size underflow; y then holds the state at *t_reached.
bool dopri_advance(const Matrix& l, Vector& y, double t_begin, double t_end, double rtol,
                   double atol, double* t_reached) {
  static const double kA[7][6] = {
      {0, 0, 0, 0, 0, 0},
      {1.0 / 5, 0, 0, 0, 0, 0},
      {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
      {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
      {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static const double kB5[7] = {35.0 / 384,     0, 500.0 / 1113, 125.0 / 192,
                                -2187.0 / 6784, 11.0 / 84,       0};
  static const double kB4[7] = {5179.0 / 57600,  0,           7571.0 / 16695, 393.0 / 640,
                                -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

  double t = t_begin;
  double h = (t_end - t_begin) / 16.0;
  const double h_min = 1e-14 * std::max(1.0, std::abs(t_end));
  Vector stages[7];
  stages[0] = l * y;
  while (t < t_end) {
    h = std::min(h, t_end - t);
    if (h < h_min) {
      *t_reached = t;
      return false;
    }
    for (int i = 1; i < 7; ++i) {
      Vector acc = y;
      for (int j = 0; j < i; ++j)
        if (kA[i][j] != 0.0) acc += h * kA[i][j] * stages[j];
      stages[i] = l * acc;
    }
    Vector y5 = y;
    Vector y4 = y;
    for (int i = 0; i < 7; ++i) {
      if (kB5[i] != 0.0) y5 += h * kB5[i] * stages[i];
      if (kB4[i] != 0.0) y4 += h * kB4[i] * stages[i];
    }
    const double scale = atol + rtol * std::max(y.cwiseAbs().maxCoeff(), y5.cwiseAbs().maxCoeff());
    const double error = (y5 - y4).cwiseAbs().maxCoeff() / scale;
    if (error <= 1.0) {
      t += h;
      y = y5;
      stages[0] = stages[6];  // first-same-as-last
    } else {
      stages[0] = l * y;
    }
    const double factor = 0.9 * std::pow(std::max(error, 1e-10), -0.2);
    h *= std::clamp(factor, 0.2, 5.0);
  }
  *t_reached = t_end;
  return true;
}

}  // namespace

void require_density_matrix(const Matrix& rho, double herm_tol, double trace_tol, double psd_tol) {
  if (rho.rows() != rho.cols() || rho.rows() < 1)
    throw std::invalid_argument("density matrix must be square");
  if (ops::max_abs(rho - rho.adjoint()) > herm_tol)
    throw std::invalid_argument("density matrix is not Hermitian within tolerance");
  if (std::abs(rho.trace() - Complex(1.0)) > trace_tol)
    throw std::invalid_argument("density matrix trace differs from one beyond tolerance");
  if (!ops::is_positive_semidefinite(rho, psd_tol))
    throw std::invalid_argument("density matrix has a negative eigenvalue beyond tolerance");
}

AssembledGenerator assemble(const scattering::ChannelSet& channels,
                            const thermal::EnergyShifts& shifts,
                            const thermal::RateTensor& rates) {
  if (!same_channels(channels, rates.channels))
    throw ConfigError("assemble: channel sets of the rate tensor and the target do not match");
  const auto n = channels.count();
  if (shifts.epsilon.size() != n)
    throw ConfigError("assemble: one energy shift per channel required");
  if (!shifts.epsilon.allFinite()) throw ConfigError("assemble: energy shifts must be finite");
  thermal::require_valid_rate_tensor(rates);

  AssembledGenerator gen{channels, channels.energies + shifts.epsilon, Matrix(), Matrix(),
                         Matrix(), false};
  gen.hamiltonian = gen.shifted_energies.cast<Complex>().asDiagonal();
  gen.loss = thermal::loss_operator(rates);

  Matrix gain = Matrix::Zero(n * n, n * n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      for (Eigen::Index a0 = 0; a0 < n; ++a0)
        for (Eigen::Index b0 = 0; b0 < n; ++b0)
          gain(b * n + a, b0 * n + a0) = rates.entries[rates.flat(a, b, a0, b0)];
  gen.superop = -kImag * (ops::superop_left(gen.hamiltonian) -
                          ops::superop_right(gen.hamiltonian)) +
                gain -
                0.5 * (ops::superop_left(gen.loss) + ops::superop_right(gen.loss.adjoint()));

  for (Eigen::Index a = 0; a < n && !gen.near_degenerate_warning; ++a)
    for (Eigen::Index b = a + 1; b < n; ++b)
      if (std::abs(channels.energies[a] - channels.energies[b]) <= rates.energy_tolerance) {
        gen.near_degenerate_warning = true;
        break;
      }
  return gen;
}

TrajectoryRecord propagate(const AssembledGenerator& gen, const Matrix& rho0,
                           const std::vector<double>& t_grid) {
  const auto n = gen.channels.count();
  if (rho0.rows() != n || rho0.cols() != n)
    throw std::invalid_argument("propagate: state dimension does not match the channel count");
  require_density_matrix(rho0);
  require_grid(t_grid);

  TrajectoryRecord record;
  Vector state = ops::vec(rho0);     // matrix-exponential route, reported
  Vector shadow = state;             // adaptive route, cross-check only
  std::map<double, Matrix> step_cache;
  double t_prev = 0.0;
  const double rtol = 1e-10;
  const double atol = 1e-13;

  for (double t : t_grid) {
    const double dt = t - t_prev;
    if (dt > 0.0) {
      auto cached = step_cache.find(dt);
      if (cached == step_cache.end())
        cached = step_cache.emplace(dt, (dt * gen.superop).exp()).first;
      state = cached->second * state;
      double t_reached = t_prev;
      if (!dopri_advance(gen.superop, shadow, t_prev, t, rtol, atol, &t_reached)) {
        record.completed = false;
        record.abort_time = t_reached;
        return record;
      }
    }
    record.integrator_mismatch =
        std::max(record.integrator_mismatch, (state - shadow).cwiseAbs().maxCoeff());
    const Matrix rho = ops::unvec(state, n);
    record.times.push_back(t);
    record.states.push_back(rho);
    record.trace_errors.push_back(std::abs(rho.trace() - Complex(1.0)));
    const Matrix herm = 0.5 * (rho + rho.adjoint());
    record.min_eigenvalues.push_back(
        Eigen::SelfAdjointEigenSolver<Matrix>(herm).eigenvalues().minCoeff());
    t_prev = t;
  }
  return record;
}

Eigen::MatrixXd population_rate_matrix(const thermal::RateTensor& rates) {
  const auto n = rates.channels.count();
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a0 = 0; a0 < n; ++a0) {
    for (Eigen::Index a = 0; a < n; ++a) {
      if (a == a0) continue;
      r(a, a0) = rates.entries[rates.flat(a, a, a0, a0)].real();
      r(a0, a0) -= r(a, a0);
    }
  }
  return r;
}

double coherence_phase_rate(const AssembledGenerator& gen, Eigen::Index alpha, Eigen::Index beta) {
  const auto n = gen.channels.count();
  if (alpha < 0 || alpha >= n || beta < 0 || beta >= n)
    throw std::invalid_argument("coherence_phase_rate: channel index out of range");
  if (alpha == beta) throw std::invalid_argument("coherence_phase_rate: channels must differ");

  Matrix rho0 = Matrix::Zero(n, n);
  rho0(alpha, alpha) = 0.5;
  rho0(beta, beta) = 0.5;
  rho0(alpha, beta) = 0.5;
  rho0(beta, alpha) = 0.5;

  // Keep phase increments well below pi and the coherence well above noise
  // over the fit window.
  const double scale = std::max(ops::max_abs(gen.superop), 1e-300);
  const int n_steps = 32;
  const double dt = 1.0 / (scale * n_steps);
  std::vector<double> t_grid(n_steps);
  for (int k = 0; k < n_steps; ++k) t_grid[k] = dt * (k + 1);
  const TrajectoryRecord record = propagate(gen, rho0, t_grid);

  double sum = 0.0;
  Complex previous = rho0(alpha, beta);
  for (const auto& state : record.states) {
    const Complex current = state(alpha, beta);
    if (std::abs(current) < 1e-14)
      throw NumericalError("coherence_phase_rate: coherence vanished during the fit window");
    sum += std::arg(current / previous);
    previous = current;
  }
  return -sum / (dt * n_steps);
}

}  // namespace colliq::lindblad
