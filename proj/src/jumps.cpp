#include "colliq/jumps.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "colliq/errors.hpp"
#include "colliq/lindblad.hpp"
#include "colliq/rng.hpp"

namespace colliq::jumps {

using rng::CounterRng;

namespace {

constexpr Complex kImag(0.0, 1.0);

void require_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw std::invalid_argument("time grid must not be empty");
  if (!std::isfinite(t_grid.front()) || t_grid.front() < 0.0)
    throw std::invalid_argument("time grid must start at a non-negative time");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!std::isfinite(t_grid[i]) || t_grid[i] <= t_grid[i - 1])
      throw std::invalid_argument("time grid must be strictly increasing");
  }
}

// Applies exp(-i h_eff dt) through the eigenbasis when h_eff is cleanly
// diagonalizable, otherwise through a dense matrix exponential.
class Propagator {
 public:
  explicit Propagator(const Matrix& h_eff) : drift_(-kImag * h_eff) {
    Eigen::ComplexEigenSolver<Matrix> solver(drift_);
    if (solver.info() != Eigen::Success) return;
    const Matrix v = solver.eigenvectors();
    Eigen::PartialPivLU<Matrix> lu(v);
    const Matrix v_inv = lu.solve(Matrix::Identity(v.rows(), v.cols()));
    const Matrix rebuilt = v * solver.eigenvalues().asDiagonal() * v_inv;
    const double scale = std::max(1.0, ops::max_abs(drift_));
    if (ops::max_abs(rebuilt - drift_) > 1e-10 * scale) return;
    v_ = v;
    v_inv_ = v_inv;
    lambda_ = solver.eigenvalues();
    spectral_ = true;
  }

  Vector apply(const Vector& x, double dt) const {
    if (spectral_)
      return v_ * ((lambda_ * dt).array().exp().matrix().asDiagonal() * (v_inv_ * x));
    return (drift_ * dt).exp() * x;
  }

 private:
  Matrix drift_;
  Matrix v_, v_inv_;
  Vector lambda_;
  bool spectral_ = false;
};

// Advances one trajectory across the output grid, handing each normalized
// snapshot to the sink. The state is kept unnormalized between jumps so its
// squared norm is the survival probability for the current epoch.
template <typename Sink>
void run_trajectory(const JumpOperatorSet& ops, const Propagator& prop, Vector psi,
                    const std::vector<double>& t_grid, CounterRng& rng, std::size_t& n_jumps,
                    Sink&& sink) {
  const bool has_jumps = !ops.operators.empty();
  double t_curr = 0.0;
  double r = has_jumps ? rng.next_open_double() : 0.0;
  for (std::size_t idx = 0; idx < t_grid.size(); ++idx) {
    const double t_next = t_grid[idx];
    while (true) {
      const Vector cand = prop.apply(psi, t_next - t_curr);
      if (!has_jumps || cand.squaredNorm() > r) {
        psi = cand;
        t_curr = t_next;
        break;
      }
      // The survival probability crossed the draw inside this span; bisect
      // the crossing time, which is unique because the norm only decays.
      double lo = 0.0;
      double hi = t_next - t_curr;
      Vector at_hi = cand;
      for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const Vector pm = prop.apply(psi, mid);
        const double fm = pm.squaredNorm() - r;
        if (fm > 0.0) {
          lo = mid;
        } else {
          hi = mid;
          at_hi = pm;
        }
        if (std::abs(fm) <= 1e-10) {
          hi = mid <= hi ? hi : mid;
          break;
        }
        if (hi - lo <= 1e-16 * std::max(1.0, t_next)) break;
      }
      std::vector<double> weights(ops.operators.size());
      double total = 0.0;
      for (std::size_t k = 0; k < ops.operators.size(); ++k) {
        weights[k] = (ops.operators[k] * at_hi).squaredNorm();
        total += weights[k];
      }
      if (total <= 0.0)
        throw NumericalError("jump triggered but every jump channel annihilates the state");
      const double u = rng.next_open_double() * total;
      std::size_t pick = weights.size() - 1;
      double cum = 0.0;
      for (std::size_t k = 0; k < weights.size(); ++k) {
        cum += weights[k];
        if (u <= cum) {
          pick = k;
          break;
        }
      }
      psi = ops.operators[pick] * at_hi;
      psi /= psi.norm();
      t_curr += hi;
      ++n_jumps;
      r = rng.next_open_double();
    }
    sink(idx, Vector(psi / psi.norm()));
  }
}

JumpOperatorSet build_operator_set(const thermal::RateTensor& rates,
                                   const Eigen::VectorXd& epsilon) {
  thermal::require_valid_rate_tensor(rates);
  const Eigen::Index n = static_cast<Eigen::Index>(rates.channels.count());
  if (epsilon.size() != n)
    throw ConfigError("energy shift vector does not match the channel count");
  if (!epsilon.allFinite()) throw ConfigError("energy shifts must be finite");

  const Matrix c = thermal::coefficient_matrix(rates);
  const Matrix c_herm = 0.5 * (c + c.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(c_herm);
  if (solver.info() != Eigen::Success)
    throw NumericalError("eigendecomposition of the rate-coefficient matrix failed");
  const double scale = solver.eigenvalues().cwiseAbs().maxCoeff();
  const double threshold = 1e-12 * scale;

  JumpOperatorSet set{rates.channels,
                      {},
                      rates.channels.energies + epsilon,
                      Matrix::Zero(n, n),
                      Matrix(),
                      0.0};
  Matrix rebuilt = Matrix::Zero(c.rows(), c.cols());
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double lambda = solver.eigenvalues()(i);
    if (lambda <= threshold) continue;
    const Vector u = solver.eigenvectors().col(i);
    rebuilt += lambda * (u * u.adjoint());
    Matrix l(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index a0 = 0; a0 < n; ++a0) l(a, a0) = std::sqrt(lambda) * u(a * n + a0);
    set.loss += l.adjoint() * l;
    set.operators.push_back(std::move(l));
  }
  set.reconstruction_residual = std::max(ops::max_abs(rebuilt - c),
                                         ops::max_abs(set.loss - thermal::loss_operator(rates)));
  Matrix h = Matrix::Zero(n, n);
  h.diagonal() = set.shifted_energies.cast<Complex>();
  set.h_eff = h - 0.5 * kImag * set.loss;
  return set;
}

struct BlockSums {
  std::vector<Matrix> sum;
  std::vector<Eigen::MatrixXd> sum_re2;
  std::vector<Eigen::MatrixXd> sum_im2;
};

}  // namespace

JumpOperatorSet lindblad_operators(const thermal::RateTensor& rates,
                                   const thermal::EnergyShifts& shifts) {
  return build_operator_set(rates, shifts.epsilon);
}

JumpOperatorSet lindblad_operators(const thermal::RateTensor& rates) {
  const Eigen::Index n = static_cast<Eigen::Index>(rates.channels.count());
  return build_operator_set(rates, Eigen::VectorXd::Zero(n));
}

PureTrajectory simulate_trajectory(const JumpOperatorSet& ops, const Vector& psi0,
                                   const std::vector<double>& t_grid, std::uint64_t seed,
                                   std::uint64_t stream) {
  const Eigen::Index n = static_cast<Eigen::Index>(ops.channels.count());
  if (psi0.size() != n)
    throw std::invalid_argument("initial state does not match the channel count");
  const double norm = psi0.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-10)
    throw std::invalid_argument("initial state must be normalized");
  require_grid(t_grid);

  const Propagator prop(ops.h_eff);
  CounterRng rng(seed, stream);
  PureTrajectory traj;
  traj.times = t_grid;
  traj.states.resize(t_grid.size());
  run_trajectory(ops, prop, Vector(psi0 / norm), t_grid, rng, traj.n_jumps,
                 [&](std::size_t idx, Vector state) { traj.states[idx] = std::move(state); });
  return traj;
}

EnsembleRecord ensemble_average(const JumpOperatorSet& ops, const Matrix& rho0,
                                const std::vector<double>& t_grid, const EnsembleConfig& config) {
  const Eigen::Index n = static_cast<Eigen::Index>(ops.channels.count());
  if (rho0.rows() != n || rho0.cols() != n)
    throw std::invalid_argument("initial density matrix does not match the channel count");
  lindblad::require_density_matrix(rho0);
  require_grid(t_grid);
  if (config.n_traj == 0) throw std::invalid_argument("ensemble needs at least one trajectory");
  if (config.n_threads < 1) throw std::invalid_argument("thread count must be positive");

  // Initial states are the eigenvectors of rho0, drawn with eigenvalue
  // weights; the cumulative table ends at exactly 1 so an open-interval draw
  // always lands.
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho0);
  if (solver.info() != Eigen::Success)
    throw NumericalError("eigendecomposition of the initial density matrix failed");
  Eigen::VectorXd weights = solver.eigenvalues().cwiseMax(0.0);
  weights /= weights.sum();
  std::vector<double> cum(static_cast<std::size_t>(n), 0.0);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += weights(i);
    cum[static_cast<std::size_t>(i)] = acc;
  }
  cum.back() = 1.0;

  const Propagator prop(ops.h_eff);
  const std::size_t n_times = t_grid.size();
  const std::size_t block_size = 64;
  const std::size_t n_blocks = (config.n_traj + block_size - 1) / block_size;
  std::vector<BlockSums> blocks(n_blocks);

  auto run_block = [&](std::size_t b) {
    BlockSums& sums = blocks[b];
    sums.sum.assign(n_times, Matrix::Zero(n, n));
    sums.sum_re2.assign(n_times, Eigen::MatrixXd::Zero(n, n));
    sums.sum_im2.assign(n_times, Eigen::MatrixXd::Zero(n, n));
    const std::size_t begin = b * block_size;
    const std::size_t end = std::min(begin + block_size, config.n_traj);
    for (std::size_t traj = begin; traj < end; ++traj) {
      CounterRng rng(config.master_seed, traj);
      const double u = rng.next_open_double();
      std::size_t pick = cum.size() - 1;
      for (std::size_t i = 0; i < cum.size(); ++i) {
        if (u <= cum[i]) {
          pick = i;
          break;
        }
      }
      std::size_t n_jumps = 0;
      run_trajectory(ops, prop, solver.eigenvectors().col(static_cast<Eigen::Index>(pick)),
                     t_grid, rng, n_jumps, [&](std::size_t idx, Vector state) {
                       const Matrix proj = state * state.adjoint();
                       sums.sum[idx] += proj;
                       const Eigen::MatrixXd re = proj.real();
                       const Eigen::MatrixXd im = proj.imag();
                       sums.sum_re2[idx] += re.cwiseProduct(re);
                       sums.sum_im2[idx] += im.cwiseProduct(im);
                     });
    }
  };

  const std::size_t n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(config.n_threads), n_blocks);
  if (n_threads <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(n_threads);
    for (std::size_t tid = 0; tid < n_threads; ++tid) {
      pool.emplace_back([&, tid] {
        try {
          for (std::size_t b = tid; b < n_blocks; b += n_threads) run_block(b);
        } catch (...) {
          failures[tid] = std::current_exception();
        }
      });
    }
    for (auto& worker : pool) worker.join();
    for (const auto& failure : failures)
      if (failure) std::rethrow_exception(failure);
  }

  // Reduce the per-block partial sums in block order so the totals do not
  // depend on how blocks were assigned to threads.
  EnsembleRecord record;
  record.times = t_grid;
  record.mean.assign(n_times, Matrix::Zero(n, n));
  record.stderr_re.assign(n_times, Eigen::MatrixXd::Zero(n, n));
  record.stderr_im.assign(n_times, Eigen::MatrixXd::Zero(n, n));
  const double count = static_cast<double>(config.n_traj);
  for (std::size_t idx = 0; idx < n_times; ++idx) {
    Matrix sum = Matrix::Zero(n, n);
    Eigen::MatrixXd sum_re2 = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd sum_im2 = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t b = 0; b < n_blocks; ++b) {
      sum += blocks[b].sum[idx];
      sum_re2 += blocks[b].sum_re2[idx];
      sum_im2 += blocks[b].sum_im2[idx];
    }
    record.mean[idx] = sum / count;
    if (config.n_traj > 1) {
      const Eigen::MatrixXd mean_re = record.mean[idx].real();
      const Eigen::MatrixXd mean_im = record.mean[idx].imag();
      const Eigen::MatrixXd var_re =
          (sum_re2 - count * mean_re.cwiseProduct(mean_re)).cwiseMax(0.0) / (count - 1.0);
      const Eigen::MatrixXd var_im =
          (sum_im2 - count * mean_im.cwiseProduct(mean_im)).cwiseMax(0.0) / (count - 1.0);
      record.stderr_re[idx] = (var_re / count).cwiseSqrt();
      record.stderr_im[idx] = (var_im / count).cwiseSqrt();
    }
  }
  return record;
}

EnsembleRecord ensemble_average(const JumpOperatorSet& ops, const Vector& psi0,
                                const std::vector<double>& t_grid, const EnsembleConfig& config) {
  const double norm = psi0.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-10)
    throw std::invalid_argument("initial state must be normalized");
  const Vector unit = psi0 / norm;
  return ensemble_average(ops, Matrix(unit * unit.adjoint()), t_grid, config);
}

}  // namespace colliq::jumps
