#include "colliq/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "colliq/errors.hpp"
#include "colliq/jumps.hpp"
#include "colliq/lindblad.hpp"
#include "colliq/thermal.hpp"

namespace colliq::verify {
namespace {

std::string sci(double x) {
  std::ostringstream out;
  out.precision(3);
  out << std::scientific << x;
  return out.str();
}

scattering::ChannelSet fixed_channels(std::vector<double> energies) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < energies.size(); ++i) labels.push_back("c" + std::to_string(i));
  Eigen::VectorXd e(static_cast<Eigen::Index>(energies.size()));
  for (std::size_t i = 0; i < energies.size(); ++i) e(static_cast<Eigen::Index>(i)) = energies[i];
  return scattering::ChannelSet(std::move(labels), std::move(e));
}

Eigen::MatrixXd fixed_reactance(std::vector<std::vector<double>> rows) {
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      a(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return a;
}

// Time scale of the dissipative dynamics, from the largest diagonal loss rate.
double loss_time_scale(const thermal::RateTensor& rates) {
  const Matrix loss = thermal::loss_operator(rates);
  double rate = 0.0;
  for (Eigen::Index i = 0; i < loss.rows(); ++i) rate = std::max(rate, loss(i, i).real());
  return 1.0 / std::max(rate, 1e-12);
}

bool bitwise_equal(const jumps::EnsembleRecord& lhs, const jumps::EnsembleRecord& rhs) {
  if (lhs.mean.size() != rhs.mean.size()) return false;
  for (std::size_t i = 0; i < lhs.mean.size(); ++i) {
    for (Eigen::Index r = 0; r < lhs.mean[i].rows(); ++r)
      for (Eigen::Index c = 0; c < lhs.mean[i].cols(); ++c) {
        if (lhs.mean[i](r, c) != rhs.mean[i](r, c)) return false;
        if (lhs.stderr_re[i](r, c) != rhs.stderr_re[i](r, c)) return false;
        if (lhs.stderr_im[i](r, c) != rhs.stderr_im[i](r, c)) return false;
      }
  }
  return true;
}

}  // namespace

Matrix random_complex_matrix(CounterRng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = Complex(rng.next_normal(), rng.next_normal());
  return m;
}

Matrix random_unitary(CounterRng& rng, Eigen::Index dim) {
  const Matrix seed = random_complex_matrix(rng, dim, dim);
  Eigen::HouseholderQR<Matrix> qr(seed);
  return qr.householderQ() * Matrix::Identity(dim, dim);
}

Matrix random_density_matrix(CounterRng& rng, Eigen::Index dim) {
  const Matrix a = random_complex_matrix(rng, dim, dim);
  const Matrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

monitoring::CollisionModel random_collision_model(CounterRng& rng, Eigen::Index max_dim) {
  const auto draw_dim = [&] {
    return static_cast<Eigen::Index>(2 + rng.next_u64() % static_cast<std::uint64_t>(max_dim - 1));
  };
  const ops::CompositeSpace space{draw_dim(), draw_dim()};
  const Matrix s = random_unitary(rng, space.total());
  const Matrix a = random_complex_matrix(rng, space.total(), space.total());
  Matrix gamma = a * a.adjoint();
  gamma *= (0.5 + 1.5 * rng.next_double()) / ops::hermitian_operator_norm(gamma);
  const Matrix rho_env = random_density_matrix(rng, space.dim_env);
  return monitoring::CollisionModel(space, s, gamma, rho_env);
}

scattering::ChannelSet random_channel_set(CounterRng& rng, Eigen::Index n, double spread) {
  std::vector<std::string> labels;
  Eigen::VectorXd energies(n);
  double level = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    labels.push_back("c" + std::to_string(i));
    energies(i) = level;
    level += 0.15 + spread * rng.next_double();
  }
  return scattering::ChannelSet(std::move(labels), std::move(energies));
}

Eigen::MatrixXd random_reactance_matrix(CounterRng& rng, Eigen::Index n, double scale) {
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = r; c < n; ++c) {
      a(r, c) = scale * (2.0 * rng.next_double() - 1.0);
      a(c, r) = a(r, c);
    }
  return a;
}

CheckResult check_finite_step_cptp(const Options& options) {
  CounterRng rng(options.seed, 101);
  double worst_negativity = 0.0;
  double worst_trace = 0.0;
  for (int i = 0; i < options.n_collision_models; ++i) {
    const monitoring::CollisionModel model = random_collision_model(rng, 4);
    const double dt = 0.5 / std::max(model.gamma_norm, 1e-300);
    const Matrix superop = ops::superop_from_map(
        [&](const Matrix& x) { return monitoring::finite_dt_map(x, model, dt); },
        model.space.total());
    worst_negativity = std::max(worst_negativity, ops::choi_negativity(superop));
    worst_trace = std::max(worst_trace, ops::trace_preservation_residual(superop));
  }
  const bool passed = worst_negativity < 1e-9 && worst_trace < 1e-12;
  return {"finite_step_cptp", passed, worst_negativity,
          std::to_string(options.n_collision_models) + " random collision models at dt = 0.5/||gamma||: worst Choi negativity " +
              sci(worst_negativity) + " (limit 1e-9), worst trace residual " + sci(worst_trace) +
              " (limit 1e-12)"};
}

CheckResult check_generator_consistency(const Options& options) {
  CounterRng rng(options.seed, 102);
  double worst_rel = 0.0;
  double worst_cptp = 0.0;
  for (int i = 0; i < options.n_collision_models; ++i) {
    const monitoring::CollisionModel model = random_collision_model(rng, 4);
    const monitoring::GeneratorReport report = monitoring::build_generator(model);
    const double h = 1e-6 / std::max(model.gamma_norm, 1e-300);
    const auto quotient = [&](double step) {
      return ops::superop_from_map(
          [&](const Matrix& x) {
            const Matrix lifted = ops::tensor_product(x, model.rho_env);
            const Matrix mapped = monitoring::finite_dt_map(lifted, model, step);
            return Matrix((ops::partial_trace_env(mapped, model.space) - x) / step);
          },
          model.space.dim_sys);
    };
    const Matrix estimate = 2.0 * quotient(0.5 * h) - quotient(h);
    const double rel = ops::max_abs(estimate - report.generator) /
                       std::max(ops::max_abs(report.generator), 1e-300);
    worst_rel = std::max(worst_rel, rel);
    worst_cptp = std::max(worst_cptp, report.semigroup_cptp_residual);
  }
  const bool passed = worst_rel < 1e-6 && worst_cptp < 1e-9;
  return {"generator_consistency", passed, worst_rel,
          "generator vs finite-step differential quotient: worst relative gap " + sci(worst_rel) +
              " (limit 1e-6); worst semigroup Choi negativity " + sci(worst_cptp) +
              " (limit 1e-9)"};
}

CheckResult check_t_unitarity(const Options& options) {
  CounterRng rng(options.seed, 103);
  double worst = 0.0;
  for (int i = 0; i < options.n_unitaries; ++i) {
    const Eigen::Index dim = static_cast<Eigen::Index>(2 + rng.next_u64() % 7);
    worst = std::max(worst, monitoring::t_unitarity_residual(random_unitary(rng, dim)));
  }
  return {"t_unitarity", worst < 1e-12, worst,
          std::to_string(options.n_unitaries) + " random unitaries: worst residual " + sci(worst) +
              " (limit 1e-12)"};
}

CheckResult check_optical_theorem(const Options& options) {
  CounterRng rng(options.seed, 104);
  double worst = 0.0;
  for (int m = 0; m < options.n_k_models; ++m) {
    const Eigen::Index n = static_cast<Eigen::Index>(2 + rng.next_u64() % 3);
    scattering::ChannelSet channels = random_channel_set(rng, n, 0.8);
    const double top = channels.energies(n - 1);
    const double mass = 0.5 + 1.5 * rng.next_double();
    const scattering::SWaveKMatrixModel model(std::move(channels),
                                              random_reactance_matrix(rng, n, 1.2), mass);
    for (int e = 0; e < options.n_energies; ++e) {
      const double e_total = top + 0.2 + 2.0 * rng.next_double();
      for (const auto& open : model.open_channels(e_total))
        worst = std::max(worst, model.optical_theorem_residual(open.index, e_total));
    }
  }
  return {"optical_theorem", worst < 1e-10, worst,
          std::to_string(options.n_k_models) + " models x " + std::to_string(options.n_energies) +
              " energies, every open entrance: worst relative residual " + sci(worst) +
              " (limit 1e-10)"};
}

CheckResult check_mc_oracle_agreement(const Options& options) {
  double worst_ratio = 0.0;
  std::size_t compared = 0;
  const auto compare = [&](const scattering::ChannelSet& channels, const Eigen::MatrixXd& a,
                           const thermal::GasParameters& gas, std::uint64_t seed) {
    const scattering::SWaveKMatrixModel model(channels, a, gas.m);
    const thermal::RateTensor rates = thermal::rate_tensor(model, gas);
    thermal::McConfig mc;
    mc.n_samples = options.mc_samples;
    mc.seed = seed;
    const std::vector<thermal::McEstimate> oracle = thermal::rate_tensor_mc_oracle(model, gas, mc);
    for (Eigen::Index flat = 0; flat < rates.entries.size(); ++flat) {
      const thermal::McEstimate& est = oracle[static_cast<std::size_t>(flat)];
      const double gap_re = std::abs(rates.entries(flat).real() - est.value.real());
      const double gap_im = std::abs(rates.entries(flat).imag() - est.value.imag());
      worst_ratio = std::max(worst_ratio, gap_re / (3.0 * est.stderr_re + 1e-12));
      worst_ratio = std::max(worst_ratio, gap_im / (3.0 * est.stderr_im + 1e-12));
      compared += 2;
    }
  };
  compare(fixed_channels({0.0, 0.4}), fixed_reactance({{0.9, 0.35}, {0.35, -0.6}}),
          thermal::GasParameters(0.02, 1.0, 1.2), options.seed + 51);
  compare(fixed_channels({0.0, 0.35, 0.8}),
          fixed_reactance({{0.8, 0.3, 0.2}, {0.3, -0.5, 0.25}, {0.2, 0.25, 0.6}}),
          thermal::GasParameters(0.03, 1.0, 1.0), options.seed + 52);
  return {"mc_oracle_agreement", worst_ratio <= 1.0, worst_ratio,
          "quadrature rates vs momentum-integral Monte Carlo (" +
              std::to_string(options.mc_samples) + " samples): worst |gap| / (3 sigma) ratio " +
              sci(worst_ratio) + " over " + std::to_string(compared) + " tuple components"};
}

CheckResult check_analytic_closed_forms(const Options&) {
  constexpr double kPi = 3.14159265358979323846;
  std::ostringstream detail;

  // Single-channel cross section against the scattering-length closed form.
  double worst_sigma = 0.0;
  {
    const double a = 0.7;
    const double mass = 1.3;
    const scattering::SWaveKMatrixModel model(fixed_channels({0.0}), fixed_reactance({{a}}),
                                              mass);
    for (double e_total : {0.05, 0.4, 1.7, 6.0}) {
      const double p = std::sqrt(2.0 * mass * e_total);
      const double reference = 4.0 * kPi * a * a / (1.0 + p * p * a * a);
      const double sigma = model.pair_cross_section(0, 0, e_total);
      worst_sigma = std::max(worst_sigma, std::abs(sigma - reference) / reference);
    }
  }

  // Slow-collision limits: dephasing, level shift, and the constant
  // cross-section population rate, all on one cold two-channel system.
  const double a1 = 0.05;
  const double a2 = -0.03;
  const thermal::GasParameters cold(0.1, 1.0, 4000.0);
  const scattering::SWaveKMatrixModel diagonal(fixed_channels({0.0, 0.5}),
                                               fixed_reactance({{a1, 0.0}, {0.0, a2}}), cold.m);
  const double gamma = thermal::elastic_dephasing_rate(diagonal, cold, 0, 1);
  const double gamma_ref = 2.0 * kPi * cold.n_gas * cold.mean_speed() * (a1 - a2) * (a1 - a2);
  const double rel_gamma = std::abs(gamma - gamma_ref) / gamma_ref;

  const double shift = thermal::energy_shift(diagonal, cold, 0);
  const double shift_ref = 2.0 * kPi * cold.n_gas * a1 / cold.m;
  const double rel_shift = std::abs(shift - shift_ref) / shift_ref;

  const double rate = thermal::rate_coefficient(diagonal, cold, 0, 0, 0, 0).real();
  const double rate_ref = cold.n_gas * 4.0 * kPi * a1 * a1 * cold.mean_speed();
  const double rel_rate = std::abs(rate - rate_ref) / rate_ref;

  const bool passed =
      worst_sigma < 1e-12 && rel_gamma < 1e-3 && rel_shift < 1e-3 && rel_rate < 1e-3;
  detail << "cross-section closed form rel " << sci(worst_sigma)
         << " (limit 1e-12); slow-collision dephasing rel " << sci(rel_gamma)
         << ", level shift rel " << sci(rel_shift) << ", population rate rel " << sci(rel_rate)
         << " (limits 1e-3)";
  const double residual = std::max({worst_sigma, rel_gamma, rel_shift, rel_rate});
  return {"analytic_closed_forms", passed, residual, detail.str()};
}

CheckResult check_dynamics_limits(const Options&) {
  std::ostringstream detail;

  // Populations from a diagonal start against the classical rate equation.
  double worst_pop = 0.0;
  double worst_offdiag = 0.0;
  {
    const thermal::GasParameters gas(0.05, 1.0, 1.0);
    const scattering::SWaveKMatrixModel model(
        fixed_channels({0.0, 0.3, 0.7}),
        fixed_reactance({{0.7, 0.35, 0.2}, {0.35, -0.45, 0.3}, {0.2, 0.3, 0.55}}), gas.m);
    const thermal::RateTensor rates = thermal::rate_tensor(model, gas);
    const thermal::EnergyShifts shifts = thermal::energy_shifts(model, gas);
    const lindblad::AssembledGenerator gen = lindblad::assemble(model.channels(), shifts, rates);
    const Eigen::MatrixXd r = lindblad::population_rate_matrix(rates);

    Matrix rho0 = Matrix::Zero(3, 3);
    rho0(0, 0) = 0.5;
    rho0(1, 1) = 0.3;
    rho0(2, 2) = 0.2;
    const double t_scale = loss_time_scale(rates);
    std::vector<double> grid;
    for (int i = 0; i <= 6; ++i) grid.push_back(2.0 * t_scale * i / 6.0);
    const lindblad::TrajectoryRecord record = lindblad::propagate(gen, rho0, grid);
    for (std::size_t i = 0; i < record.states.size(); ++i) {
      const Eigen::MatrixXd propagator = (grid[i] * r).exp();
      const Eigen::VectorXd reference = propagator * rho0.diagonal().real();
      for (Eigen::Index k = 0; k < 3; ++k) {
        worst_pop = std::max(worst_pop, std::abs(record.states[i](k, k).real() - reference(k)));
        for (Eigen::Index l = 0; l < 3; ++l)
          if (k != l) worst_offdiag = std::max(worst_offdiag, std::abs(record.states[i](k, l)));
      }
    }
  }

  // Elastic coherence against the exponential dephasing envelope.
  double worst_coh = 0.0;
  {
    const thermal::GasParameters gas(0.05, 1.0, 2.0);
    const scattering::SWaveKMatrixModel model(fixed_channels({0.0, 0.7}),
                                              fixed_reactance({{0.4, 0.0}, {0.0, -0.25}}), gas.m);
    const double gamma = thermal::elastic_dephasing_rate(model, gas, 0, 1);
    const thermal::RateTensor rates = thermal::rate_tensor(model, gas);
    const thermal::EnergyShifts shifts = thermal::energy_shifts(model, gas);
    const lindblad::AssembledGenerator gen = lindblad::assemble(model.channels(), shifts, rates);
    Matrix rho0(2, 2);
    rho0 << 0.5, 0.5, 0.5, 0.5;
    std::vector<double> grid;
    for (int i = 0; i <= 6; ++i) grid.push_back(3.0 / gamma * i / 6.0);
    const lindblad::TrajectoryRecord record = lindblad::propagate(gen, rho0, grid);
    for (std::size_t i = 0; i < record.states.size(); ++i) {
      const double predicted = 0.5 * std::exp(-gamma * grid[i]);
      const double actual = std::abs(record.states[i](0, 1));
      worst_coh = std::max(worst_coh, std::abs(actual - predicted) / predicted);
    }
  }

  const bool passed = worst_pop < 1e-8 && worst_offdiag < 1e-12 && worst_coh < 1e-6;
  detail << "population propagation vs rate-equation exponential: worst gap " << sci(worst_pop)
         << " (limit 1e-8), worst stray coherence " << sci(worst_offdiag)
         << " (limit 1e-12); elastic coherence vs exp(-gamma t) over three decay times: worst "
            "relative gap "
         << sci(worst_coh) << " (limit 1e-6)";
  return {"dynamics_limits", passed, std::max(worst_pop, worst_coh), detail.str()};
}

CheckResult check_trace_annihilation_psd(const Options& options) {
  CounterRng rng(options.seed, 108);
  double worst_trace = 0.0;
  double worst_chi = 0.0;
  double worst_min_eig = 0.0;
  int n_models = 3;
  for (int m = 0; m < n_models; ++m) {
    const Eigen::Index n = static_cast<Eigen::Index>(2 + m % 3);
    scattering::ChannelSet channels = random_channel_set(rng, n, 0.5);
    const thermal::GasParameters gas(0.02 + 0.05 * rng.next_double(), 1.0,
                                     0.8 + 0.8 * rng.next_double());
    const scattering::SWaveKMatrixModel model(std::move(channels),
                                              random_reactance_matrix(rng, n, 0.9), gas.m);
    const thermal::RateTensor rates = thermal::rate_tensor(model, gas);
    const thermal::RateDiagnostics diag = thermal::validate_rate_tensor(rates);
    worst_chi = std::max(worst_chi, diag.chi_violation);
    worst_min_eig = std::min(worst_min_eig, diag.psd_min_eig);
    const lindblad::AssembledGenerator gen = lindblad::assemble(
        model.channels(), thermal::EnergyShifts{Eigen::VectorXd::Zero(n), 0.0}, rates);
    const int probes = (options.n_hermitian + n_models - 1) / n_models;
    for (int i = 0; i < probes; ++i) {
      const Matrix a = random_complex_matrix(rng, n, n);
      Matrix x = 0.5 * (a + a.adjoint());
      x /= std::max(1.0, ops::max_abs(x));
      const Complex trace = ops::apply_superop(gen.superop, x).trace();
      worst_trace = std::max(worst_trace, std::abs(trace));
    }
  }
  const bool passed = worst_trace < 1e-12 && worst_chi == 0.0;
  return {"rate_tensor_validity", passed, worst_trace,
          "generated rate tensors: chi-mask violation " + sci(worst_chi) +
              " (exact zero required), smallest coefficient eigenvalue " + sci(worst_min_eig) +
              "; generator trace annihilation on " + std::to_string(options.n_hermitian) +
              " Hermitian probes: worst |tr| " + sci(worst_trace) + " (limit 1e-12)"};
}

CheckResult check_unravelling_equivalence(const Options& options) {
  double worst_ratio = 0.0;
  bool bitwise_ok = true;
  const auto compare = [&](const scattering::ChannelSet& channels, const Eigen::MatrixXd& a,
                           const thermal::GasParameters& gas, const Matrix& rho0,
                           std::uint64_t master_seed) {
    const scattering::SWaveKMatrixModel model(channels, a, gas.m);
    const thermal::RateTensor rates = thermal::rate_tensor(model, gas);
    const thermal::EnergyShifts shifts = thermal::energy_shifts(model, gas);
    const lindblad::AssembledGenerator gen = lindblad::assemble(channels, shifts, rates);
    const jumps::JumpOperatorSet ops = jumps::lindblad_operators(rates, shifts);
    const double t_scale = loss_time_scale(rates);
    std::vector<double> grid;
    for (int i = 0; i <= 4; ++i) grid.push_back(2.0 * t_scale * i / 4.0);
    const lindblad::TrajectoryRecord det = lindblad::propagate(gen, rho0, grid);

    jumps::EnsembleConfig config;
    config.n_traj = options.n_trajectories;
    config.master_seed = master_seed;
    config.n_threads = 1;
    const jumps::EnsembleRecord serial = jumps::ensemble_average(ops, rho0, grid, config);
    config.n_threads = options.n_threads;
    const jumps::EnsembleRecord threaded = jumps::ensemble_average(ops, rho0, grid, config);
    bitwise_ok = bitwise_ok && bitwise_equal(serial, threaded);

    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (Eigen::Index r = 0; r < rho0.rows(); ++r)
        for (Eigen::Index c = 0; c < rho0.cols(); ++c) {
          const Complex gap = serial.mean[i](r, c) - det.states[i](r, c);
          worst_ratio = std::max(worst_ratio, std::abs(gap.real()) /
                                                  (3.0 * serial.stderr_re[i](r, c) + 1e-12));
          worst_ratio = std::max(worst_ratio, std::abs(gap.imag()) /
                                                  (3.0 * serial.stderr_im[i](r, c) + 1e-12));
        }
    }
  };

  Matrix plus2(2, 2);
  plus2 << 0.5, 0.5, 0.5, 0.5;
  compare(fixed_channels({0.0, 0.6}), fixed_reactance({{0.45, 0.0}, {0.0, -0.3}}),
          thermal::GasParameters(0.08, 1.0, 2.0), plus2, options.seed + 61);

  Matrix mixed2 = Matrix::Zero(2, 2);
  mixed2(0, 0) = 0.8;
  mixed2(1, 1) = 0.2;
  compare(fixed_channels({0.0, 0.3}), fixed_reactance({{0.7, 0.4}, {0.4, -0.5}}),
          thermal::GasParameters(0.05, 1.0, 1.2), mixed2, options.seed + 62);

  Matrix plus3 = Matrix::Constant(3, 3, Complex(1.0 / 3.0, 0.0));
  compare(fixed_channels({0.0, 0.25, 0.6}),
          fixed_reactance({{0.6, 0.3, 0.15}, {0.3, -0.4, 0.2}, {0.15, 0.2, 0.5}}),
          thermal::GasParameters(0.05, 1.0, 1.0), plus3, options.seed + 63);

  const bool passed = worst_ratio <= 1.0 && bitwise_ok;
  return {"unravelling_equivalence", passed, worst_ratio,
          std::to_string(options.n_trajectories) +
              "-trajectory ensembles on elastic, inelastic, and mixed models: worst "
              "|gap| / (3 sigma) ratio " +
              sci(worst_ratio) + "; thread counts 1 vs " + std::to_string(options.n_threads) +
              (bitwise_ok ? " bitwise identical" : " DIFFER")};
}

CheckResult injected_nonunitary_s() {
  Matrix s = Matrix::Identity(2, 2);
  s(1, 1) = 0.5;
  const double residual = monitoring::t_unitarity_residual(s);
  return {"t_unitarity_residual", residual < 1e-12, residual,
          "deliberately non-unitary scattering operator: residual " + sci(residual) +
              " exceeds 1e-12"};
}

CheckResult injected_negative_rate_tensor() {
  thermal::RateTensor rates(fixed_channels({0.0, 0.5}), 1e-9);
  rates.entries(rates.flat(0, 0, 0, 0)) = Complex(-1.0, 0.0);
  const thermal::RateDiagnostics diag = thermal::validate_rate_tensor(rates);
  std::string message = "validation unexpectedly accepted the tensor";
  try {
    thermal::require_valid_rate_tensor(rates);
  } catch (const ConfigError& err) {
    message = err.what();
  }
  return {"rate_tensor_psd", false, diag.psd_min_eig,
          "deliberately negative-eigenvalue rate tensor: " + message};
}

std::vector<CheckResult> run_all(const Options& options,
                                 const std::vector<std::string>& injections) {
  using Check = CheckResult (*)(const Options&);
  const std::pair<const char*, Check> checks[] = {
      {"finite_step_cptp", &check_finite_step_cptp},
      {"generator_consistency", &check_generator_consistency},
      {"t_unitarity", &check_t_unitarity},
      {"optical_theorem", &check_optical_theorem},
      {"mc_oracle_agreement", &check_mc_oracle_agreement},
      {"analytic_closed_forms", &check_analytic_closed_forms},
      {"dynamics_limits", &check_dynamics_limits},
      {"rate_tensor_validity", &check_trace_annihilation_psd},
      {"unravelling_equivalence", &check_unravelling_equivalence},
  };
  std::vector<CheckResult> results;
  for (const auto& [name, check] : checks) {
    try {
      results.push_back(check(options));
    } catch (const std::exception& err) {
      results.push_back({name, false, std::numeric_limits<double>::quiet_NaN(),
                         std::string("check aborted: ") + err.what()});
    }
  }
  for (const std::string& injection : injections) {
    if (injection == "nonunitary_s") {
      results.push_back(injected_nonunitary_s());
    } else if (injection == "negative_rate_tensor") {
      results.push_back(injected_negative_rate_tensor());
    } else {
      throw ConfigError("unknown injection '" + injection +
                        "' (expected nonunitary_s or negative_rate_tensor)");
    }
  }
  return results;
}

}  // namespace colliq::verify
