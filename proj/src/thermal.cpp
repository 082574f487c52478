// thermal.cpp — Maxwell-gas averages of scattering amplitude products.
#include "colliq/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "colliq/errors.hpp"
#include "colliq/rng.hpp"

namespace colliq::thermal {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_channel(const scattering::ChannelSet& channels, Eigen::Index alpha, const char* who) {
  if (alpha < 0 || alpha >= channels.count())
    throw std::invalid_argument(std::string(who) + ": channel index out of range");
}

void require_config(const QuadratureConfig& config) {
  if (config.n_v < 1 || config.n_cos < 1)
    throw std::invalid_argument("QuadratureConfig: node counts must be positive");
  if (!(config.v_max_factor > 0.0))
    throw std::invalid_argument("QuadratureConfig: v_max_factor must be positive");
  if (!(config.energy_tolerance >= 0.0) || !(config.convergence_tolerance > 0.0))
    throw std::invalid_argument("QuadratureConfig: tolerances must be positive");
}

struct ActiveTuple {
  Eigen::Index alpha = 0;
  Eigen::Index beta = 0;
  Eigen::Index alpha0 = 0;
  Eigen::Index beta0 = 0;
  Eigen::Index flat = 0;
  double gap = 0.0;  // exit threshold E_alpha - E_alpha0 shared by both sides
};

std::vector<ActiveTuple> chi_active_tuples(const scattering::ChannelSet& channels,
                                           double energy_tolerance) {
  const auto n = channels.count();
  std::vector<ActiveTuple> tuples;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      for (Eigen::Index a0 = 0; a0 < n; ++a0)
        for (Eigen::Index b0 = 0; b0 < n; ++b0)
          if (chi(channels, a, b, a0, b0, energy_tolerance) == 1)
            tuples.push_back({a, b, a0, b0, ((a * n + b) * n + a0) * n + b0,
                              channels.energies[a] - channels.energies[a0]});
  return tuples;
}

// F(alpha, alpha0) = f_{alpha alpha0}(cos_theta) at the entrance-resolved
// total energy e_kin + E_alpha0; zero for closed pairs.
void fill_entrance_resolved(const scattering::Model& model, double e_kin, double cos_theta,
                            Matrix& f) {
  const auto& channels = model.channels();
  f.setZero();
  for (Eigen::Index a0 = 0; a0 < channels.count(); ++a0)
    f.col(a0) = model.amplitude_matrix(cos_theta, e_kin + channels.energies[a0]).col(a0);
}

// Thermal average n_gas Int dv nu v_out <2 pi Int dcos f conj(f)> for every
// tuple, on one quadrature level. Node order is fixed, so results are
// deterministic and tuple pairs related by index swap come out as exact
// complex conjugates.
Eigen::VectorXcd accumulate_rates(const scattering::Model& model, const GasParameters& gas,
                                  const std::vector<ActiveTuple>& tuples,
                                  const quadrature::Rule& speed_rule, int n_cos) {
  const auto n = model.channels().count();
  const auto n_tuples = static_cast<Eigen::Index>(tuples.size());
  Eigen::VectorXcd sums = Eigen::VectorXcd::Zero(n_tuples);
  const bool isotropic = model.angle_independent();
  Matrix f = Matrix::Zero(n, n);
  Eigen::VectorXcd angular = Eigen::VectorXcd::Zero(n_tuples);
  for (std::size_t k = 0; k < speed_rule.nodes.size(); ++k) {
    const double v = speed_rule.nodes[k];
    const double e_kin = 0.5 * gas.m * v * v;
    const double common = speed_rule.weights[k] * maxwell_speed_pdf(gas, v);
    if (isotropic) {
      fill_entrance_resolved(model, e_kin, 0.0, f);
      for (Eigen::Index i = 0; i < n_tuples; ++i) {
        const auto& t = tuples[i];
        if (e_kin <= t.gap) continue;
        const double v_out = std::sqrt(v * v - 2.0 * t.gap / gas.m);
        sums[i] += common * v_out * 4.0 * kPi * f(t.alpha, t.alpha0) *
                   std::conj(f(t.beta, t.beta0));
      }
    } else {
      angular.setZero();
      const auto& cos_rule = quadrature::gauss_legendre(n_cos);
      for (std::size_t c = 0; c < cos_rule.nodes.size(); ++c) {
        fill_entrance_resolved(model, e_kin, cos_rule.nodes[c], f);
        for (Eigen::Index i = 0; i < n_tuples; ++i) {
          const auto& t = tuples[i];
          angular[i] += cos_rule.weights[c] * f(t.alpha, t.alpha0) * std::conj(f(t.beta, t.beta0));
        }
      }
      for (Eigen::Index i = 0; i < n_tuples; ++i) {
        const auto& t = tuples[i];
        if (e_kin <= t.gap) continue;
        const double v_out = std::sqrt(v * v - 2.0 * t.gap / gas.m);
        sums[i] += common * v_out * 2.0 * kPi * angular[i];
      }
    }
  }
  return gas.n_gas * sums;
}

Eigen::VectorXcd rates_with_refinement(const scattering::Model& model, const GasParameters& gas,
                                       const std::vector<ActiveTuple>& tuples,
                                       const QuadratureConfig& config, double& residual) {
  const auto& channels = model.channels();
  const auto coarse_rule =
      thermal_speed_rule(channels, gas, config.n_v, config.v_max_factor);
  Eigen::VectorXcd coarse = accumulate_rates(model, gas, tuples, coarse_rule, config.n_cos);
  if (!config.refinement_check) {
    residual = 0.0;
    return coarse;
  }
  const auto fine_rule =
      thermal_speed_rule(channels, gas, 2 * config.n_v, config.v_max_factor);
  Eigen::VectorXcd fine = accumulate_rates(model, gas, tuples, fine_rule, 2 * config.n_cos);
  const double scale =
      std::max(coarse.size() ? coarse.cwiseAbs().maxCoeff() : 0.0,
               fine.size() ? fine.cwiseAbs().maxCoeff() : 0.0);
  residual = scale == 0.0 ? 0.0 : (coarse - fine).cwiseAbs().maxCoeff() / scale;
  if (residual > config.convergence_tolerance) {
    std::ostringstream msg;
    msg << "rate quadrature did not converge: relative change " << residual
        << " under node doubling exceeds " << config.convergence_tolerance;
    throw NumericalError(msg.str());
  }
  return fine;
}

// Scalar speed integral with the same doubled-node convergence contract.
template <typename Integrand>
double scalar_with_refinement(const scattering::ChannelSet& channels, const GasParameters& gas,
                              const QuadratureConfig& config, const char* who,
                              const Integrand& integrand, double& residual) {
  const auto evaluate = [&](int n_v, int n_cos) {
    const auto rule = thermal_speed_rule(channels, gas, n_v, config.v_max_factor);
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k)
      sum += rule.weights[k] * integrand(rule.nodes[k], n_cos);
    return sum;
  };
  const double coarse = evaluate(config.n_v, config.n_cos);
  if (!config.refinement_check) {
    residual = 0.0;
    return coarse;
  }
  const double fine = evaluate(2 * config.n_v, 2 * config.n_cos);
  const double scale = std::max(std::abs(coarse), std::abs(fine));
  residual = scale == 0.0 ? 0.0 : std::abs(coarse - fine) / scale;
  if (residual > config.convergence_tolerance) {
    std::ostringstream msg;
    msg << who << " quadrature did not converge: relative change " << residual
        << " under node doubling exceeds " << config.convergence_tolerance;
    throw NumericalError(msg.str());
  }
  return fine;
}

// Numerically stable streaming mean and variance.
struct Welford {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  double std_error() const {
    if (n < 2) return 0.0;
    return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  }
};

std::vector<McEstimate> mc_estimates(const scattering::Model& model, const GasParameters& gas,
                                     const std::vector<ActiveTuple>& tuples,
                                     const McConfig& config) {
  if (config.n_samples < 1)
    throw std::invalid_argument("McConfig: at least one sample required");
  const auto n = model.channels().count();
  rng::CounterRng gen(config.seed, 0);
  const double sigma = std::sqrt(gas.m / gas.beta);
  std::vector<Welford> acc_re(tuples.size());
  std::vector<Welford> acc_im(tuples.size());
  Matrix f = Matrix::Zero(n, n);
  for (std::size_t s = 0; s < config.n_samples; ++s) {
    const Eigen::Vector3d p0 = config.frame * gen.next_isotropic_gaussian3(sigma);
    const Eigen::Vector3d out_dir = gen.next_unit_vector();
    const double p_sq = p0.squaredNorm();
    const double p_norm = std::sqrt(p_sq);
    const double cos_theta =
        p_norm == 0.0 ? 1.0 : std::clamp(out_dir.dot(p0) / p_norm, -1.0, 1.0);
    const double e_kin = p_sq / (2.0 * gas.m);
    fill_entrance_resolved(model, e_kin, cos_theta, f);
    for (std::size_t i = 0; i < tuples.size(); ++i) {
      const auto& t = tuples[i];
      const double p_out_sq = p_sq - 2.0 * gas.m * t.gap;
      Complex sample{0.0, 0.0};
      if (p_out_sq > 0.0) {
        const double weight = 4.0 * kPi * gas.n_gas * std::sqrt(p_out_sq) / gas.m;
        sample = weight * f(t.alpha, t.alpha0) * std::conj(f(t.beta, t.beta0));
      }
      acc_re[i].add(sample.real());
      acc_im[i].add(sample.imag());
    }
  }
  std::vector<McEstimate> estimates(tuples.size());
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    estimates[i].value = Complex(acc_re[i].mean, acc_im[i].mean);
    estimates[i].stderr_re = acc_re[i].std_error();
    estimates[i].stderr_im = acc_im[i].std_error();
  }
  return estimates;
}

}  // namespace

GasParameters::GasParameters(double n_gas_in, double m_in, double beta_in)
    : n_gas(n_gas_in), m(m_in), beta(beta_in) {
  if (!(n_gas > 0.0) || !std::isfinite(n_gas) || !(m > 0.0) || !std::isfinite(m) ||
      !(beta > 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("GasParameters: density, mass, and beta must be positive");
}

double GasParameters::thermal_wavelength() const { return std::sqrt(2.0 * kPi * beta / m); }

double GasParameters::mean_speed() const { return std::sqrt(8.0 / (kPi * beta * m)); }

double maxwell_speed_pdf(const GasParameters& gas, double v) {
  if (v < 0.0) throw std::invalid_argument("maxwell_speed_pdf: speed must be nonnegative");
  const double bm = gas.beta * gas.m;
  return 4.0 * kPi * v * v * std::pow(bm / (2.0 * kPi), 1.5) * std::exp(-0.5 * bm * v * v);
}

int chi(const scattering::ChannelSet& channels, Eigen::Index alpha, Eigen::Index beta,
        Eigen::Index alpha0, Eigen::Index beta0, double energy_tolerance) {
  require_channel(channels, alpha, "chi");
  require_channel(channels, beta, "chi");
  require_channel(channels, alpha0, "chi");
  require_channel(channels, beta0, "chi");
  const double mismatch = (channels.energies[alpha] - channels.energies[alpha0]) -
                          (channels.energies[beta] - channels.energies[beta0]);
  return std::abs(mismatch) <= energy_tolerance ? 1 : 0;
}

std::vector<double> channel_opening_speeds(const scattering::ChannelSet& channels,
                                           const GasParameters& gas) {
  std::vector<double> speeds;
  for (Eigen::Index exit = 0; exit < channels.count(); ++exit)
    for (Eigen::Index entrance = 0; entrance < channels.count(); ++entrance) {
      const double gap = channels.energies[exit] - channels.energies[entrance];
      if (gap > 0.0) speeds.push_back(std::sqrt(2.0 * gap / gas.m));
    }
  std::sort(speeds.begin(), speeds.end());
  std::vector<double> unique;
  for (double v : speeds)
    if (unique.empty() || v - unique.back() > 1e-12 * (1.0 + v)) unique.push_back(v);
  return unique;
}

quadrature::Rule thermal_speed_rule(const scattering::ChannelSet& channels,
                                    const GasParameters& gas, int n_v, double v_max_factor) {
  if (n_v < 1) throw std::invalid_argument("thermal_speed_rule: n_v must be positive");
  const double v_max = v_max_factor / std::sqrt(gas.beta * gas.m);
  std::vector<double> breaks{0.0};
  for (double v : channel_opening_speeds(channels, gas))
    if (v < v_max * (1.0 - 1e-12)) breaks.push_back(v);
  breaks.push_back(v_max);
  quadrature::Rule rule;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const auto panel = quadrature::sqrt_endpoint_panel(n_v, breaks[i], breaks[i + 1]);
    rule.nodes.insert(rule.nodes.end(), panel.nodes.begin(), panel.nodes.end());
    rule.weights.insert(rule.weights.end(), panel.weights.begin(), panel.weights.end());
  }
  return rule;
}

RateTensor::RateTensor(scattering::ChannelSet channels_in, double energy_tolerance_in)
    : channels(std::move(channels_in)), energy_tolerance(energy_tolerance_in) {
  const auto n = channels.count();
  entries = Eigen::VectorXcd::Zero(n * n * n * n);
  chi_mask.assign(static_cast<std::size_t>(n * n * n * n), 0);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      for (Eigen::Index a0 = 0; a0 < n; ++a0)
        for (Eigen::Index b0 = 0; b0 < n; ++b0)
          chi_mask[static_cast<std::size_t>(flat(a, b, a0, b0))] =
              static_cast<char>(chi(channels, a, b, a0, b0, energy_tolerance));
}

Eigen::Index RateTensor::flat(Eigen::Index alpha, Eigen::Index beta, Eigen::Index alpha0,
                              Eigen::Index beta0) const {
  const auto n = channels.count();
  return ((alpha * n + beta) * n + alpha0) * n + beta0;
}

Complex RateTensor::operator()(Eigen::Index alpha, Eigen::Index beta, Eigen::Index alpha0,
                               Eigen::Index beta0) const {
  require_channel(channels, alpha, "RateTensor");
  require_channel(channels, beta, "RateTensor");
  require_channel(channels, alpha0, "RateTensor");
  require_channel(channels, beta0, "RateTensor");
  return entries[flat(alpha, beta, alpha0, beta0)];
}

bool RateTensor::chi_at(Eigen::Index alpha, Eigen::Index beta, Eigen::Index alpha0,
                        Eigen::Index beta0) const {
  return chi_mask[static_cast<std::size_t>(flat(alpha, beta, alpha0, beta0))] != 0;
}

Matrix coefficient_matrix(const RateTensor& rates) {
  const auto n = rates.channels.count();
  Matrix c(n * n, n * n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index a0 = 0; a0 < n; ++a0)
      for (Eigen::Index b = 0; b < n; ++b)
        for (Eigen::Index b0 = 0; b0 < n; ++b0)
          c(a * n + a0, b * n + b0) = rates.entries[rates.flat(a, b, a0, b0)];
  return c;
}

Matrix loss_operator(const RateTensor& rates) {
  const auto n = rates.channels.count();
  Matrix lambda = Matrix::Zero(n, n);
  for (Eigen::Index alpha = 0; alpha < n; ++alpha)
    for (Eigen::Index alpha0 = 0; alpha0 < n; ++alpha0)
      for (Eigen::Index gamma = 0; gamma < n; ++gamma)
        lambda(alpha, alpha0) += rates.entries[rates.flat(gamma, gamma, alpha0, alpha)];
  return lambda;
}

RateDiagnostics validate_rate_tensor(const RateTensor& rates) {
  const auto n = rates.channels.count();
  RateDiagnostics diag;
  diag.coefficient_norm = rates.entries.size() ? rates.entries.cwiseAbs().maxCoeff() : 0.0;
  double pairing = 0.0;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      for (Eigen::Index a0 = 0; a0 < n; ++a0)
        for (Eigen::Index b0 = 0; b0 < n; ++b0) {
          const auto idx = rates.flat(a, b, a0, b0);
          if (!rates.chi_mask[static_cast<std::size_t>(idx)])
            diag.chi_violation = std::max(diag.chi_violation, std::abs(rates.entries[idx]));
          pairing = std::max(pairing, std::abs(rates.entries[idx] -
                                               std::conj(rates.entries[rates.flat(b, a, b0, a0)])));
        }
  diag.hermiticity_residual =
      diag.coefficient_norm == 0.0 ? 0.0 : pairing / diag.coefficient_norm;
  const Matrix c = coefficient_matrix(rates);
  const Matrix herm = 0.5 * (c + c.adjoint());
  diag.psd_min_eig =
      Eigen::SelfAdjointEigenSolver<Matrix>(herm).eigenvalues().minCoeff();
  return diag;
}

void require_valid_rate_tensor(const RateTensor& rates, double psd_tol, double pairing_tol) {
  const RateDiagnostics diag = validate_rate_tensor(rates);
  std::ostringstream msg;
  if (diag.chi_violation > 1e-12 * std::max(1.0, diag.coefficient_norm)) {
    msg << "rate tensor violates the chi selection rule: entry magnitude " << diag.chi_violation
        << " outside the allowed index set";
    throw ConfigError(msg.str());
  }
  if (diag.hermiticity_residual > pairing_tol) {
    msg << "rate tensor violates the Hermiticity pairing: relative residual "
        << diag.hermiticity_residual;
    throw ConfigError(msg.str());
  }
  if (diag.psd_min_eig < -psd_tol * std::max(diag.coefficient_norm, 1e-300)) {
    msg << "rate tensor is not positive semidefinite: min eigenvalue " << diag.psd_min_eig
        << " with norm " << diag.coefficient_norm;
    throw ConfigError(msg.str());
  }
}

Complex rate_coefficient(const scattering::Model& model, const GasParameters& gas,
                         Eigen::Index alpha, Eigen::Index beta, Eigen::Index alpha0,
                         Eigen::Index beta0, const QuadratureConfig& config) {
  require_config(config);
  const auto& channels = model.channels();
  if (chi(channels, alpha, beta, alpha0, beta0, config.energy_tolerance) == 0)
    return Complex{0.0, 0.0};
  std::vector<ActiveTuple> tuple(1);
  tuple[0] = {alpha, beta, alpha0, beta0, 0,
              channels.energies[alpha] - channels.energies[alpha0]};
  double residual = 0.0;
  return rates_with_refinement(model, gas, tuple, config, residual)[0];
}

RateTensor rate_tensor(const scattering::Model& model, const GasParameters& gas,
                       const QuadratureConfig& config) {
  require_config(config);
  RateTensor rates(model.channels(), config.energy_tolerance);
  const auto tuples = chi_active_tuples(rates.channels, config.energy_tolerance);
  double residual = 0.0;
  const Eigen::VectorXcd values = rates_with_refinement(model, gas, tuples, config, residual);
  for (std::size_t i = 0; i < tuples.size(); ++i)
    rates.entries[tuples[i].flat] = values[static_cast<Eigen::Index>(i)];
  rates.quadrature_residual = residual;
  require_valid_rate_tensor(rates);
  return rates;
}

double energy_shift(const scattering::Model& model, const GasParameters& gas, Eigen::Index alpha,
                    const QuadratureConfig& config) {
  require_config(config);
  const auto& channels = model.channels();
  require_channel(channels, alpha, "energy_shift");
  const double e_alpha = channels.energies[alpha];
  double residual = 0.0;
  const double average = scalar_with_refinement(
      channels, gas, config, "energy_shift",
      [&](double v, int) {
        const double e_total = e_alpha + 0.5 * gas.m * v * v;
        // At the innermost nodes the kinetic term can underflow the threshold
        // in double precision; the Maxwell weight vanishes there anyway.
        if (!model.is_open(alpha, e_total)) return 0.0;
        return maxwell_speed_pdf(gas, v) * model.amplitude(alpha, alpha, 1.0, e_total).real();
      },
      residual);
  return -2.0 * kPi * (gas.n_gas / gas.m) * average;
}

EnergyShifts energy_shifts(const scattering::Model& model, const GasParameters& gas,
                           const QuadratureConfig& config) {
  EnergyShifts shifts;
  shifts.epsilon.resize(model.channels().count());
  for (Eigen::Index alpha = 0; alpha < shifts.epsilon.size(); ++alpha)
    shifts.epsilon[alpha] = energy_shift(model, gas, alpha, config);
  return shifts;
}

double elastic_dephasing_rate(const scattering::Model& model, const GasParameters& gas,
                              Eigen::Index alpha, Eigen::Index beta,
                              const QuadratureConfig& config) {
  require_config(config);
  const auto& channels = model.channels();
  require_channel(channels, alpha, "elastic_dephasing_rate");
  require_channel(channels, beta, "elastic_dephasing_rate");
  if (alpha == beta)
    throw std::invalid_argument("elastic_dephasing_rate: channels must differ");
  const double e_alpha = channels.energies[alpha];
  const double e_beta = channels.energies[beta];
  double residual = 0.0;
  const double average = scalar_with_refinement(
      channels, gas, config, "elastic_dephasing_rate",
      [&](double v, int n_cos) {
        const double e_kin = 0.5 * gas.m * v * v;
        // See energy_shift: skip nodes where the kinetic term underflows a
        // threshold, which would make the elastic amplitude undefined.
        if (!model.is_open(alpha, e_kin + e_alpha) || !model.is_open(beta, e_kin + e_beta))
          return 0.0;
        double angular = 0.0;
        if (model.angle_independent()) {
          angular = 2.0 * std::norm(model.amplitude(alpha, alpha, 0.0, e_kin + e_alpha) -
                                    model.amplitude(beta, beta, 0.0, e_kin + e_beta));
        } else {
          const auto& cos_rule = quadrature::gauss_legendre(n_cos);
          for (std::size_t c = 0; c < cos_rule.nodes.size(); ++c)
            angular += cos_rule.weights[c] *
                       std::norm(model.amplitude(alpha, alpha, cos_rule.nodes[c], e_kin + e_alpha) -
                                 model.amplitude(beta, beta, cos_rule.nodes[c], e_kin + e_beta));
        }
        return maxwell_speed_pdf(gas, v) * v * angular;
      },
      residual);
  return kPi * gas.n_gas * average;
}

McEstimate rate_coefficient_mc_oracle(const scattering::Model& model, const GasParameters& gas,
                                      Eigen::Index alpha, Eigen::Index beta, Eigen::Index alpha0,
                                      Eigen::Index beta0, const McConfig& config) {
  const auto& channels = model.channels();
  if (chi(channels, alpha, beta, alpha0, beta0, config.energy_tolerance) == 0)
    return McEstimate{};
  std::vector<ActiveTuple> tuple(1);
  tuple[0] = {alpha, beta, alpha0, beta0, 0,
              channels.energies[alpha] - channels.energies[alpha0]};
  return mc_estimates(model, gas, tuple, config)[0];
}

std::vector<McEstimate> rate_tensor_mc_oracle(const scattering::Model& model,
                                              const GasParameters& gas, const McConfig& config) {
  const auto& channels = model.channels();
  const auto n = channels.count();
  const auto tuples = chi_active_tuples(channels, config.energy_tolerance);
  const auto active = mc_estimates(model, gas, tuples, config);
  std::vector<McEstimate> estimates(static_cast<std::size_t>(n * n * n * n));
  for (std::size_t i = 0; i < tuples.size(); ++i)
    estimates[static_cast<std::size_t>(tuples[i].flat)] = active[i];
  return estimates;
}

}  // namespace colliq::thermal
