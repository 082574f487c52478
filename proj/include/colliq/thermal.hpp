// thermal.hpp — Thermal averaging over a Maxwell gas: collision rate tensors,
// energy shifts, dephasing rates, and a Monte Carlo cross-check of the
// speed-integral quadrature. hbar = 1 throughout.
#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "colliq/ops.hpp"
#include "colliq/quadrature.hpp"
#include "colliq/scattering.hpp"

namespace colliq::thermal {

// Ideal-gas environment; beta is the inverse temperature in inverse energy
// units, m the gas-particle mass.
struct GasParameters {
  double n_gas;
  double m;
  double beta;

  GasParameters(double n_gas_in, double m_in, double beta_in);
  double thermal_wavelength() const;  // sqrt(2 pi beta / m)
  double mean_speed() const;          // sqrt(8 / (pi beta m))
};

// Maxwell speed distribution nu(v) = 4 pi v^2 (beta m / 2 pi)^(3/2)
// exp(-beta m v^2 / 2); normalized on [0, infinity).
double maxwell_speed_pdf(const GasParameters& gas, double v);

// Energy-matching indicator: 1 iff the transition energies E_alpha - E_alpha0
// and E_beta - E_beta0 agree within the tolerance. Rate-tensor entries vanish
// off this set.
int chi(const scattering::ChannelSet& channels, Eigen::Index alpha, Eigen::Index beta,
        Eigen::Index alpha0, Eigen::Index beta0, double energy_tolerance = 1e-9);

struct QuadratureConfig {
  int n_v = 128;                        // speed nodes per half-panel
  int n_cos = 64;                       // angular nodes
  double v_max_factor = 8.0;            // cutoff in units of 1 / sqrt(beta m)
  double energy_tolerance = 1e-9;       // chi matching tolerance
  double convergence_tolerance = 1e-8;  // relative change allowed under node doubling
  bool refinement_check = true;         // re-evaluate at doubled nodes and compare
};

// Speeds at which any exit channel opens for any entrance channel; these are
// square-root kinks of the thermal integrands and become panel boundaries.
std::vector<double> channel_opening_speeds(const scattering::ChannelSet& channels,
                                           const GasParameters& gas);

// Quadrature rule for integrals of nu(v) times amplitude products on
// [0, v_max]: panels between consecutive opening speeds, each with square-root
// endpoint maps so threshold factors integrate spectrally.
quadrature::Rule thermal_speed_rule(const scattering::ChannelSet& channels,
                                    const GasParameters& gas, int n_v, double v_max_factor);

struct RateDiagnostics {
  double hermiticity_residual = 0.0;  // worst pairing mismatch, relative to the tensor norm
  double psd_min_eig = 0.0;           // smallest eigenvalue of the coefficient matrix
  double chi_violation = 0.0;         // largest entry magnitude outside the chi mask
  double coefficient_norm = 0.0;      // largest entry magnitude
};

// Collision rate coefficients M_{alpha beta}^{alpha0 beta0} in channel-index
// order, flat index ((alpha n + beta) n + alpha0) n + beta0.
struct RateTensor {
  scattering::ChannelSet channels;
  Eigen::VectorXcd entries;
  std::vector<char> chi_mask;
  double energy_tolerance = 1e-9;
  double quadrature_residual = 0.0;  // relative change under node doubling

  RateTensor(scattering::ChannelSet channels_in, double energy_tolerance_in);
  Eigen::Index flat(Eigen::Index alpha, Eigen::Index beta, Eigen::Index alpha0,
                    Eigen::Index beta0) const;
  Complex operator()(Eigen::Index alpha, Eigen::Index beta, Eigen::Index alpha0,
                     Eigen::Index beta0) const;
  bool chi_at(Eigen::Index alpha, Eigen::Index beta, Eigen::Index alpha0,
              Eigen::Index beta0) const;
};

// The tensor reshaped with row (alpha, alpha0) and column (beta, beta0); it is
// Hermitian and positive semidefinite for every physical model.
Matrix coefficient_matrix(const RateTensor& rates);

// Total loss operator Lambda(alpha, alpha0) = sum_gamma M_{gamma gamma}^{alpha0 alpha};
// equals the Kraus-sum operator of the dissipator and is Hermitian PSD.
Matrix loss_operator(const RateTensor& rates);

RateDiagnostics validate_rate_tensor(const RateTensor& rates);

// Rejects tensors violating the Hermiticity pairing, the PSD bound
// (min eigenvalue >= -psd_tol * norm), or the chi mask.
void require_valid_rate_tensor(const RateTensor& rates, double psd_tol = 1e-10,
                               double pairing_tol = 1e-10);

// One entry of the rate tensor by segmented quadrature:
// chi * n_gas Int dv nu(v) v_out 2 pi Int dcos f_{alpha alpha0} conj(f_{beta beta0}),
// amplitudes taken at total energy m v^2/2 + E_entrance per side, v_out zero
// below the exit threshold. With the refinement check enabled, the returned
// value is the doubled-node evaluation and the inter-level change must stay
// below the convergence tolerance.
Complex rate_coefficient(const scattering::Model& model, const GasParameters& gas,
                         Eigen::Index alpha, Eigen::Index beta, Eigen::Index alpha0,
                         Eigen::Index beta0, const QuadratureConfig& config = {});

// All n^4 entries on a shared speed grid, which preserves the Gram structure
// of the coefficient matrix exactly at the quadrature level.
RateTensor rate_tensor(const scattering::Model& model, const GasParameters& gas,
                       const QuadratureConfig& config = {});

// Gas-induced level shift
// epsilon_alpha = -2 pi (n_gas / m) Int dv nu(v) Re f_{alpha alpha}(forward).
double energy_shift(const scattering::Model& model, const GasParameters& gas, Eigen::Index alpha,
                    const QuadratureConfig& config = {});

struct EnergyShifts {
  Eigen::VectorXd epsilon;
  double quadrature_residual = 0.0;
};

EnergyShifts energy_shifts(const scattering::Model& model, const GasParameters& gas,
                           const QuadratureConfig& config = {});

// Coherence decay rate between two elastic channels:
// gamma = pi n_gas Int dv nu(v) v Int dcos |f_{alpha alpha} - f_{beta beta}|^2.
// For purely elastic models this equals
// Re(M_aa^aa + M_bb^bb)/2 - Re M_ab^ab.
double elastic_dephasing_rate(const scattering::Model& model, const GasParameters& gas,
                              Eigen::Index alpha, Eigen::Index beta,
                              const QuadratureConfig& config = {});

struct McConfig {
  std::size_t n_samples = 100000;
  std::uint64_t seed = 1;
  double energy_tolerance = 1e-9;
  // Rotation applied to the sampled gas momenta; estimates are invariant in
  // distribution, which exercises the isotropy of the momentum integral.
  Eigen::Matrix3d frame = Eigen::Matrix3d::Identity();
};

struct McEstimate {
  Complex value{0.0, 0.0};
  double stderr_re = 0.0;
  double stderr_im = 0.0;
};

// Monte Carlo evaluation of the rate coefficient directly as a gas-momentum
// integral: momenta sampled from the Maxwell distribution, outgoing directions
// uniform on the sphere, the energy-shell constraint resolved analytically for
// the outgoing momentum. Serves as the independent cross-check of
// rate_coefficient; shares no quadrature machinery with it.
McEstimate rate_coefficient_mc_oracle(const scattering::Model& model, const GasParameters& gas,
                                      Eigen::Index alpha, Eigen::Index beta, Eigen::Index alpha0,
                                      Eigen::Index beta0, const McConfig& config);

// All n^4 entries estimated on shared samples (common random numbers); entry
// order matches RateTensor::flat.
std::vector<McEstimate> rate_tensor_mc_oracle(const scattering::Model& model,
                                              const GasParameters& gas, const McConfig& config);

}  // namespace colliq::thermal
