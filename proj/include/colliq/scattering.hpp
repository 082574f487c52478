// scattering.hpp — Multichannel scattering amplitudes, S-matrices, and cross
// sections from a reactance-matrix model or tabulated data.
#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "colliq/ops.hpp"

namespace colliq::scattering {

// Internal energy levels of the immobile system, one per scattering channel.
// Labels are unique; energies are pairwise separated by more than
// energy_tolerance, so population and coherence dynamics decouple downstream.
struct ChannelSet {
  std::vector<std::string> labels;
  Eigen::VectorXd energies;

  ChannelSet(std::vector<std::string> labels_in, Eigen::VectorXd energies_in,
             double energy_tolerance = 1e-9);
  Eigen::Index count() const { return energies.size(); }
  Eigen::Index index_of(const std::string& label) const;
};

struct OpenChannel {
  Eigen::Index index = 0;
  double momentum = 0.0;
};

// Common kinematics and angular integrals for any amplitude carrier. Energies
// are total energies E = E_kin + E_channel; a channel is open when its energy
// lies strictly below the total energy. hbar = 1 throughout.
class Model {
 public:
  Model(ChannelSet channels, double mass);
  virtual ~Model() = default;

  const ChannelSet& channels() const { return channels_; }
  double mass() const { return mass_; }

  bool is_open(Eigen::Index alpha, double e_total) const;
  // p_alpha = sqrt(2 m (E - E_alpha)); rejects closed channels.
  double momentum(Eigen::Index alpha, double e_total) const;
  std::vector<OpenChannel> open_channels(double e_total) const;

  // f_{alpha alpha0}(cos theta; E), a length. Both channels must be open.
  virtual Complex amplitude(Eigen::Index alpha, Eigen::Index alpha0, double cos_theta,
                            double e_total) const = 0;
  // True when amplitudes carry no angular dependence, enabling closed forms
  // for the angular integrals below.
  virtual bool angle_independent() const = 0;

  // All amplitudes at one total energy: entry (alpha, alpha0) is
  // f_{alpha alpha0}(cos_theta; e_total) for open pairs and zero elsewhere.
  virtual Matrix amplitude_matrix(double cos_theta, double e_total) const;

  // sigma_{alpha alpha0} = 2 pi Int_{-1}^{1} |f_{alpha alpha0}|^2 dcos(theta).
  double pair_cross_section(Eigen::Index alpha, Eigen::Index alpha0, double e_total,
                            int n_cos = 64) const;
  // Total loss out of entrance channel alpha0: the flux-weighted sum
  // sum_alpha (p_alpha / p_alpha0) sigma_{alpha alpha0} over open exits. The
  // flux weights make the unitarity sum rule below hold channel by channel.
  double channel_total_cross_section(Eigen::Index alpha0, double e_total, int n_cos = 64) const;
  // Relative gap between channel_total_cross_section and
  // (4 pi / p_alpha0) Im f_{alpha0 alpha0}(forward). Zero for unitary models;
  // a data-quality diagnostic for tabulated amplitudes.
  double optical_theorem_residual(Eigen::Index alpha0, double e_total, int n_cos = 64) const;

 protected:
  void require_valid_channel(Eigen::Index alpha, const char* who) const;
  void require_open(Eigen::Index alpha, double e_total, const char* who) const;

 private:
  ChannelSet channels_;
  double mass_;
};

// s-wave multichannel model parameterized by a real symmetric matrix of
// reactance lengths. The Cayley transform of K_{beta alpha} =
// -sqrt(p_beta) a_{beta alpha} sqrt(p_alpha) yields a unitary symmetric
// S-matrix at every energy, so unitarity identities hold to rounding.
class SWaveKMatrixModel : public Model {
 public:
  SWaveKMatrixModel(ChannelSet channels, Eigen::MatrixXd reactance_lengths, double mass);

  const Eigen::MatrixXd& reactance_lengths() const { return a_; }

  // S = (I + iK)(I - iK)^(-1) restricted to the channels open at e_total,
  // ordered by channel index. Rows/columns follow open_channels(e_total).
  Matrix s_matrix_at_energy(double e_total) const;

  // f_{alpha alpha0} = (S_{alpha alpha0} - delta) / (2 i sqrt(p_alpha p_alpha0)).
  Complex amplitude(Eigen::Index alpha, Eigen::Index alpha0, double cos_theta,
                    double e_total) const override;
  bool angle_independent() const override { return true; }
  // Single S-matrix build for all pairs; exact match with amplitude().
  Matrix amplitude_matrix(double cos_theta, double e_total) const override;

 private:
  Eigen::MatrixXd a_;
};

// Amplitudes sampled on a rectangular (collision energy, cos theta) grid with
// bilinear interpolation. The energy axis is the entrance-channel kinetic
// energy E - E_alpha0; queries outside the tabulated energy range clamp to the
// nearest edge. No unitarity repair is applied; use optical_theorem_residual
// to judge data quality.
class AmplitudeTable : public Model {
 public:
  AmplitudeTable(ChannelSet channels, double mass, std::vector<double> e_kin_grid,
                 std::vector<double> cos_theta_grid,
                 std::map<std::string, std::vector<Complex>> samples);

  const std::vector<double>& e_kin_grid() const { return e_kin_grid_; }
  const std::vector<double>& cos_theta_grid() const { return cos_theta_grid_; }
  // Row-major samples over (energy, cos theta) for the ordered pair
  // "exit<-entrance", keyed by channel labels.
  const std::map<std::string, std::vector<Complex>>& samples() const { return samples_; }

  Complex amplitude(Eigen::Index alpha, Eigen::Index alpha0, double cos_theta,
                    double e_total) const override;
  bool angle_independent() const override { return cos_theta_grid_.size() == 1; }

 private:
  std::vector<double> e_kin_grid_;
  std::vector<double> cos_theta_grid_;
  std::map<std::string, std::vector<Complex>> samples_;
  std::vector<const std::vector<Complex>*> pair_lookup_;
};

}  // namespace colliq::scattering
