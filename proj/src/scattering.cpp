// scattering.cpp — Multichannel amplitudes, S-matrices, and cross sections.
#include "colliq/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "colliq/errors.hpp"
#include "colliq/quadrature.hpp"

namespace colliq::scattering {

namespace {

constexpr Complex kImag{0.0, 1.0};
constexpr double kPi = 3.14159265358979323846;

std::string format_energy(double e) {
  std::ostringstream out;
  out.precision(12);
  out << e;
  return out.str();
}

}  // namespace

ChannelSet::ChannelSet(std::vector<std::string> labels_in, Eigen::VectorXd energies_in,
                       double energy_tolerance)
    : labels(std::move(labels_in)), energies(std::move(energies_in)) {
  if (energies.size() < 1) throw std::invalid_argument("ChannelSet: at least one channel required");
  if (static_cast<Eigen::Index>(labels.size()) != energies.size())
    throw std::invalid_argument("ChannelSet: one label per energy required");
  if (!energies.allFinite()) throw std::invalid_argument("ChannelSet: energies must be finite");
  std::set<std::string> seen;
  for (const auto& label : labels) {
    if (label.empty()) throw std::invalid_argument("ChannelSet: empty channel label");
    if (!seen.insert(label).second)
      throw std::invalid_argument("ChannelSet: duplicate channel label '" + label + "'");
  }
  for (Eigen::Index a = 0; a < energies.size(); ++a)
    for (Eigen::Index b = a + 1; b < energies.size(); ++b)
      if (std::abs(energies[a] - energies[b]) <= energy_tolerance)
        throw std::invalid_argument("ChannelSet: channels '" + labels[a] + "' and '" + labels[b] +
                                    "' are degenerate within the energy tolerance");
}

Eigen::Index ChannelSet::index_of(const std::string& label) const {
  for (Eigen::Index a = 0; a < count(); ++a)
    if (labels[a] == label) return a;
  throw std::invalid_argument("ChannelSet: unknown channel label '" + label + "'");
}

Model::Model(ChannelSet channels, double mass) : channels_(std::move(channels)), mass_(mass) {
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw std::invalid_argument("Model: gas-particle mass must be positive");
}

void Model::require_valid_channel(Eigen::Index alpha, const char* who) const {
  if (alpha < 0 || alpha >= channels_.count())
    throw std::invalid_argument(std::string(who) + ": channel index out of range");
}

void Model::require_open(Eigen::Index alpha, double e_total, const char* who) const {
  require_valid_channel(alpha, who);
  if (!is_open(alpha, e_total))
    throw std::invalid_argument(std::string(who) + ": channel '" + channels_.labels[alpha] +
                                "' is closed at total energy " + format_energy(e_total) +
                                " (threshold " + format_energy(channels_.energies[alpha]) + ")");
}

bool Model::is_open(Eigen::Index alpha, double e_total) const {
  require_valid_channel(alpha, "is_open");
  return channels_.energies[alpha] < e_total;
}

double Model::momentum(Eigen::Index alpha, double e_total) const {
  require_open(alpha, e_total, "momentum");
  return std::sqrt(2.0 * mass_ * (e_total - channels_.energies[alpha]));
}

std::vector<OpenChannel> Model::open_channels(double e_total) const {
  std::vector<OpenChannel> open;
  for (Eigen::Index a = 0; a < channels_.count(); ++a)
    if (channels_.energies[a] < e_total)
      open.push_back({a, std::sqrt(2.0 * mass_ * (e_total - channels_.energies[a]))});
  return open;
}

Matrix Model::amplitude_matrix(double cos_theta, double e_total) const {
  const auto n = channels_.count();
  Matrix f = Matrix::Zero(n, n);
  const auto open = open_channels(e_total);
  for (const auto& exit : open)
    for (const auto& entrance : open)
      f(exit.index, entrance.index) = amplitude(exit.index, entrance.index, cos_theta, e_total);
  return f;
}

double Model::pair_cross_section(Eigen::Index alpha, Eigen::Index alpha0, double e_total,
                                 int n_cos) const {
  require_open(alpha, e_total, "pair_cross_section");
  require_open(alpha0, e_total, "pair_cross_section");
  if (angle_independent()) return 4.0 * kPi * std::norm(amplitude(alpha, alpha0, 0.0, e_total));
  const auto& rule = quadrature::gauss_legendre(n_cos);
  double integral = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k)
    integral += rule.weights[k] * std::norm(amplitude(alpha, alpha0, rule.nodes[k], e_total));
  return 2.0 * kPi * integral;
}

double Model::channel_total_cross_section(Eigen::Index alpha0, double e_total, int n_cos) const {
  require_open(alpha0, e_total, "channel_total_cross_section");
  const double p0 = momentum(alpha0, e_total);
  double total = 0.0;
  for (const auto& exit : open_channels(e_total))
    total += (exit.momentum / p0) * pair_cross_section(exit.index, alpha0, e_total, n_cos);
  return total;
}

double Model::optical_theorem_residual(Eigen::Index alpha0, double e_total, int n_cos) const {
  const double sigma = channel_total_cross_section(alpha0, e_total, n_cos);
  const double p0 = momentum(alpha0, e_total);
  const double forward = (4.0 * kPi / p0) * amplitude(alpha0, alpha0, 1.0, e_total).imag();
  const double scale = std::max(std::abs(sigma), std::abs(forward));
  return scale == 0.0 ? 0.0 : std::abs(sigma - forward) / scale;
}

SWaveKMatrixModel::SWaveKMatrixModel(ChannelSet channels, Eigen::MatrixXd reactance_lengths,
                                     double mass)
    : Model(std::move(channels), mass), a_(std::move(reactance_lengths)) {
  const auto n = this->channels().count();
  if (a_.rows() != n || a_.cols() != n)
    throw std::invalid_argument("SWaveKMatrixModel: reactance matrix must be n_ch x n_ch");
  if (!a_.allFinite())
    throw std::invalid_argument("SWaveKMatrixModel: reactance lengths must be finite");
  const double scale = std::max(1.0, a_.cwiseAbs().maxCoeff());
  if ((a_ - a_.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale)
    throw std::invalid_argument("SWaveKMatrixModel: reactance matrix must be symmetric");
}

Matrix SWaveKMatrixModel::s_matrix_at_energy(double e_total) const {
  const auto open = open_channels(e_total);
  if (open.empty())
    throw std::invalid_argument("s_matrix_at_energy: no open channels at total energy " +
                                format_energy(e_total));
  const auto n = static_cast<Eigen::Index>(open.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      k(i, j) = -std::sqrt(open[i].momentum) * a_(open[i].index, open[j].index) *
                std::sqrt(open[j].momentum);
  // cond(I - iK) <= sqrt(1 + lambda_max(K)^2); the Frobenius norm bounds
  // lambda_max, so the exact eigensolve only runs near the limit.
  if (k.norm() > 1e11) {
    const double k_top =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k).eigenvalues().cwiseAbs().maxCoeff();
    if (std::sqrt(1.0 + k_top * k_top) > 1e12)
      throw NumericalError("s_matrix_at_energy: Cayley transform ill-conditioned, |K| ~ " +
                           format_energy(k_top));
  }
  const Matrix ik = kImag * k.cast<Complex>();
  const Matrix identity = Matrix::Identity(n, n);
  // (I + iK)(I - iK)^(-1) = (I - iK)^(-1)(I + iK) since both factors commute.
  return (identity - ik).partialPivLu().solve(identity + ik);
}

Matrix SWaveKMatrixModel::amplitude_matrix(double /*cos_theta*/, double e_total) const {
  const auto n = channels().count();
  Matrix f = Matrix::Zero(n, n);
  const auto open = open_channels(e_total);
  if (open.empty()) return f;
  const Matrix s = s_matrix_at_energy(e_total);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(open.size()); ++i) {
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(open.size()); ++j) {
      const Complex delta = i == j ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
      f(open[i].index, open[j].index) =
          (s(i, j) - delta) / (2.0 * kImag * std::sqrt(open[i].momentum * open[j].momentum));
    }
  }
  return f;
}

Complex SWaveKMatrixModel::amplitude(Eigen::Index alpha, Eigen::Index alpha0, double /*cos_theta*/,
                                     double e_total) const {
  require_open(alpha, e_total, "amplitude");
  require_open(alpha0, e_total, "amplitude");
  const auto open = open_channels(e_total);
  const Matrix s = s_matrix_at_energy(e_total);
  Eigen::Index row = -1;
  Eigen::Index col = -1;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(open.size()); ++i) {
    if (open[i].index == alpha) row = i;
    if (open[i].index == alpha0) col = i;
  }
  const Complex delta = alpha == alpha0 ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
  return (s(row, col) - delta) /
         (2.0 * kImag * std::sqrt(open[row].momentum * open[col].momentum));
}

AmplitudeTable::AmplitudeTable(ChannelSet channels, double mass, std::vector<double> e_kin_grid,
                               std::vector<double> cos_theta_grid,
                               std::map<std::string, std::vector<Complex>> samples)
    : Model(std::move(channels), mass),
      e_kin_grid_(std::move(e_kin_grid)),
      cos_theta_grid_(std::move(cos_theta_grid)),
      samples_(std::move(samples)) {
  if (e_kin_grid_.empty()) throw ConfigError("AmplitudeTable: empty energy grid");
  if (cos_theta_grid_.empty()) throw ConfigError("AmplitudeTable: empty cos(theta) grid");
  for (std::size_t i = 0; i < e_kin_grid_.size(); ++i) {
    if (!std::isfinite(e_kin_grid_[i]) || e_kin_grid_[i] < 0.0)
      throw ConfigError("AmplitudeTable: energy grid must be finite and nonnegative");
    if (i > 0 && e_kin_grid_[i] <= e_kin_grid_[i - 1])
      throw ConfigError("AmplitudeTable: energy grid must be strictly increasing");
  }
  for (std::size_t i = 0; i < cos_theta_grid_.size(); ++i) {
    if (!std::isfinite(cos_theta_grid_[i]))
      throw ConfigError("AmplitudeTable: cos(theta) grid must be finite");
    if (i > 0 && cos_theta_grid_[i] <= cos_theta_grid_[i - 1])
      throw ConfigError("AmplitudeTable: cos(theta) grid must be strictly increasing");
  }
  // A single angular sample means an isotropic amplitude; otherwise the grid
  // must cover the full angular range so no extrapolation is ever needed.
  if (cos_theta_grid_.size() > 1 &&
      (std::abs(cos_theta_grid_.front() + 1.0) > 1e-12 ||
       std::abs(cos_theta_grid_.back() - 1.0) > 1e-12))
    throw ConfigError("AmplitudeTable: cos(theta) grid must span [-1, 1]");

  const auto n = this->channels().count();
  const auto expected = e_kin_grid_.size() * cos_theta_grid_.size();
  pair_lookup_.assign(static_cast<std::size_t>(n * n), nullptr);
  for (Eigen::Index exit = 0; exit < n; ++exit) {
    for (Eigen::Index entrance = 0; entrance < n; ++entrance) {
      const std::string key =
          this->channels().labels[exit] + "<-" + this->channels().labels[entrance];
      const auto it = samples_.find(key);
      if (it == samples_.end())
        throw ConfigError("AmplitudeTable: missing amplitude block '" + key + "'");
      if (it->second.size() != expected)
        throw ConfigError("AmplitudeTable: amplitude block '" + key + "' has " +
                          std::to_string(it->second.size()) + " samples, expected " +
                          std::to_string(expected));
      for (const auto& value : it->second)
        if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
          throw ConfigError("AmplitudeTable: non-finite sample in block '" + key + "'");
      pair_lookup_[static_cast<std::size_t>(exit * n + entrance)] = &it->second;
    }
  }
  if (samples_.size() != static_cast<std::size_t>(n * n))
    throw ConfigError("AmplitudeTable: unexpected amplitude block beyond the channel pairs");
}

namespace {

// Bracketing index and interpolation weight for a clamped coordinate.
std::pair<std::size_t, double> locate(const std::vector<double>& grid, double x) {
  if (grid.size() == 1 || x <= grid.front()) return {0, 0.0};
  if (x >= grid.back()) return {grid.size() - 2, 1.0};
  const auto hi = std::upper_bound(grid.begin(), grid.end(), x);
  const auto i = static_cast<std::size_t>(hi - grid.begin()) - 1;
  return {i, (x - grid[i]) / (grid[i + 1] - grid[i])};
}

}  // namespace

Complex AmplitudeTable::amplitude(Eigen::Index alpha, Eigen::Index alpha0, double cos_theta,
                                  double e_total) const {
  require_open(alpha, e_total, "amplitude");
  require_open(alpha0, e_total, "amplitude");
  const auto n = channels().count();
  const auto& block = *pair_lookup_[static_cast<std::size_t>(alpha * n + alpha0)];
  const double e_kin = e_total - channels().energies[alpha0];
  const auto [ie, we] = locate(e_kin_grid_, e_kin);
  const auto [ic, wc] = locate(cos_theta_grid_, cos_theta);
  const auto n_cos = cos_theta_grid_.size();
  const auto at = [&](std::size_t i, std::size_t j) { return block[i * n_cos + j]; };
  const std::size_t ie1 = e_kin_grid_.size() == 1 ? ie : ie + 1;
  const std::size_t ic1 = n_cos == 1 ? ic : ic + 1;
  const Complex low = (1.0 - wc) * at(ie, ic) + wc * at(ie, ic1);
  const Complex high = (1.0 - wc) * at(ie1, ic) + wc * at(ie1, ic1);
  return (1.0 - we) * low + we * high;
}

}  // namespace colliq::scattering
