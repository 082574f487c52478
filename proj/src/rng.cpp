// rng.cpp — Counter-based random streams for reproducible Monte Carlo.
#include "colliq/rng.hpp"

#include <cmath>
#include <numbers>

namespace colliq::rng {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t master_seed, std::uint64_t stream_id)
    : key_(mix64(mix64(master_seed) ^ (kStreamSalt * (stream_id + 1)))) {}

std::uint64_t CounterRng::next_u64() { return mix64(key_ + kGolden * ++counter_); }

double CounterRng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::next_open_double() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::next_normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_normal_;
  }
  const double u1 = next_open_double();
  const double u2 = next_double();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

Eigen::Vector3d CounterRng::next_isotropic_gaussian3(double sigma) {
  return sigma * Eigen::Vector3d(next_normal(), next_normal(), next_normal());
}

Eigen::Vector3d CounterRng::next_unit_vector() {
  const double cos_theta = 2.0 * next_double() - 1.0;
  const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
  const double phi = 2.0 * std::numbers::pi * next_double();
  return {sin_theta * std::cos(phi), sin_theta * std::sin(phi), cos_theta};
}

}  // namespace colliq::rng
