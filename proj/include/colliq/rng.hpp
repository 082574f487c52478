// rng.hpp — Counter-based random streams for reproducible Monte Carlo.
#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace colliq::rng {

// SplitMix64 finalizer; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

// Stateless-by-construction stream: every draw is a hash of
// (master seed, stream id, running counter), so stream i is identical no
// matter how many other streams were consumed or on which thread it runs.
class CounterRng {
 public:
  CounterRng(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  double next_double();       // uniform on [0, 1)
  double next_open_double();  // uniform on (0, 1)
  double next_normal();       // standard normal, Box-Muller
  Eigen::Vector3d next_isotropic_gaussian3(double sigma);
  Eigen::Vector3d next_unit_vector();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_normal_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace colliq::rng
