#pragma once

#include <cstdint>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace predrep {

/// Counter-based pseudo-random stream with cheap splitting.
///
/// Every stochastic routine in this library takes an explicit Rng; there is
/// no hidden global generator.  split(i) derives a child stream that is
/// independent of the parent and of siblings, so fanning seeds out over
/// experiment repetitions is order-independent and reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(mix(seed ^ 0x7f4a7c15u)), counter_(0) {}

  /// Child stream addressed by index; does not advance this stream.
  Rng split(std::uint64_t stream) const {
    Rng child(0);
    child.key_ = mix(key_ ^ mix(stream + 0xd1b54a32d192ed03ull));
    child.counter_ = 0;
    return child;
  }

  std::uint64_t next_u64() {
    counter_ += 0x9e3779b97f4a7c15ull;
    return mix(key_ ^ counter_);
  }

  /// Uniform double in [0, 1).
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  int uniform_below(int n) {
    if (n <= 0) throw std::invalid_argument("uniform_below: n must be positive");
    return int((static_cast<unsigned __int128>(next_u64()) * static_cast<std::uint64_t>(n)) >> 64);
  }

  /// Standard normal via Box-Muller (pair cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Index draw proportional to non-negative weights.
  int categorical(const Eigen::Ref<const Eigen::VectorXd>& weights) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      if (weights[i] < 0.0) throw std::invalid_argument("categorical: negative weight");
      total += weights[i];
    }
    if (total <= 0.0) throw std::invalid_argument("categorical: weights sum to zero");
    double u = uniform() * total;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0.0) return int(i);
    }
    return int(weights.size() - 1);  // guards against accumulated roundoff
  }

  /// Fingerprint of the current stream position, recorded in trajectories.
  std::uint64_t state_id() const { return mix(key_ ^ mix(counter_)); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t counter_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace predrep
