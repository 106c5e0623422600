#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace catalytic {

/// Splittable counter-based RNG stream. A stream is a value; deriving a
/// child with (label, index) is deterministic, so independent substreams
/// can be handed to parallel tasks without coordination.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  RngStream child(std::string_view label, std::uint64_t index = 0) const {
    std::uint64_t h = state_;
    h = mix(h ^ fnv1a(label));
    h = mix(h ^ index);
    return RngStream(h);
  }

  std::mt19937_64 engine() const {
    std::mt19937_64 eng(mix(state_ ^ 0x9e3779b97f4a7c15ULL));
    return eng;
  }

  std::uint64_t state() const { return state_; }

 private:
  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ULL;
    }
    return h;
  }

  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace catalytic
