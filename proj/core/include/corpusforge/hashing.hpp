#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace corpusforge {

/// splitmix64 finalizer. Bijective on u64, so x -> mix64(x ^ salt) is a
/// permutation of the key space for any fixed salt.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine64(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

/// FNV-1a over raw bytes with a splitmix finalizer on top.
std::uint64_t hash_bytes64(std::string_view bytes);

/// Deterministic sequence of pseudo-random u64s; used for derived seeds
/// and test data generation.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }
  /// Uniform value in [0, n) by rejection sampling; n must be > 0.
  std::uint64_t below(std::uint64_t n);
  double unit();  // uniform in [0, 1)

 private:
  std::uint64_t state_;
};

std::string to_hex(std::string_view bytes);

/// SHA-256 as a lowercase hex digest.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file_hex(const std::filesystem::path& path);

}  // namespace corpusforge
