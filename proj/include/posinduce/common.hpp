#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace posinduce {

/// Dense matrix with contiguous rows; rows are points/words/tokens throughout.
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Side { Left, Right };

std::string_view to_string(Side side);
Side parse_side(std::string_view text);
inline Side opposite(Side side) {
  return side == Side::Left ? Side::Right : Side::Left;
}

// Error hierarchy. The CLI maps these onto exit codes 1/2/3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

/// Malformed, missing or version-mismatched input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Decomposition or clustering could not produce a valid result.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Seeded generator whose draws are identical on every platform.
///
/// The standard distributions are implementation-defined, so sampling
/// is done directly on the raw mt19937_64 stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [0, bound).
  std::uint64_t uniform_index(std::uint64_t bound);
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();
  /// Standard normal draw (Box-Muller).
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// `count` distinct indices drawn uniformly from [0, n), returned ascending.
std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                    std::size_t count,
                                                    Rng& rng);

/// Derives an independent stream seed for a named pipeline stage.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage);

/// 64-bit FNV-1a, used for fingerprints and input checksums.
std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t hash = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

/// Runs body(begin, end) over [0, n) split into contiguous chunks.
/// threads == 0 selects the hardware concurrency.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace posinduce
