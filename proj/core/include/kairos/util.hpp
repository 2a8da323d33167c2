#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kairos {

inline constexpr const char* kVersion = "0.1.0";

/// Invalid input data (malformed corpus files, broken invariants).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// API misuse or unsatisfiable configuration.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Counter-based deterministic RNG. Every draw is a pure function of
/// (seed, counter), so streams are reproducible across platforms and
/// independent of call-site history once forked.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * ++counter_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller (two draws per call).
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(below(v.size()))];
  }

  /// Independent substream keyed by tag.
  Rng fork(std::uint64_t tag) const;

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
};

/// SHA-256 digest as a lowercase hex string.
std::string sha256_hex(const std::string& data);
std::string sha256_file_hex(const std::string& path);

/// Fixed-point decimal formatting used by every CSV/report writer so that
/// identical runs emit byte-identical files.
std::string format_double(double v, int precision = 6);

/// CSV field quoting per RFC 4180 (quotes only when needed).
std::string csv_escape(const std::string& field);

/// Runs fn(i) for i in [0, n) on up to jobs threads. Results must be
/// written to per-index slots; the call returns after all complete.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

std::string lower_ascii(std::string s);
std::vector<std::string> split(const std::string& s, char sep);
std::string join(const std::vector<std::string>& parts, const std::string& sep);
std::string trim(const std::string& s);

}  // namespace kairos
