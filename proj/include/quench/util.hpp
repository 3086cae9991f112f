// Shared plumbing: deterministic RNG streams, a small worker pool, CSV/number
// formatting helpers.
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace quench {

// SplitMix64 step; used both as a mixer and to derive substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based stream derivation: the stream for work item k of channel c is a
// pure function of (seed, c, k), so results are independent of scheduling.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t channel, std::uint64_t item) {
  std::uint64_t s = seed;
  splitmix64(s);
  s ^= 0x517cc1b727220a95ULL * (channel + 1);
  splitmix64(s);
  s ^= 0x2545f4914f6cdd1dULL * (item + 1);
  return splitmix64(s);
}

// mt19937_64 with a hand-rolled polar Box-Muller so draws do not depend on the
// C++ runtime's normal_distribution implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() {  // [0, 1)
    return (gen_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  std::uint64_t integer() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0;
};

// Runs fn(i) for i in [0, n) on up to n_threads workers. Results must be written
// to pre-sized slots indexed by i; aggregation order is then deterministic.
void run_parallel(int n, int n_threads, const std::function<void(int)>& fn);

// Number of workers to use: explicit setting, else QUENCH_THREADS env, else 1.
int default_threads();

// Locale-independent formatting used for every CSV cell (shortest round-trip).
std::string format_double(double x);

std::string join_path(const std::string& dir, const std::string& file);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// FNV-1a over a string; stable config fingerprint for output headers.
std::uint64_t fnv1a(const std::string& s);

extern const char* kVersion;

}  // namespace quench
