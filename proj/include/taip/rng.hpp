#pragma once

// Deterministic draw helpers on top of std::mt19937_64.
//
// std's distribution objects are implementation-defined, so generated
// instances would differ between standard libraries. These helpers pin the
// exact mapping from engine output to values, which keeps (seed, config) ->
// byte-identical files portable.

#include <cmath>
#include <cstdint>
#include <random>

namespace taip {

using Rng = std::mt19937_64;

// Uniform integer in [lo, hi], rejection sampled to avoid modulo bias.
inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return lo + static_cast<std::int64_t>(rng());  // full 64-bit range
  const std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % span);
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return lo + static_cast<std::int64_t>(draw % span);
}

// Uniform real in [lo, hi) from the top 53 bits of one engine output.
inline double uniform_real(Rng& rng, double lo, double hi) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + unit * (hi - lo);
}

// One normal deviate via Box-Muller. Consumes exactly two engine outputs so
// the draw sequence stays aligned across call sites.
inline double normal(Rng& rng, double mu, double sigma) {
  const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  const double u2 = uniform_real(rng, 0.0, 1.0);
  const double r = std::sqrt(-2.0 * std::log(u1));
  return mu + sigma * r * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace taip
