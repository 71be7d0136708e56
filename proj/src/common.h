// Copyright Contributors to the HybridRender Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hr {

// ---------------------------------------------------------------------------
// Error taxonomy. Every failure surfaces as one of these so callers (and the
// CLI) can map them to exit codes without string matching.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct LoadError : Error {
  using Error::Error;
};
struct FormatError : Error {
  using Error::Error;
};
struct ParamError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct ShapeError : Error {
  using Error::Error;
};
struct InputError : Error {
  using Error::Error;
};
struct GenerationError : Error {
  using Error::Error;
};
struct SpecError : Error {
  using Error::Error;
};
struct CheckpointError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Deterministic counter-based RNG.
//
// All randomness in the project is derived from (seed, stream tags) through
// a splitmix64 chain, so results are reproducible across platforms and
// independent of thread scheduling. std::random distributions are avoided on
// purpose: their output is implementation-defined.
// ---------------------------------------------------------------------------

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix64(seed ^ 0x8f2d3c1b5a497e6bull)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  // Uniform in [0, 1). 53-bit resolution.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = std::uint64_t(hi - lo) + 1;
    return lo + std::int64_t(next_u64() % span);
  }

  // Standard normal via Box-Muller (deterministic, no cached spare).
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::uint64_t state_;
};

// Derives an independent stream from a base seed and up to three tags.
inline Rng make_stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t a = 0,
                       std::uint64_t b = 0) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ tag);
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ b);
  return Rng(s);
}

// Compile-time FNV-1a hash for stream tags, e.g. stream_tag("patch_anchor").
constexpr std::uint64_t stream_tag(const char* s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  while (*s) {
    h ^= std::uint64_t(*s++);
    h *= 0x100000001b3ull;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Numeric helpers shared across modules.
// ---------------------------------------------------------------------------

template <typename T>
inline T softplus(T x) {
  // max(x,0) + log1p(exp(-|x|)) avoids overflow on both tails.
  return std::max(x, T(0)) + std::log1p(std::exp(-std::abs(x)));
}

template <typename T>
inline T sigmoid(T x) {
  if (x >= T(0)) {
    const T e = std::exp(-x);
    return T(1) / (T(1) + e);
  }
  const T e = std::exp(x);
  return e / (T(1) + e);
}

template <typename T>
inline T leaky_relu(T x, T slope = T(0.01)) {
  return x > T(0) ? x : slope * x;
}

template <typename T>
inline T clamp01(T x) {
  return x < T(0) ? T(0) : (x > T(1) ? T(1) : x);
}

// Worker cap: HYBRIDRENDER_THREADS overrides hardware concurrency.
int worker_count();

}  // namespace hr
