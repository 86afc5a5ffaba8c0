#pragma once

#include <cstdint>

#include "adeq/model.hpp"

namespace adeq {

/// H-tree RC network generator. Depth levels are 1 (root) through 8; level i
/// has 2^(i-1) nodes. Per-node resistance and capacitance are drawn once,
/// uniformly within a relative tolerance eta around the level nominals, and
/// every derived rate constant is materialized as a frozen state variable so
/// the right-hand sides stay polynomial of degree two.
struct HtreeOptions {
  int depth = 2;
  double eta = 0.0;
  double vs = 2.0;
  std::uint64_t seed = 0;
};

struct HtreeModel {
  PIVP pivp;
  Partition partition;
  HtreeOptions options;
};

HtreeModel gen_htree(const HtreeOptions& opts);

/// Deterministic 64-bit generator used for all sampling in this project.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi].
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
  std::uint64_t state_;
};

}  // namespace adeq
