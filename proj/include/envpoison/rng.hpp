#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace envpoison {

// Counter-based pseudo-random generator: draw i is the SplitMix64 finalizer
// applied to seed + (i+1)*phi64.  Pure 64-bit integer arithmetic, so traces
// are bit-reproducible across platforms and independent of call scheduling.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed), counter_(0) {}

    std::uint64_t next_u64() {
        std::uint64_t z = seed_ + (++counter_) * 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1) with 53 random mantissa bits.
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform integer in {0, ..., n-1}.
    int next_below(int n) { return int(next_u64() % std::uint64_t(n)); }

    // Index drawn proportionally to the (non-negative) weights; the caller
    // guarantees a strictly positive total.
    int categorical(const Eigen::VectorXd& weights) {
        double total = weights.sum();
        double u = next_double() * total;
        double acc = 0.0;
        int last = 0;
        for (int i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0.0) continue;
            acc += weights[i];
            last = i;
            if (u < acc) return i;
        }
        return last;  // guards against acc < total from rounding
    }

    // Independent generator for a named sub-stream; deterministic in
    // (seed, stream_id) and uncorrelated with draws from this generator.
    CounterRng derive(std::uint64_t stream_id) const {
        std::uint64_t z = seed_ ^ (0xd1342543de82ef95ULL * (stream_id + 1));
        z = (z ^ (z >> 32)) * 0xd6e8feb86659fd93ULL;
        return CounterRng(z ^ (z >> 32));
    }

  private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

}  // namespace envpoison
