#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include <Eigen/Dense>

#include "mugrid/netmodel.hpp"

namespace mugrid {

struct Range {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const { return x >= lo && x <= hi; }
};

struct SynthConfig {
    int n = 50;
    double avg_degree = 4.0;
    /// Overrides avg_degree when set.
    std::optional<double> edge_probability;
    std::uint64_t seed = 42;
    Range b{-1.0, 0.0};
    /// g = |b| * U(g_ratio)
    Range g_ratio{0.0, 0.5};
    Range v{0.95, 1.05};
    Range delta{-0.5, 0.5};
    Range d{1.5, 3.0};
    Range m{0.4, 2.0};
    int max_attempts = 1000;

    /// Throws ParameterError for n < 2, empty or inverted ranges, or an invalid edge probability.
    void validate() const;
    double edge_prob() const;
};

struct SynthCase {
    Network net;
    /// Setpoints are flow_active at the sampled angles, so those angles are an exact EP.
    InterfaceParams params;
    Eigen::VectorXd seed_angles;
    int diameter = 0;
    int attempts = 0;
};

/// Deterministic draws in [0, 1) from a 64-bit Mersenne Twister (53-bit mantissa).
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : gen_(seed) {}

    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(const Range& r) { return r.lo + (r.hi - r.lo) * unit(); }
    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

/// Throws NetworkError when no connected graph was drawn within max_attempts.
SynthCase generate(const SynthConfig& cfg);

/// Hop diameter of the closed-line graph; -1 when disconnected.
int graph_diameter(const Network& net);

}  // namespace mugrid
