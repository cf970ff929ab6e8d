#pragma once

#include <cstdint>
#include <string>

#include "msob/space.hpp"

namespace msob {

/// Deterministic splitmix64 generator; identical streams on every platform,
/// so seeded experiments reproduce byte-for-byte.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
};

/// Builds a named analytic field from specs such as "constant:3", "linear",
/// "sin", "abskink", "indicator", "random:1.5" (random field with the given
/// Lipschitz bound, seeded separately). Analytic fields read the first
/// planar coordinate and require coords on the space.
ScalarField make_field(const Space& space, const std::string& spec, Rng& rng);

/// Largest-minorant regularization of i.i.d. uniform values; the result is
/// Lipschitz with constant at most `bound`.
ScalarField random_lipschitz_field(const Space& space, double bound, Rng& rng);

/// Closed form of the interval energy integral of |u'|^q on [0,1] for the
/// named fields with a classical derivative ("linear" -> 1,
/// "sin" -> (2 pi)^q * Gamma((q+1)/2) / (sqrt(pi) Gamma(q/2+1))).
double analytic_interval_energy(const std::string& field_name, double q);

}  // namespace msob
