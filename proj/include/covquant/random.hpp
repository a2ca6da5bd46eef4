#pragma once

#include <cstdint>
#include <random>

#include "covquant/operator_core.hpp"

namespace covquant {

/// Seeded, portable random source. mt19937_64 is fully specified by the
/// standard and the uniform/normal transforms are written out explicitly, so
/// the same seed produces the same stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform in [0, 1), 53-bit mantissa.
    double u01() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (cached second value).
    double normal();

    cx gaussian_complex() { return cx(normal(), normal()); }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

/// Ginibre density: G G^dag normalized to trace one.
DensityOperator random_density(Eigen::Index dim, Rng& rng,
                               const Tolerances& tols = Tolerances::defaults());

/// Normalized Gaussian vector.
Vector random_state(Eigen::Index dim, Rng& rng);

/// Entrywise Gaussian matrix (unnormalized).
Matrix random_matrix(Eigen::Index dim, Rng& rng);

/// Unitary from the QR factorization of a Ginibre matrix.
Operator random_unitary(Eigen::Index dim, Rng& rng);

} // namespace covquant
