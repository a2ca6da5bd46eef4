#pragma once

// Test-only independent oracles. Nothing here shares code with the library
// paths it checks.

#include <cmath>

#include "covquant/operator_core.hpp"

namespace covquant::testing {

/// Plain scaling-and-squaring Taylor exponential; adequate for the small
/// generators used in tests.
inline Matrix expm_taylor(const Matrix& a) {
    const double norm = a.cwiseAbs().sum();
    int squarings = 0;
    double scale = 1.0;
    while (norm * scale > 0.5) {
        scale *= 0.5;
        ++squarings;
    }
    const Matrix x = a * scale;
    Matrix sum = Matrix::Identity(a.rows(), a.cols());
    Matrix term = sum;
    for (int k = 1; k <= 40; ++k) {
        term = (term * x) / static_cast<double>(k);
        sum += term;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

/// Displacement operator by exponentiating the generator
/// alpha a^dag - conj(alpha) a on an m-dimensional block.
inline Matrix displacement_expm(Eigen::Index m, cx alpha) {
    Matrix gen = Matrix::Zero(m, m);
    for (Eigen::Index n = 0; n + 1 < m; ++n) {
        const double root = std::sqrt(static_cast<double>(n + 1));
        gen(n + 1, n) = alpha * root;        // creation part
        gen(n, n + 1) = -std::conj(alpha) * root;
    }
    return expm_taylor(gen);
}

} // namespace covquant::testing
