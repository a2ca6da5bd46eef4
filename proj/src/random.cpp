#include "covquant/random.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/QR>

namespace covquant {

double Rng::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    // Box-Muller; u in (0, 1] to keep the log finite.
    const double u = 1.0 - u01();
    const double v = u01();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double angle = 2.0 * std::numbers::pi * v;
    cached_ = r * std::sin(angle);
    has_cached_ = true;
    return r * std::cos(angle);
}

Matrix random_matrix(Eigen::Index dim, Rng& rng) {
    Matrix g(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = rng.gaussian_complex();
    return g;
}

DensityOperator random_density(Eigen::Index dim, Rng& rng, const Tolerances& tols) {
    Matrix g = random_matrix(dim, rng);
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    // enforce exact Hermitian storage so downstream gates see clean input
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityOperator(Operator(std::move(rho)), tols);
}

Vector random_state(Eigen::Index dim, Rng& rng) {
    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.gaussian_complex();
    v.normalize();
    return v;
}

Operator random_unitary(Eigen::Index dim, Rng& rng) {
    Eigen::HouseholderQR<Matrix> qr(random_matrix(dim, rng));
    Matrix q = qr.householderQ();
    return Operator(std::move(q));
}

} // namespace covquant
