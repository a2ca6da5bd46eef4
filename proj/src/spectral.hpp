#pragma once

#include <Eigen/Eigenvalues>

#include "covquant/operator_core.hpp"

namespace covquant::detail {

/// Positive spectral factor B with T ~= B B^dag: columns sqrt(lambda_r) v_r
/// over the eigenvalues above rel_cutoff * lambda_max (negative dust from the
/// psd tolerance is dropped). Deterministic for a given T.
inline Matrix positive_factor(const Operator& t, double rel_cutoff = 1e-14) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(
        0.5 * (t.matrix() + t.matrix().adjoint()));
    const Eigen::VectorXd eigs = es.eigenvalues();
    const double cutoff = std::max(0.0, eigs.maxCoeff()) * rel_cutoff;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < eigs.size(); ++i)
        if (eigs[i] > cutoff) ++rank;
    Matrix factor(t.dim(), rank);
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < eigs.size(); ++i)
        if (eigs[i] > cutoff)
            factor.col(col++) = es.eigenvectors().col(i) * std::sqrt(eigs[i]);
    return factor;
}

} // namespace covquant::detail
