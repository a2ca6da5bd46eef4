#pragma once

#include <cmath>

#include "covquant/povm.hpp"
#include "covquant/quantization.hpp"
#include "covquant/random.hpp"

namespace covquant::testing {

inline QuantizationKernel vacuum_kernel(Eigen::Index dim) {
    Matrix t = Matrix::Zero(dim, dim);
    t(0, 0) = 1.0;
    return QuantizationKernel{DensityOperator(Operator(std::move(t)))};
}

inline Vector basis_vector(Eigen::Index dim, Eigen::Index k) {
    Vector e = Vector::Zero(dim);
    e[k] = 1.0;
    return e;
}

inline Effect basis_projector(Eigen::Index dim, Eigen::Index k) {
    Matrix p = Matrix::Zero(dim, dim);
    p(k, k) = 1.0;
    return Effect(Operator(std::move(p)));
}

inline ClassicalObservable random_nonnegative(const GroupCarrier& carrier, Rng& rng) {
    Vector v(static_cast<Eigen::Index>(carrier.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.u01();
    return ClassicalObservable(carrier, std::move(v), 1.0);
}

inline ClassicalObservable random_complex_function(const GroupCarrier& carrier,
                                                   Rng& rng) {
    Vector v(static_cast<Eigen::Index>(carrier.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v[i] = cx(2.0 * rng.u01() - 1.0, 2.0 * rng.u01() - 1.0);
    return ClassicalObservable(carrier, std::move(v));
}

} // namespace covquant::testing
