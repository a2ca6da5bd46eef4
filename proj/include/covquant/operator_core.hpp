#pragma once

#include <complex>

#include <Eigen/Dense>
#include <json.hpp>

#include "covquant/config.hpp"
#include "covquant/errors.hpp"

namespace covquant {

using cx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Dense complex square matrix, the ambient algebra for everything downstream.
/// Construction rejects non-square shapes, empty matrices and non-finite
/// entries; instances are immutable afterwards.
class Operator {
public:
    explicit Operator(Matrix m);

    static Operator identity(Eigen::Index dim);
    static Operator zero(Eigen::Index dim);

    Eigen::Index dim() const { return mat_.rows(); }
    const Matrix& matrix() const { return mat_; }

private:
    Matrix mat_;
};

cx trace(const Operator& a);

/// Sum of singular values.
double trace_norm(const Operator& a);

/// Max-norm distance from A to its adjoint.
double hermiticity_defect(const Operator& a);

/// ||U^dag U - I||_max.
double unitarity_defect(const Operator& u);

double max_abs(const Matrix& m);

/// Max |entry| over the top-left k x k block (k clamped to the dimension).
/// Used for residuals on truncated systems, where entries near the cutoff
/// carry no information.
double probe_block_max_abs(const Matrix& m, int k);

Operator hermitian_part(const Operator& a);

/// Eigenvalues of the Hermitian symmetrization (A + A^dag)/2. Throws
/// NonHermitianInput when the defect exceeds herm_tol.
Eigen::VectorXd hermitian_eigenvalues(const Operator& a, double herm_tol);

/// True iff min eigenvalue >= -tol. Input must be Hermitian within herm_tol.
bool is_positive(const Operator& a, double tol,
                 const Tolerances& tols = Tolerances::defaults());

/// U S U^dag with a unitarity gate on U (NonUnitaryConjugator).
Operator conjugate(const Operator& u, const Operator& s,
                   double unitary_tol = Tolerances::defaults().unitary_tol_finite);

/// Positive trace-one operator. Gates Hermiticity, positivity and trace at
/// construction.
class DensityOperator {
public:
    explicit DensityOperator(Operator op,
                             const Tolerances& tols = Tolerances::defaults());

    Eigen::Index dim() const { return op_.dim(); }
    const Operator& op() const { return op_; }

private:
    Operator op_;
};

/// Hermitian operator with spectrum in [-psd_tol, 1 + psd_tol].
class Effect {
public:
    explicit Effect(Operator op, const Tolerances& tols = Tolerances::defaults());

    Eigen::Index dim() const { return op_.dim(); }
    const Operator& op() const { return op_; }

private:
    Operator op_;
};

// Shared interchange format: {"dim": n, "data": [[[re, im], ...], ...]},
// row-major.
nlohmann::json operator_to_json(const Operator& a);
Operator operator_from_json(const nlohmann::json& j);

} // namespace covquant
