#include "covquant/operator_core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace covquant {

Operator::Operator(Matrix m) : mat_(std::move(m)) {
    if (mat_.rows() == 0 || mat_.rows() != mat_.cols())
        throw InvalidArgument("operator must be square with dim >= 1");
    if (!mat_.allFinite())
        throw InvalidArgument("operator entries must be finite");
}

Operator Operator::identity(Eigen::Index dim) {
    return Operator(Matrix::Identity(dim, dim));
}

Operator Operator::zero(Eigen::Index dim) {
    return Operator(Matrix::Zero(dim, dim));
}

cx trace(const Operator& a) { return a.matrix().trace(); }

double trace_norm(const Operator& a) {
    Eigen::BDCSVD<Matrix> svd(a.matrix());
    return svd.singularValues().sum();
}

double hermiticity_defect(const Operator& a) {
    return max_abs(a.matrix() - a.matrix().adjoint());
}

double unitarity_defect(const Operator& u) {
    const Eigen::Index n = u.dim();
    return max_abs(u.matrix().adjoint() * u.matrix() - Matrix::Identity(n, n));
}

double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double probe_block_max_abs(const Matrix& m, int k) {
    const Eigen::Index b = std::min<Eigen::Index>(k, m.rows());
    if (b <= 0) return max_abs(m);
    return max_abs(m.topLeftCorner(b, b));
}

Operator hermitian_part(const Operator& a) {
    return Operator(0.5 * (a.matrix() + a.matrix().adjoint()));
}

Eigen::VectorXd hermitian_eigenvalues(const Operator& a, double herm_tol) {
    const double defect = hermiticity_defect(a);
    if (defect > herm_tol)
        throw NonHermitianInput("defect " + std::to_string(defect) + " exceeds tol " +
                                std::to_string(herm_tol));
    Matrix sym = 0.5 * (a.matrix() + a.matrix().adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

bool is_positive(const Operator& a, double tol, const Tolerances& tols) {
    Eigen::VectorXd eigs = hermitian_eigenvalues(a, tols.herm_tol);
    return eigs.minCoeff() >= -tol;
}

Operator conjugate(const Operator& u, const Operator& s, double unitary_tol) {
    if (u.dim() != s.dim())
        throw DimensionMismatch("conjugator dim " + std::to_string(u.dim()) +
                                " vs operand dim " + std::to_string(s.dim()));
    const double defect = unitarity_defect(u);
    if (defect > unitary_tol)
        throw NonUnitaryConjugator("defect " + std::to_string(defect) +
                                   " exceeds tol " + std::to_string(unitary_tol));
    return Operator(u.matrix() * s.matrix() * u.matrix().adjoint());
}

DensityOperator::DensityOperator(Operator op, const Tolerances& tols)
    : op_(std::move(op)) {
    Eigen::VectorXd eigs = hermitian_eigenvalues(op_, tols.herm_tol);
    if (eigs.minCoeff() < -tols.psd_tol)
        throw NotPositive("density min eigenvalue " + std::to_string(eigs.minCoeff()));
    const double tr = trace(op_).real();
    if (std::abs(tr - 1.0) > tols.trace_tol || std::abs(trace(op_).imag()) > tols.trace_tol)
        throw InvalidArgument("density trace " + std::to_string(tr) + " not within " +
                              std::to_string(tols.trace_tol) + " of 1");
}

Effect::Effect(Operator op, const Tolerances& tols) : op_(std::move(op)) {
    Eigen::VectorXd eigs = hermitian_eigenvalues(op_, tols.herm_tol);
    if (eigs.minCoeff() < -tols.psd_tol || eigs.maxCoeff() > 1.0 + tols.psd_tol)
        throw InvalidArgument("effect spectrum [" + std::to_string(eigs.minCoeff()) +
                              ", " + std::to_string(eigs.maxCoeff()) +
                              "] outside [0, 1] within tol");
}

nlohmann::json operator_to_json(const Operator& a) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < a.dim(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < a.dim(); ++j) {
            const cx z = a.matrix()(i, j);
            row.push_back({z.real(), z.imag()});
        }
        rows.push_back(std::move(row));
    }
    return {{"dim", a.dim()}, {"data", std::move(rows)}};
}

Operator operator_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("data"))
        throw IoError("operator JSON needs \"dim\" and \"data\"");
    const auto dim = j.at("dim").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (dim < 1 || !data.is_array() || static_cast<Eigen::Index>(data.size()) != dim)
        throw IoError("operator JSON row count does not match dim");
    Matrix m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const auto& row = data.at(static_cast<std::size_t>(i));
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim)
            throw IoError("operator JSON column count does not match dim");
        for (Eigen::Index k = 0; k < dim; ++k) {
            const auto& entry = row.at(static_cast<std::size_t>(k));
            if (!entry.is_array() || entry.size() != 2)
                throw IoError("operator JSON entries must be [re, im]");
            m(i, k) = cx(entry.at(0).get<double>(), entry.at(1).get<double>());
        }
    }
    return Operator(std::move(m));
}

} // namespace covquant
