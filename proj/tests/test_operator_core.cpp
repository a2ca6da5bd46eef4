#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "helpers.hpp"

using namespace covquant;

TEST_CASE("trace on identity and rank-one projection") {
    CHECK(trace(Operator::identity(3)) == cx(3.0, 0.0));
    Matrix p = Matrix::Zero(2, 2);
    p(0, 0) = 1.0;
    CHECK(trace(Operator(p)) == cx(1.0, 0.0));
}

TEST_CASE("trace of a random Hermitian matrix equals its eigenvalue sum") {
    Rng rng(11);
    for (Eigen::Index dim : {2, 5, 17}) {
        Matrix g = random_matrix(dim, rng);
        Matrix h = 0.5 * (g + g.adjoint()).eval();
        // independent oracle: eigenvalue sum from Eigen's solver
        Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
        const double expected = es.eigenvalues().sum();
        CHECK(std::abs(trace(Operator(h)) - cx(expected)) < 1e-10);
    }
}

TEST_CASE("trace norm on diagonal and identity cases") {
    CHECK(trace_norm(Operator::identity(3)) == doctest::Approx(3.0).epsilon(1e-12));
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = -2.0;
    CHECK(trace_norm(Operator(d)) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("trace norm is unitarily invariant") {
    Rng rng(12);
    for (int rep = 0; rep < 5; ++rep) {
        const Eigen::Index dim = 6;
        Operator u = random_unitary(dim, rng);
        Operator s(random_matrix(dim, rng));
        const Operator rotated = conjugate(u, s);
        CHECK(std::abs(trace_norm(rotated) - trace_norm(s)) < 1e-10);
    }
}

TEST_CASE("positivity checks") {
    CHECK(is_positive(Operator::identity(4), 0.0));
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = -1e-6;
    CHECK_FALSE(is_positive(Operator(d), 1e-8));

    Rng rng(13);
    Matrix g = random_matrix(5, rng);
    CHECK(is_positive(Operator((g * g.adjoint()).eval()), 1e-10));
}

TEST_CASE("is_positive rejects non-Hermitian input") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    CHECK_THROWS_AS(is_positive(Operator(m), 1e-9), NonHermitianInput);
}

TEST_CASE("conjugation basics") {
    Rng rng(14);
    Operator s(random_matrix(4, rng));
    const Operator same = conjugate(Operator::identity(4), s);
    CHECK(max_abs(same.matrix() - s.matrix()) == 0.0);

    Operator u = random_unitary(4, rng);
    CHECK(std::abs(trace(conjugate(u, s)) - trace(s)) < 1e-12);

    Matrix notu = Matrix::Identity(4, 4) * 2.0;
    CHECK_THROWS_AS(conjugate(Operator(notu), s), NonUnitaryConjugator);
}

TEST_CASE("conjugation preserves positivity verdicts") {
    Rng rng(15);
    for (int rep = 0; rep < 4; ++rep) {
        Operator u = random_unitary(5, rng);
        Matrix g = random_matrix(5, rng);
        Matrix herm = 0.5 * (g + g.adjoint()).eval();
        const bool before = is_positive(Operator(herm), 1e-9);
        const bool after = is_positive(conjugate(u, Operator(herm)), 1e-9);
        CHECK(before == after);
    }
}

TEST_CASE("trace is cyclic and dominated by the trace norm") {
    Rng rng(16);
    for (Eigen::Index dim : {2, 16, 64}) {
        Matrix a = random_matrix(dim, rng);
        Matrix b = random_matrix(dim, rng);
        const cx ab = (a * b).trace();
        const cx ba = (b * a).trace();
        CHECK(std::abs(ab - ba) < 1e-10 * (1.0 + std::abs(ab)));

        Operator op(a);
        CHECK(trace_norm(op) >= std::abs(trace(op)) - 1e-10);
    }
}

TEST_CASE("density and effect gates") {
    Matrix ok = Matrix::Zero(2, 2);
    ok(0, 0) = 0.25;
    ok(1, 1) = 0.75;
    CHECK_NOTHROW(DensityOperator(Operator(ok)));

    Matrix off_trace = ok * 0.9;
    CHECK_THROWS(DensityOperator(Operator(off_trace)));

    Matrix neg = Matrix::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityOperator(Operator(neg)), NotPositive);

    CHECK_NOTHROW(Effect(Operator::identity(3)));
    Matrix big = Matrix::Identity(2, 2) * 1.5;
    CHECK_THROWS(Effect(Operator(big)));
}

TEST_CASE("operator construction rejects bad input") {
    CHECK_THROWS(Operator(Matrix::Zero(2, 3)));
    Matrix nan = Matrix::Zero(2, 2);
    nan(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS(Operator(nan));
}

TEST_CASE("operator JSON round trip is exact") {
    Rng rng(17);
    Operator a(random_matrix(5, rng));
    const Operator back = operator_from_json(
        nlohmann::json::parse(operator_to_json(a).dump()));
    CHECK(max_abs(back.matrix() - a.matrix()) == 0.0);
}
