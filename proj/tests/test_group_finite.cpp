#include <doctest.h>

#include "helpers.hpp"

using namespace covquant;
using namespace covquant::testing;

TEST_CASE("carrier construction and enumeration") {
    CHECK_THROWS(GroupCarrier::finite_torus(1));
    const GroupCarrier c = GroupCarrier::finite_torus(3);
    CHECK(c.size() == 9);
    CHECK(c.weight(0) == 1.0);
    CHECK(c.index_from_axis(1, 2) == 5); // index = a*N + b
    CHECK(c.identity() == 0);
    CHECK(c.inverse(c.index_from_axis(1, 2)) == c.index_from_axis(2, 1));
}

TEST_CASE("clock and shift generators at N=2") {
    const WeylSystem sys = WeylSystem::finite(2);
    const Matrix x = sys.weyl(sys.carrier().index_from_axis(1, 0)).matrix();
    const Matrix z = sys.weyl(sys.carrier().index_from_axis(0, 1)).matrix();

    Matrix x_expected(2, 2);
    x_expected << 0, 1, 1, 0;
    Matrix z_expected(2, 2);
    z_expected << 1, 0, 0, -1;
    CHECK(max_abs(x - x_expected) < 1e-15);
    CHECK(max_abs(z - z_expected) < 1e-15);
    CHECK(max_abs(sys.weyl(0).matrix() - Matrix::Identity(2, 2)) == 0.0);
}

TEST_CASE("every finite Weyl matrix is exactly unitary") {
    for (long n : {2L, 3L, 4L, 5L}) {
        const WeylSystem sys = WeylSystem::finite(n);
        for (std::size_t g = 0; g < sys.carrier().size(); ++g)
            CHECK(sys.unitarity_defect(g, 0) < 1e-14);
    }
}

TEST_CASE("conjugation by the shift permutes basis projections") {
    const WeylSystem sys = WeylSystem::finite(3);
    Matrix p0 = Matrix::Zero(3, 3);
    p0(0, 0) = 1.0;
    const Operator moved = sys.beta(sys.carrier().index_from_axis(1, 0), Operator(p0));
    Matrix p1 = Matrix::Zero(3, 3);
    p1(1, 1) = 1.0;
    CHECK(max_abs(moved.matrix() - p1) < 1e-14);
}

TEST_CASE("square integrability constant at N=2 by hand enumeration") {
    // terms |<0|W|0>|^2 over I, Z, X, XZ are 1, 1, 0, 0 in enumeration order
    const WeylSystem sys = WeylSystem::finite(2);
    const double value =
        check_square_integrability(sys, basis_projector(2, 0), basis_projector(2, 0));
    CHECK(std::abs(value - 2.0) < 1e-12);
}

TEST_CASE("square integrability equals N for all basis pairs and random pairs") {
    Rng rng(31);
    for (long n : {2L, 3L, 5L}) {
        const WeylSystem sys = WeylSystem::finite(n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                const double value = check_square_integrability(
                    sys, basis_projector(n, i), basis_projector(n, j));
                CHECK(std::abs(value - static_cast<double>(n)) < 1e-10);
            }
        // a random rank-one pair
        const Vector u = random_state(n, rng);
        const Vector v = random_state(n, rng);
        const Effect pu(Operator((u * u.adjoint()).eval()));
        const Effect pv(Operator((v * v.adjoint()).eval()));
        CHECK(std::abs(check_square_integrability(sys, pu, pv) -
                       static_cast<double>(n)) < 1e-10);
    }
}

TEST_CASE("square integrability rejects non rank-one inputs") {
    const WeylSystem sys = WeylSystem::finite(3);
    CHECK_THROWS_AS(check_square_integrability(sys, Effect(Operator::identity(3)),
                                               basis_projector(3, 0)),
                    NotRankOneProjection);
}

TEST_CASE("composition law with the symplectic phase, exhaustive at odd N") {
    for (long n : {3L, 5L}) {
        const WeylSystem sys = WeylSystem::finite(n);
        for (std::size_t x = 0; x < sys.carrier().size(); ++x)
            for (std::size_t y = 0; y < sys.carrier().size(); ++y)
                CHECK(composition_phase_residual(sys, x, y) < 1e-12);
    }
}

TEST_CASE("composition law is projective at even N") {
    for (long n : {2L, 4L}) {
        const WeylSystem sys = WeylSystem::finite(n);
        for (std::size_t x = 0; x < sys.carrier().size(); ++x)
            for (std::size_t y = 0; y < sys.carrier().size(); ++y)
                CHECK(composition_phase_residual(sys, x, y) < 1e-12);
    }
}

TEST_CASE("identity element composes trivially") {
    const WeylSystem sys = WeylSystem::finite(4);
    CHECK(composition_phase_residual(sys, 0, 0) < 1e-15);
}

TEST_CASE("beta is an exact homomorphism on the finite torus") {
    Rng rng(32);
    for (long n : {2L, 3L, 5L}) {
        const WeylSystem sys = WeylSystem::finite(n);
        const Operator s(random_matrix(n, rng));
        for (std::size_t x = 0; x < sys.carrier().size(); ++x)
            for (std::size_t y = 0; y < sys.carrier().size(); ++y) {
                const std::size_t sum = *sys.carrier().add(x, y);
                const Operator lhs = sys.beta(sum, s);
                const Operator rhs = sys.beta(x, sys.beta(y, s));
                CHECK(max_abs(lhs.matrix() - rhs.matrix()) < 1e-12);
            }
    }
}

TEST_CASE("beta properties: identity, trace, inverse, isometry") {
    Rng rng(33);
    const WeylSystem sys = WeylSystem::finite(4);
    for (std::size_t g = 0; g < sys.carrier().size(); ++g) {
        CHECK(max_abs(sys.beta(g, Operator::identity(4)).matrix() -
                      Matrix::Identity(4, 4)) < 1e-14);
        const Operator s(random_matrix(4, rng));
        CHECK(std::abs(trace(sys.beta(g, s)) - trace(s)) < 1e-12);
        const Operator back = sys.beta_dual(g, sys.beta(g, s));
        CHECK(max_abs(back.matrix() - s.matrix()) < 1e-10);

        Matrix gram = random_matrix(4, rng);
        const Operator pos(( gram * gram.adjoint()).eval());
        CHECK(std::abs(trace_norm(sys.beta(g, pos)) - trace_norm(pos)) < 1e-9);
        CHECK(is_positive(sys.beta(g, pos), 1e-10));
    }
}

TEST_CASE("weyl cache respects capacity and stays correct") {
    const WeylSystem sys = WeylSystem::finite(5);
    sys.set_cache_capacity(2);
    for (std::size_t g = 0; g < sys.carrier().size(); ++g) {
        const Operator cached = sys.weyl(g);
        const Operator fresh = make_weyl_matrix(sys.carrier(), 5, g);
        CHECK(max_abs(cached.matrix() - fresh.matrix()) == 0.0);
    }
    // repeated lookups after eviction still agree
    CHECK(max_abs(sys.weyl(3).matrix() -
                  make_weyl_matrix(sys.carrier(), 5, 3).matrix()) == 0.0);
}

TEST_CASE("weyl lookups are safe under concurrent access") {
    const WeylSystem sys = WeylSystem::finite(5);
    sys.set_cache_capacity(4);
    std::vector<double> defects(100, 1.0);
    detsum::for_each(
        defects.size(),
        [&](std::size_t i) {
            const std::size_t g = (i * 7) % sys.carrier().size();
            defects[i] = max_abs(sys.weyl(g).matrix() -
                                 make_weyl_matrix(sys.carrier(), 5, g).matrix());
        },
        true);
    for (double d : defects) CHECK(d == 0.0);
}

TEST_CASE("system descriptor round trip") {
    const WeylSystem sys = WeylSystem::finite(5);
    const nlohmann::json j = sys.descriptor();
    CHECK(j.at("kind") == "finite");
    CHECK(j.at("N") == 5);
    CHECK(j.at("d") == 5.0);
    const WeylSystem back = WeylSystem::from_descriptor(j);
    CHECK(back.carrier() == sys.carrier());
    CHECK(back.d_const() == sys.d_const());
}

TEST_CASE("off-grid lookups throw") {
    const WeylSystem sys = WeylSystem::finite(3);
    CHECK_THROWS_AS(sys.weyl(9), OffGridElement);
}
