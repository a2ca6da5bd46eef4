#include <doctest.h>

#include "covquant/detsum.hpp"
#include "helpers.hpp"

using namespace covquant;

TEST_CASE("pairwise reduction matches a plain loop within rounding") {
    Rng rng(21);
    std::vector<double> terms(1000);
    double naive = 0.0;
    for (double& t : terms) {
        t = 2.0 * rng.u01() - 1.0;
        naive += t;
    }
    const double det = detsum::accumulate<double>(
        terms.size(), 0.0, [&](double& acc, std::size_t i) { acc += terms[i]; },
        false);
    CHECK(std::abs(det - naive) < 1e-12);
}

TEST_CASE("serial and parallel sweeps are bit identical") {
    Rng rng(22);
    const Eigen::Index dim = 12;
    std::vector<Matrix> terms;
    for (int i = 0; i < 300; ++i) terms.push_back(random_matrix(dim, rng));

    auto run = [&](bool parallel) {
        return detsum::accumulate<Matrix>(
            terms.size(), Matrix::Zero(dim, dim),
            [&](Matrix& acc, std::size_t i) { acc.noalias() += terms[i] * terms[i]; },
            parallel);
    };
    const Matrix serial = run(false);
    const Matrix parallel = run(true);
    CHECK((serial.array() == parallel.array()).all());
}

TEST_CASE("reduction structure is independent of leaf count edge cases") {
    for (std::size_t n : {0ul, 1ul, 63ul, 64ul, 65ul, 129ul}) {
        const double value = detsum::accumulate<double>(
            n, 0.0, [&](double& acc, std::size_t) { acc += 1.0; }, true);
        CHECK(value == static_cast<double>(n));
    }
}
