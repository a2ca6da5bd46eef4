#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "covquant/povm.hpp"

namespace covquant {

struct CheckRecord {
    std::string id;
    std::string reference; // the identity being checked, spelled out
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Self-describing evidence: every record carries its residual and the
/// tolerance it was held to, and the environment block pins grid parameters,
/// tolerances and seeds.
class VerificationReport {
public:
    VerificationReport(std::string suite, nlohmann::json environment);

    void add(const std::string& id, const std::string& reference,
             double residual, double tolerance);
    /// For boolean outcomes: residual 0/1 against tolerance 0.5.
    void add_flag(const std::string& id, const std::string& reference, bool ok);

    const std::vector<CheckRecord>& checks() const { return checks_; }
    bool overall_pass() const;
    nlohmann::json to_json() const;
    /// One line per check plus a summary line.
    std::string format_text() const;

private:
    std::string suite_;
    nlohmann::json environment_;
    std::vector<CheckRecord> checks_;
};

/// Exact-identity suite on Z_N x Z_N with `kernel_count` seeded random
/// kernels: square-integrability constant, trace identity, unit preservation
/// and positivity, covariance (exhaustive in g), POVM normalization / cell
/// traces / covariance, kernel recovery round trip plus rejection of a
/// non-covariant table, and the trace-norm identity.
VerificationReport run_finite_exact_suite(long modulus, int kernel_count,
                                          std::uint64_t seed,
                                          const Tolerances& tols = Tolerances::defaults());

/// Quadrature suite on the truncated continuous system: square-integrability
/// constant at the given grid and tightening at the refined grid, the vacuum
/// symbol profile and mass, the quadratic-symbol diagonal (against the
/// refined-quadrature oracle grid), quasicontinuity, and the covariance
/// residual for a lattice shift of a Gaussian bump.
VerificationReport run_planar_quadrature_suite(
    Eigen::Index fock_dim, double half_extent, double step,
    const Tolerances& tols = Tolerances::defaults());

/// Sampling against analytic probabilities at 1e5 shots within 4-sigma
/// multinomial bands, plus bit-reproducibility per seed.
VerificationReport run_statistical_suite(std::uint64_t seed,
                                         const Tolerances& tols = Tolerances::defaults());

} // namespace covquant
