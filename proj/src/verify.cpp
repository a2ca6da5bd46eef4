#include "covquant/verify.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "covquant/random.hpp"

namespace covquant {

VerificationReport::VerificationReport(std::string suite, nlohmann::json environment)
    : suite_(std::move(suite)), environment_(std::move(environment)) {}

void VerificationReport::add(const std::string& id, const std::string& reference,
                             double residual, double tolerance) {
    if (!std::isfinite(residual) || residual < 0.0)
        residual = std::numeric_limits<double>::infinity();
    checks_.push_back({id, reference, residual, tolerance, residual <= tolerance});
}

void VerificationReport::add_flag(const std::string& id, const std::string& reference,
                                  bool ok) {
    checks_.push_back({id, reference, ok ? 0.0 : 1.0, 0.5, ok});
}

bool VerificationReport::overall_pass() const {
    for (const CheckRecord& c : checks_)
        if (!c.pass) return false;
    return true;
}

nlohmann::json VerificationReport::to_json() const {
    nlohmann::json checks = nlohmann::json::array();
    for (const CheckRecord& c : checks_)
        checks.push_back({{"id", c.id},
                          {"reference", c.reference},
                          {"residual", c.residual},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass}});
    return {{"suite", suite_},
            {"environment", environment_},
            {"checks", std::move(checks)},
            {"pass", overall_pass()}};
}

std::string VerificationReport::format_text() const {
    std::ostringstream out;
    for (const CheckRecord& c : checks_) {
        out << (c.pass ? "[PASS] " : "[FAIL] ") << suite_ << ": " << c.id
            << " (residual " << c.residual << ", tol " << c.tolerance << ") - "
            << c.reference << "\n";
    }
    out << (overall_pass() ? "[PASS] " : "[FAIL] ") << suite_ << ": overall\n";
    return out.str();
}

namespace {

QuantizationKernel vacuum_kernel(Eigen::Index dim, const Tolerances& tols) {
    Matrix t = Matrix::Zero(dim, dim);
    t(0, 0) = 1.0;
    return QuantizationKernel{DensityOperator(Operator(std::move(t)), tols)};
}

Effect basis_projector(Eigen::Index dim, Eigen::Index k, const Tolerances& tols) {
    Matrix p = Matrix::Zero(dim, dim);
    p(k, k) = 1.0;
    return Effect(Operator(std::move(p)), tols);
}

ClassicalObservable random_nonnegative(const GroupCarrier& carrier, Rng& rng) {
    Vector v(static_cast<Eigen::Index>(carrier.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.u01();
    return ClassicalObservable(carrier, std::move(v), 1.0);
}

ClassicalObservable random_complex_function(const GroupCarrier& carrier, Rng& rng) {
    Vector v(static_cast<Eigen::Index>(carrier.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v[i] = cx(2.0 * rng.u01() - 1.0, 2.0 * rng.u01() - 1.0);
    return ClassicalObservable(carrier, std::move(v));
}

} // namespace

VerificationReport run_finite_exact_suite(long modulus, int kernel_count,
                                          std::uint64_t seed, const Tolerances& tols) {
    const WeylSystem system = WeylSystem::finite(modulus);
    const GroupCarrier& carrier = system.carrier();
    const Eigen::Index dim = system.fock_dim();
    const std::size_t points = carrier.size();

    VerificationReport report(
        "finite-exact",
        {{"N", modulus}, {"kernel_count", kernel_count}, {"seed", seed},
         {"tolerances", tols.to_json()}});

    Rng rng(seed);
    std::vector<QuantizationKernel> kernels;
    for (int k = 0; k < kernel_count; ++k)
        kernels.push_back(QuantizationKernel{random_density(dim, rng, tols)});

    // square-integrability constant over every basis projection pair
    double worst = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) {
            const double value = check_square_integrability(
                system, basis_projector(dim, i, tols), basis_projector(dim, j, tols),
                tols);
            worst = std::max(worst, std::abs(value - system.d_const()));
        }
    report.add("square-integrability", "sum_g w_g Tr[P1 beta_g(P2)] = d", worst,
               1e-10);

    // trace identity on random positive pairs
    worst = 0.0;
    for (int k = 0; k < kernel_count; ++k) {
        const Operator a = random_density(dim, rng, tols).op();
        const Operator s = random_density(dim, rng, tols).op();
        const auto [lhs, rhs] = trace_identity_residual(system, a, s, tols);
        worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + rhs));
    }
    report.add("trace-identity", "d^-1 sum_g w_g Tr[A beta_g(S)] = Tr[A] Tr[S]",
               worst, 1e-10);

    // unit preservation and positivity
    double worst_unit = 0.0;
    bool positive_ok = true;
    const ClassicalObservable unit = ClassicalObservable::one(carrier);
    for (const QuantizationKernel& kernel : kernels) {
        const Operator gamma_one = quantize(system, kernel, unit);
        worst_unit = std::max(
            worst_unit, max_abs(gamma_one.matrix() -
                                Matrix::Identity(dim, dim)));
        const ClassicalObservable f = random_nonnegative(carrier, rng);
        positive_ok = positive_ok && is_positive(quantize(system, kernel, f), 1e-9, tols);
    }
    report.add("unit-preservation", "Gamma(g -> 1) = I", worst_unit, 1e-12);
    report.add_flag("positivity", "Gamma(f) >= 0 for f >= 0", positive_ok);

    // covariance, exhaustive over the group
    worst = 0.0;
    for (const QuantizationKernel& kernel : kernels) {
        const ClassicalObservable f = random_complex_function(carrier, rng);
        for (std::size_t g = 0; g < points; ++g)
            worst = std::max(worst, covariance_residual(system, kernel, f, g, tols));
    }
    report.add("covariance", "beta_g^*(Gamma(f)) = Gamma(f(g + .))", worst, 1e-12);

    // POVM normalization, cell traces, covariance
    const OutcomePartition singles = OutcomePartition::singletons(carrier);
    double worst_norm = 0.0, worst_cell = 0.0, worst_cov = 0.0;
    for (const QuantizationKernel& kernel : kernels) {
        const Povm povm = build_povm(system, kernel, singles, tols);
        worst_norm = std::max(worst_norm, povm.normalization_defect_full());
        worst_cell = std::max(worst_cell, cell_trace_residual(povm));
        for (std::size_t g = 0; g < points; ++g)
            for (std::size_t b = 0; b < points; ++b) {
                const std::size_t shifted = *carrier.add(b, carrier.inverse(g));
                const Operator lhs = system.beta_dual(g, povm.effect(b).op());
                worst_cov = std::max(
                    worst_cov,
                    max_abs(lhs.matrix() - povm.effect(shifted).op().matrix()));
            }
    }
    report.add("povm-normalization", "sum_B E(B) = I", worst_norm, 1e-10);
    report.add("povm-cell-trace", "Tr[E(B)] = d^-1 lambda(B)", worst_cell, 1e-10);
    report.add("povm-covariance", "beta_g^*(E(B)) = E(B - g)", worst_cov, 1e-12);

    // kernel recovery round trip, plus rejection of a non-covariant table
    double worst_rec = 0.0, worst_dev = 0.0;
    for (const QuantizationKernel& kernel : kernels) {
        const MapTable table = kernel_to_map_table(system, kernel);
        const RecoveryResult rec = recover_kernel(system, table, tols);
        worst_rec = std::max(worst_rec, max_abs(rec.kernel.op().matrix() -
                                                kernel.op().matrix()));
        worst_dev = std::max(worst_dev, rec.max_deviation);
    }
    report.add("recovery-round-trip", "recovered kernel matches the generator",
               worst_rec, 1e-9);
    report.add("recovery-deviation", "candidate spread for covariant tables",
               worst_dev, 1e-10);

    bool rejected = false;
    {
        Matrix c = Matrix::Zero(dim, dim);
        c(0, 0) = 1.0;
        std::vector<Operator> entries(points, Operator(c));
        const MapTable constant_table(carrier, std::move(entries));
        try {
            const RecoveryResult rec = recover_kernel(system, constant_table, tols);
            rejected = rec.max_deviation > 1e-6;
        } catch (const NotPositiveRecovered&) {
            rejected = true;
        }
    }
    report.add_flag("recovery-rejects-non-covariant",
                    "constant table must not round-trip silently", rejected);

    // trace-norm identity for nonnegative summable functions
    worst = 0.0;
    for (const QuantizationKernel& kernel : kernels) {
        const ClassicalObservable f = random_nonnegative(carrier, rng);
        const double lhs = trace_norm(quantize(system, kernel, f));
        const double rhs = f.weighted_l1() / system.d_const();
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    report.add("trace-norm-identity", "||Gamma(f)||_tr = d^-1 ||f||_1 for f >= 0",
               worst, 1e-10);

    return report;
}

VerificationReport run_planar_quadrature_suite(Eigen::Index fock_dim,
                                               double half_extent, double step,
                                               const Tolerances& tols) {
    const double two_pi = 2.0 * std::numbers::pi;
    VerificationReport report(
        "planar-quadrature",
        {{"M", fock_dim}, {"L", half_extent}, {"h", step},
         {"tolerances", tols.to_json()}});

    const WeylSystem system = WeylSystem::planar(fock_dim, half_extent, step);
    const GroupCarrier& carrier = system.carrier();
    const QuantizationKernel kernel = vacuum_kernel(fock_dim, tols);
    const Effect vac = basis_projector(fock_dim, 0, tols);

    // square-integrability constant at this grid, then at the refined grid
    const double si_default = check_square_integrability(system, vac, vac, tols);
    report.add("square-integrability", "sum_g w_g |<0|W(g)|0>|^2 = 2 pi",
               std::abs(si_default - two_pi) / two_pi, 1e-3);
    {
        const WeylSystem refined = WeylSystem::planar(60, 8.0, 0.05);
        const Effect vac60 = basis_projector(60, 0, tols);
        const double si_refined = check_square_integrability(refined, vac60, vac60, tols);
        report.add("square-integrability-refined",
                   "refinement tightens the constant",
                   std::abs(si_refined - two_pi), std::abs(si_default - two_pi));
    }

    // vacuum symbol: origin value and total mass
    {
        const ClassicalObservable symbol =
            dual_symbol(system, kernel, kernel.op());
        const cx origin = symbol.value(carrier.identity());
        report.add("vacuum-symbol-origin", "symbol at the origin = (2 pi)^-1",
                   std::abs(origin - cx(1.0 / two_pi)), 1e-6);
        cx mass = 0.0;
        for (std::size_t g = 0; g < carrier.size(); ++g)
            mass += carrier.weight(g) * symbol.value(g);
        report.add("vacuum-symbol-mass", "sum_g w_g symbol(g) = Tr[S] = 1",
                   std::abs(mass - cx(1.0)), 1e-3);
    }

    // quadratic symbol diagonal against the refined-quadrature oracle grid:
    // <n| of the quantized (q^2+p^2)/2 must sit at n+1
    {
        const WeylSystem refined = WeylSystem::planar(80, 8.0, 0.05);
        const QuantizationKernel vac80 = vacuum_kernel(80, tols);
        const ClassicalObservable f = ClassicalObservable::poly_qp(
            refined.carrier(), {{2, 0, 0.5}, {0, 2, 0.5}});
        std::vector<std::pair<Vector, Vector>> pairs;
        for (Eigen::Index n = 0; n <= 10; ++n) {
            Vector e = Vector::Zero(80);
            e[n] = 1.0;
            pairs.emplace_back(e, e);
        }
        const std::vector<cx> diag =
            operator_integral_batch(refined, vac80, f, pairs, tols);
        double worst = 0.0;
        for (Eigen::Index n = 0; n <= 10; ++n)
            worst = std::max(worst,
                             std::abs(diag[static_cast<std::size_t>(n)] -
                                      cx(static_cast<double>(n + 1))));
        report.add("quadratic-diagonal",
                   "<n|Gamma((q^2+p^2)/2)|n> = n + 1 for n <= 10", worst, 5e-3);
    }

    // quasicontinuity along f_c = min(f, c)
    {
        const ClassicalObservable f =
            ClassicalObservable::poly_qp(carrier, {{2, 0, 0.5}, {0, 2, 0.5}});
        std::vector<ClassicalObservable> sequence;
        for (int c = 1; c <= 50; ++c) {
            Vector v = f.values();
            for (Eigen::Index i = 0; i < v.size(); ++i)
                v[i] = std::min(v[i].real(), static_cast<double>(c));
            sequence.emplace_back(carrier, std::move(v));
        }
        Vector ground = Vector::Zero(fock_dim);
        ground[0] = 1.0;
        const QuasicontinuityReport qc =
            quasicontinuity_check(system, kernel, sequence, f, ground, ground, tols);
        report.add("quasicontinuity",
                   "matrix elements of L(min(f, c)) converge to L(f)",
                   qc.final_residual, 1e-6);
        report.add_flag("quasicontinuity-monotone",
                        "residuals decrease along the sequence", qc.nonincreasing);
    }

    // covariance under a lattice shift of a Gaussian bump
    {
        const ClassicalObservable bump =
            ClassicalObservable::gauss_bump(carrier, 0.0, 0.0, 1.0);
        const std::size_t shift = carrier.index_of_planar(0.5, 0.0);
        report.add("covariance-lattice-shift",
                   "beta_g^*(Gamma(f)) = Gamma(f(g + .)) for g = (0.5, 0)",
                   covariance_residual(system, kernel, bump, shift, tols), 1e-4);
    }

    return report;
}

VerificationReport run_statistical_suite(std::uint64_t seed, const Tolerances& tols) {
    VerificationReport report("statistical",
                              {{"seed", seed}, {"shots", 100000},
                               {"tolerances", tols.to_json()}});
    const std::int64_t shots = 100000;

    // finite N=2, vacuum kernel, singleton outcomes; analytic probabilities
    // are 1/2, 1/2, 0, 0 in enumeration order
    {
        const WeylSystem system = WeylSystem::finite(2);
        const QuantizationKernel kernel = vacuum_kernel(2, tols);
        const Povm povm = build_povm(
            system, kernel, OutcomePartition::singletons(system.carrier()), tols);
        const DensityOperator rho = kernel.density;
        const std::vector<double> expected{0.5, 0.5, 0.0, 0.0};
        const std::vector<double> p = probabilities(povm, rho);
        double worst = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i)
            worst = std::max(worst, std::abs(p[i] - expected[i]));
        report.add("finite-probabilities", "Tr[rho E(g)] by hand enumeration",
                   worst, 1e-12);

        const auto counts = sample(povm, rho, shots, seed);
        bool in_band = true;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            const double mean = static_cast<double>(shots) * expected[i];
            const double sigma =
                std::sqrt(static_cast<double>(shots) * expected[i] * (1.0 - expected[i]));
            if (sigma == 0.0)
                in_band = in_band && counts[i] == static_cast<std::int64_t>(mean);
            else
                in_band = in_band && std::abs(static_cast<double>(counts[i]) - mean) <=
                                         4.0 * sigma;
        }
        report.add_flag("finite-sampling-band",
                        "counts within 4 sigma of the multinomial mean", in_band);
        report.add_flag("finite-sampling-deterministic",
                        "same seed reproduces identical counts",
                        counts == sample(povm, rho, shots, seed));
    }

    // planar quadrants at the default grid, vacuum state
    {
        const WeylSystem system = WeylSystem::planar(40, 6.0, 0.1);
        const QuantizationKernel kernel = vacuum_kernel(40, tols);
        const Povm povm = build_povm(
            system, kernel, OutcomePartition::quadrants(system.carrier()), tols);
        const DensityOperator rho = kernel.density;
        const std::vector<double> p = probabilities(povm, rho);
        double sum = 0.0, worst_quarter = 0.0;
        for (double v : p) {
            sum += v;
            worst_quarter = std::max(worst_quarter, std::abs(v - 0.25));
        }
        report.add("planar-quadrant-sum", "outcome probabilities sum to 1",
                   std::abs(sum - 1.0), 1e-3);
        report.add("planar-quadrant-balance",
                   "quadrant probabilities near 1/4 (grid is half-open)",
                   worst_quarter, 0.025);

        const auto counts = sample(povm, rho, shots, seed + 1);
        bool in_band = true;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            const double mean = static_cast<double>(shots) * p[i];
            const double sigma =
                std::sqrt(static_cast<double>(shots) * p[i] * (1.0 - p[i]));
            in_band = in_band && std::abs(static_cast<double>(counts[i]) - mean) <=
                                     4.0 * sigma;
        }
        report.add_flag("planar-sampling-band",
                        "counts within 4 sigma of the multinomial mean", in_band);
    }

    return report;
}

} // namespace covquant
