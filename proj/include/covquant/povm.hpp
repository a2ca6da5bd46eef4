#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "covquant/quantization.hpp"

namespace covquant {

/// Labeled partition of the carrier into disjoint cells covering every grid
/// index (checked exactly at construction).
class OutcomePartition {
public:
    struct Cell {
        std::string label;
        std::vector<std::size_t> indices;
    };

    OutcomePartition(GroupCarrier carrier, std::vector<Cell> cells);

    static OutcomePartition whole(const GroupCarrier& carrier);
    static OutcomePartition singletons(const GroupCarrier& carrier);
    /// Planar only: the four sign quadrants of the window.
    static OutcomePartition quadrants(const GroupCarrier& carrier);

    const GroupCarrier& carrier() const { return carrier_; }
    const std::vector<Cell>& cells() const { return cells_; }
    std::size_t cell_count() const { return cells_.size(); }
    /// lambda(B) = sum of weights over the cell.
    double cell_measure(std::size_t cell) const;

    nlohmann::json to_json() const;
    static OutcomePartition from_json(const GroupCarrier& carrier,
                                      const nlohmann::json& j);

private:
    GroupCarrier carrier_;
    std::vector<Cell> cells_;
};

/// Finite labeled family of effects over a partition of the carrier.
/// Normalization: on the finite torus sum_B E(B) = I is gated at 1e-10; on
/// the truncated grid the defect against I is a property of the window, so
/// it is computed on the probe block and stored, never hidden (accessors
/// below), but not gated.
class Povm {
public:
    Povm(OutcomePartition partition, std::vector<Effect> effects, double d_const,
         std::optional<QuantizationKernel> generator = std::nullopt,
         const Tolerances& tols = Tolerances::defaults());

    const OutcomePartition& partition() const { return partition_; }
    const std::vector<Effect>& effects() const { return effects_; }
    const Effect& effect(std::size_t cell) const { return effects_[cell]; }
    double d_const() const { return d_const_; }
    const std::optional<QuantizationKernel>& generator() const { return generator_; }

    /// ||sum_B E(B) - I||_max over the probe block.
    double normalization_defect_probe() const { return norm_defect_probe_; }
    /// Same residual over the full matrix.
    double normalization_defect_full() const { return norm_defect_full_; }

    nlohmann::json to_json() const;
    static Povm from_json(const nlohmann::json& j,
                          const Tolerances& tols = Tolerances::defaults());

private:
    OutcomePartition partition_;
    std::vector<Effect> effects_;
    double d_const_ = 0.0;
    std::optional<QuantizationKernel> generator_;
    double norm_defect_probe_ = 0.0;
    double norm_defect_full_ = 0.0;
};

/// E(B) = d^-1 sum_{g in B} w_g beta_g(T), one effect per cell.
Povm build_povm(const WeylSystem& system, const QuantizationKernel& kernel,
                const OutcomePartition& partition,
                const Tolerances& tols = Tolerances::defaults(),
                bool parallel = detsum::parallel_default());

/// max_B |Tr[E(B)] - d^-1 lambda(B)|.
double cell_trace_residual(const Povm& povm);

/// p(B) = Tr[rho E(B)], tiny negatives (>= -1e-12) clipped to zero.
std::vector<double> probabilities(const Povm& povm, const DensityOperator& rho);

/// Multinomial counts for `shots` draws from probabilities(povm, rho),
/// inverse-CDF over cells in label order, mt19937_64 stream; identical
/// output for identical (seed, shots) on every platform.
std::vector<std::int64_t> sample(const Povm& povm, const DensityOperator& rho,
                                 std::int64_t shots, std::uint64_t seed);

std::string counts_to_csv(const Povm& povm, const std::vector<std::int64_t>& counts);

/// Pointwise density of the complex measure B -> <psi|E(B) phi> with respect
/// to the carrier measure: g -> d^-1 <psi|beta_g(T) phi>.
class ComplexMeasureTable {
public:
    ComplexMeasureTable(GroupCarrier carrier, Vector density);

    const GroupCarrier& carrier() const { return carrier_; }
    const Vector& density() const { return density_; }
    cx integrate_cell(const OutcomePartition& partition, std::size_t cell) const;

private:
    GroupCarrier carrier_;
    Vector density_;
};

ComplexMeasureTable complex_measure_density(const WeylSystem& system,
                                            const QuantizationKernel& kernel,
                                            const Vector& psi, const Vector& phi,
                                            bool parallel = detsum::parallel_default());

struct DomainVerdict {
    bool in_domain = false;
    /// Partial sums per probe vector, one row per sweep window.
    std::vector<std::vector<double>> partial_sums;
    std::vector<double> window_extents;
};

/// Truncation-sweep integrability probe: evaluates
/// I_k = sum_{|q|,|p| <= L_k} w_g |f(g)| |density_{psi,phi}(g)| over growing
/// windows for a fixed probe set of psi (low Fock basis plus phi itself).
/// Verdict "in-domain" when the last two levels are Cauchy within dom_tol for
/// every probe; "undetermined" otherwise - divergence is never claimed.
/// f must live on a grid covering the largest window. Finite carriers are
/// always in-domain.
DomainVerdict domain_check(const WeylSystem& system, const QuantizationKernel& kernel,
                           const ClassicalObservable& f, const Vector& phi,
                           const std::vector<double>& sweep_extents,
                           const Tolerances& tols = Tolerances::defaults(),
                           bool parallel = detsum::parallel_default());

/// <psi|L(f, E)|phi> = sum_g w_g f(g) density_{psi,phi}(g), gated by
/// domain_check (NotInDomain when the sweeps fail to settle).
cx operator_integral(const WeylSystem& system, const QuantizationKernel& kernel,
                     const ClassicalObservable& f, const Vector& psi,
                     const Vector& phi,
                     const Tolerances& tols = Tolerances::defaults(),
                     bool parallel = detsum::parallel_default());

/// Same, against a precomputed density table (no domain gate; the caller
/// owns the sweep evidence).
cx operator_integral(const ComplexMeasureTable& table, const ClassicalObservable& f,
                     bool parallel = detsum::parallel_default());

/// Same, through the POVM's generator kernel (InvalidArgument when absent).
cx operator_integral(const Povm& povm, const WeylSystem& system,
                     const ClassicalObservable& f, const Vector& psi,
                     const Vector& phi,
                     const Tolerances& tols = Tolerances::defaults(),
                     bool parallel = detsum::parallel_default());

/// Batched matrix elements sharing one sweep (and one domain gate).
std::vector<cx> operator_integral_batch(
    const WeylSystem& system, const QuantizationKernel& kernel,
    const ClassicalObservable& f,
    const std::vector<std::pair<Vector, Vector>>& pairs,
    const Tolerances& tols = Tolerances::defaults(),
    bool parallel = detsum::parallel_default());

struct QuasicontinuityReport {
    double final_residual = 0.0;
    std::vector<double> residuals;
    bool nonincreasing = false;
};

/// For an increasing positive sequence f_n -> f (validated pointwise;
/// NotMonotone otherwise), reports |L(f_n) - L(f)| matrix elements at
/// (psi, phi). phi must pass the domain gate for f.
QuasicontinuityReport quasicontinuity_check(
    const WeylSystem& system, const QuantizationKernel& kernel,
    const std::vector<ClassicalObservable>& sequence,
    const ClassicalObservable& limit, const Vector& psi, const Vector& phi,
    const Tolerances& tols = Tolerances::defaults(),
    bool parallel = detsum::parallel_default());

} // namespace covquant
