#pragma once

#include <optional>
#include <vector>

#include "covquant/group_system.hpp"

namespace covquant {

/// Function on the group carrier, stored as one complex value per grid point
/// in enumeration order. Non-finite values are rejected at construction.
class ClassicalObservable {
public:
    ClassicalObservable(GroupCarrier carrier, Vector values,
                        std::optional<double> declared_sup = std::nullopt);

    static ClassicalObservable one(const GroupCarrier& carrier);
    static ClassicalObservable indicator(const GroupCarrier& carrier,
                                         const std::vector<std::size_t>& indices);
    /// Planar only: indicator of [q0, q1) x [p0, p1).
    static ClassicalObservable indicator_rect(const GroupCarrier& carrier,
                                              double q0, double q1, double p0,
                                              double p1);
    /// Planar only: sum of c * q^a p^b monomials.
    struct Monomial {
        int q_power = 0;
        int p_power = 0;
        cx coeff = 0.0;
    };
    static ClassicalObservable poly_qp(const GroupCarrier& carrier,
                                       const std::vector<Monomial>& monomials);
    static ClassicalObservable gauss_bump(const GroupCarrier& carrier,
                                          double center_q, double center_p,
                                          double width);

    const GroupCarrier& carrier() const { return carrier_; }
    const Vector& values() const { return values_; }
    cx value(std::size_t index) const { return values_[static_cast<Eigen::Index>(index)]; }
    std::optional<double> declared_sup() const { return declared_sup_; }

    double sup_norm() const;
    /// Sum_g w_g |f(g)|.
    double weighted_l1() const;

    /// g' -> f(g + g'). Finite: exact index arithmetic mod N. Planar: g must
    /// be a lattice vector and the mass of f dropped at the window edge must
    /// stay below mass_tol (TranslationLeavesGrid).
    ClassicalObservable translated(std::size_t g, double mass_tol) const;

    nlohmann::json to_json() const;
    static ClassicalObservable from_json(const nlohmann::json& j);

private:
    GroupCarrier carrier_;
    Vector values_;
    std::optional<double> declared_sup_;
};

/// Positive trace-one generator of the quantization map and the covariant
/// measurement.
struct QuantizationKernel {
    DensityOperator density;

    Eigen::Index dim() const { return density.dim(); }
    const Operator& op() const { return density.op(); }
};

/// The values of a covariant map on singleton indicators, one operator per
/// carrier point in enumeration order. Sealed at construction.
class MapTable {
public:
    MapTable(GroupCarrier carrier, std::vector<Operator> entries);

    const GroupCarrier& carrier() const { return carrier_; }
    const Operator& entry(std::size_t index) const { return entries_[index]; }
    std::size_t size() const { return entries_.size(); }

    nlohmann::json to_json() const;
    static MapTable from_json(const nlohmann::json& j);

private:
    GroupCarrier carrier_;
    std::vector<Operator> entries_;
};

/// Gamma(f) = d^-1 sum_g w_g f(g) beta_g(T). The g-sum runs in the fixed
/// deterministic reduction; the kernel enters through its positive spectral
/// factor, so Gamma(f) is a positive combination for f >= 0 by construction.
Operator quantize(const WeylSystem& system, const QuantizationKernel& kernel,
                  const ClassicalObservable& f,
                  bool parallel = detsum::parallel_default());

/// Husimi-type symbol g -> d^-1 Tr[S beta_g(T)].
ClassicalObservable dual_symbol(const WeylSystem& system,
                                const QuantizationKernel& kernel,
                                const Operator& s,
                                bool parallel = detsum::parallel_default());

/// |Tr[S quantize(f)] - sum_g w_g f(g) dual_symbol(S)(g)|; the two routes
/// share nothing past the Weyl matrices.
double duality_residual(const WeylSystem& system, const QuantizationKernel& kernel,
                        const ClassicalObservable& f, const Operator& s,
                        bool parallel = detsum::parallel_default());

/// lhs = d^-1 sum_g w_g Tr[A beta_g(S)], rhs = Tr[A] Tr[S], for positive
/// A and S (NotPositive otherwise).
std::pair<double, double> trace_identity_residual(
    const WeylSystem& system, const Operator& a, const Operator& s,
    const Tolerances& tols = Tolerances::defaults(),
    bool parallel = detsum::parallel_default());

/// ||beta_dual(g, quantize(f)) - quantize(g' -> f(g + g'))||_max.
double covariance_residual(const WeylSystem& system,
                           const QuantizationKernel& kernel,
                           const ClassicalObservable& f, std::size_t g,
                           const Tolerances& tols = Tolerances::defaults(),
                           bool parallel = detsum::parallel_default());

/// The map-table of the covariant map generated by a kernel:
/// table[g] = d^-1 w_g beta_g(T).
MapTable kernel_to_map_table(const WeylSystem& system,
                             const QuantizationKernel& kernel,
                             bool parallel = detsum::parallel_default());

struct RecoveryResult {
    QuantizationKernel kernel;
    double max_deviation = 0.0;
};

/// Reconstructs the generating kernel from a covariant map table. Per point,
/// the candidate s_g = (d / w_g) beta_dual(g, table[g]) must be constant for
/// a truly covariant input; the result is the trace-normalized Hermitian part
/// of the candidate mean, and max_deviation = max_g ||s_g - mean||_max is
/// always reported. Throws NotPositiveRecovered when the mean fails the
/// density gates.
RecoveryResult recover_kernel(const WeylSystem& system, const MapTable& table,
                              const Tolerances& tols = Tolerances::defaults(),
                              bool parallel = detsum::parallel_default());

struct NormalityReport {
    double max_residual = 0.0;
    std::vector<double> residuals; // one per sequence element
    std::optional<std::size_t> first_index_within_tol;
};

/// Probes weak-* continuity through the dual factorization
/// Tr[S Gamma(f_k)] = <Gamma_*(S), f_k> on a fixed set of states S
/// (low Fock projections plus one seeded random density). Residuals are
/// |<Gamma_*(S), f_k> - <Gamma_*(S), f>|, maximized over the probe set.
NormalityReport normality_surrogate_check(
    const WeylSystem& system, const QuantizationKernel& kernel,
    const std::vector<ClassicalObservable>& sequence,
    const ClassicalObservable& limit, double tol,
    const Tolerances& tols = Tolerances::defaults(),
    bool parallel = detsum::parallel_default());

} // namespace covquant
