#pragma once

#include <cstddef>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>

#include <json.hpp>

#include "covquant/detsum.hpp"
#include "covquant/operator_core.hpp"

namespace covquant {

/// Phase-space carrier: either Z_N x Z_N with counting measure, or the
/// square lattice {-L, -L+h, ..., L-h}^2 with weight h^2 per point
/// (Riemann approximation of the plane). Enumeration is row-major in the
/// first coordinate: index = a*N + b, resp. iq * n_axis + ip.
class GroupCarrier {
public:
    enum class Kind { FiniteTorus, PlanarGrid };

    static GroupCarrier finite_torus(long modulus);
    static GroupCarrier planar_grid(double half_extent, double step);

    Kind kind() const { return kind_; }
    bool is_planar() const { return kind_ == Kind::PlanarGrid; }

    long modulus() const { return modulus_; }
    double half_extent() const { return half_extent_; }
    double step() const { return step_; }

    std::size_t axis_size() const { return axis_size_; }
    std::size_t size() const { return axis_size_ * axis_size_; }
    double weight(std::size_t) const { return is_planar() ? step_ * step_ : 1.0; }
    /// Total measure of the carrier (window).
    double total_measure() const { return weight(0) * static_cast<double>(size()); }

    std::pair<long, long> axis_indices(std::size_t index) const;
    std::size_t index_from_axis(long i, long j) const;

    /// Planar coordinate of an axis index: (i - L/h) * h.
    double coord(long axis_index) const;
    /// Planar point (q, p) of a flat index.
    std::pair<double, double> planar_point(std::size_t index) const;

    /// Finite: reduce (a, b) mod N. Planar: throws OffGridElement when the
    /// point is not a lattice point of the window.
    std::size_t index_of_finite(long a, long b) const;
    std::size_t index_of_planar(double q, double p) const;

    /// Group addition of two carrier points. Finite: always defined. Planar:
    /// nullopt when the sum leaves the window.
    std::optional<std::size_t> add(std::size_t x, std::size_t y) const;
    /// Finite only: the inverse element -x.
    std::size_t inverse(std::size_t x) const;
    /// Index of the identity element.
    std::size_t identity() const;

    bool operator==(const GroupCarrier& o) const;
    bool operator!=(const GroupCarrier& o) const { return !(*this == o); }

    nlohmann::json to_json() const;
    static GroupCarrier from_json(const nlohmann::json& j);

private:
    GroupCarrier() = default;

    Kind kind_ = Kind::FiniteTorus;
    long modulus_ = 0;        // finite
    double half_extent_ = 0;  // planar
    double step_ = 0;         // planar
    long half_points_ = 0;    // planar: L/h
    std::size_t axis_size_ = 0;
};

/// Builds the Weyl matrix for one carrier point, with no caching. Pure and
/// thread safe; this is what the sweep kernels call.
///
/// Finite torus: W(a,b) = tau^{ab} X^a Z^b with X the cyclic shift,
/// Z = diag(omega^k), omega = exp(2 pi i / N), and tau = omega^{(N+1)/2}
/// for odd N (exact symplectic composition phase) or exp(i pi / N) for
/// even N (projective law only).
///
/// Planar grid: the Fock-basis displacement with amplitude
/// alpha = (-q + i p)/sqrt(2), entries from the closed Laguerre form
///   <m|W|n> = sqrt(n!/m!) alpha^{m-n} e^{-|alpha|^2/2} L_n^{(m-n)}(|alpha|^2)
/// for m >= n, and the adjoint-symmetric expression below the diagonal.
/// Entries equal those of the untruncated operator restricted to the block,
/// so every deviation from unitarity is attributable to the cutoff.
Operator make_weyl_matrix(const GroupCarrier& carrier, Eigen::Index fock_dim,
                          std::size_t index);

/// A concrete (G, beta, d): carrier, Weyl unitaries W(g), the conjugation
/// action beta_g = W(g) . W(g)^dag and the square-integrability constant d.
class WeylSystem {
public:
    /// Exact system on Z_N x Z_N; d = N.
    static WeylSystem finite(long modulus);
    /// Truncated continuous system, Fock dimension M on the window grid;
    /// d = 2 pi.
    static WeylSystem planar(Eigen::Index fock_dim, double half_extent, double step);

    const GroupCarrier& carrier() const { return carrier_; }
    Eigen::Index fock_dim() const { return fock_dim_; }
    double d_const() const { return d_const_; }
    bool is_planar() const { return carrier_.is_planar(); }

    /// W(g), served from a bounded LRU cache (thread safe).
    Operator weyl(std::size_t index) const;

    /// beta_g(S) = W(g) S W(g)^dag.
    Operator beta(std::size_t index, const Operator& s) const;
    /// beta_g^*(A) = W(g)^dag A W(g).
    Operator beta_dual(std::size_t index, const Operator& a) const;

    /// ||W^dag W - I||_max over the probe block (full matrix if probe_dim
    /// covers it). On truncated systems entries near the cutoff are
    /// meaningless, hence the restriction.
    double unitarity_defect(std::size_t index, int probe_dim) const;

    void set_cache_capacity(std::size_t entries) const;

    nlohmann::json descriptor() const;
    static WeylSystem from_descriptor(const nlohmann::json& j);

private:
    WeylSystem(GroupCarrier carrier, Eigen::Index fock_dim, double d_const);

    GroupCarrier carrier_;
    Eigen::Index fock_dim_ = 0;
    double d_const_ = 0;

    struct Cache {
        std::mutex mutex;
        std::size_t capacity = 1024;
        std::list<std::pair<std::size_t, std::shared_ptr<const Operator>>> order;
        std::unordered_map<std::size_t, decltype(order)::iterator> map;
    };
    mutable std::shared_ptr<Cache> cache_;
};

/// Sum_g w_g Tr[P1 beta_g(P2)] over the carrier; equals d exactly on the
/// finite torus and approximates it on the truncated grid. P1, P2 must be
/// rank-one projections (NotRankOneProjection).
double check_square_integrability(const WeylSystem& system, const Effect& p1,
                                  const Effect& p2,
                                  const Tolerances& tols = Tolerances::defaults(),
                                  bool parallel = detsum::parallel_default());

/// ||W(x) W(y) - c(x,y) W(x+y)|| with the convention phase c: the exact
/// symplectic phase tau^{a'b - ab'} for odd N, exp(i(q p' - p q')/2) on the
/// planar grid, and the trace-extracted scalar for even N (projective law;
/// ||c| - 1| is folded into the residual). Planar residuals are measured on
/// the probe block. Throws OffGridElement when x + y leaves the window.
double composition_phase_residual(const WeylSystem& system, std::size_t x,
                                  std::size_t y,
                                  const Tolerances& tols = Tolerances::defaults());

} // namespace covquant
