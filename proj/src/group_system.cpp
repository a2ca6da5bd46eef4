#include "covquant/group_system.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace covquant {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

long positive_mod(long value, long modulus) {
    long r = value % modulus;
    return r < 0 ? r + modulus : r;
}

} // namespace

GroupCarrier GroupCarrier::finite_torus(long modulus) {
    if (modulus < 2) throw InvalidArgument("finite torus needs N >= 2");
    GroupCarrier c;
    c.kind_ = Kind::FiniteTorus;
    c.modulus_ = modulus;
    c.axis_size_ = static_cast<std::size_t>(modulus);
    return c;
}

GroupCarrier GroupCarrier::planar_grid(double half_extent, double step) {
    if (!(half_extent > 0.0) || !(step > 0.0))
        throw InvalidGrid("half extent and step must be positive");
    const double ratio = half_extent / step;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, std::abs(ratio)))
        throw InvalidGrid("half extent must be an integer multiple of the step");
    GroupCarrier c;
    c.kind_ = Kind::PlanarGrid;
    c.half_extent_ = half_extent;
    c.step_ = step;
    c.half_points_ = static_cast<long>(rounded);
    c.axis_size_ = static_cast<std::size_t>(2 * c.half_points_);
    return c;
}

std::pair<long, long> GroupCarrier::axis_indices(std::size_t index) const {
    if (index >= size()) throw OffGridElement("index out of range");
    const long n = static_cast<long>(axis_size_);
    return {static_cast<long>(index) / n, static_cast<long>(index) % n};
}

std::size_t GroupCarrier::index_from_axis(long i, long j) const {
    const long n = static_cast<long>(axis_size_);
    if (i < 0 || i >= n || j < 0 || j >= n)
        throw OffGridElement("axis index out of range");
    return static_cast<std::size_t>(i * n + j);
}

double GroupCarrier::coord(long axis_index) const {
    return static_cast<double>(axis_index - half_points_) * step_;
}

std::pair<double, double> GroupCarrier::planar_point(std::size_t index) const {
    auto [i, j] = axis_indices(index);
    return {coord(i), coord(j)};
}

std::size_t GroupCarrier::index_of_finite(long a, long b) const {
    if (!(kind_ == Kind::FiniteTorus)) throw InvalidArgument("carrier is not finite");
    return index_from_axis(positive_mod(a, modulus_), positive_mod(b, modulus_));
}

std::size_t GroupCarrier::index_of_planar(double q, double p) const {
    if (!is_planar()) throw InvalidArgument("carrier is not planar");
    auto locate = [&](double x) {
        const double ratio = x / step_ + static_cast<double>(half_points_);
        const double rounded = std::round(ratio);
        if (std::abs(ratio - rounded) > 1e-9)
            throw OffGridElement("coordinate not on the lattice");
        const long i = static_cast<long>(rounded);
        if (i < 0 || i >= static_cast<long>(axis_size_))
            throw OffGridElement("coordinate outside the window");
        return i;
    };
    return index_from_axis(locate(q), locate(p));
}

std::optional<std::size_t> GroupCarrier::add(std::size_t x, std::size_t y) const {
    auto [xa, xb] = axis_indices(x);
    auto [ya, yb] = axis_indices(y);
    if (kind_ == Kind::FiniteTorus)
        return index_from_axis(positive_mod(xa + ya, modulus_),
                               positive_mod(xb + yb, modulus_));
    const long i = xa + ya - half_points_;
    const long j = xb + yb - half_points_;
    if (i < 0 || i >= static_cast<long>(axis_size_) || j < 0 ||
        j >= static_cast<long>(axis_size_))
        return std::nullopt;
    return index_from_axis(i, j);
}

std::size_t GroupCarrier::inverse(std::size_t x) const {
    if (kind_ != Kind::FiniteTorus)
        throw InvalidArgument("inverse is only defined on the finite torus grid");
    auto [a, b] = axis_indices(x);
    return index_from_axis(positive_mod(-a, modulus_), positive_mod(-b, modulus_));
}

std::size_t GroupCarrier::identity() const {
    if (kind_ == Kind::FiniteTorus) return 0;
    return index_from_axis(half_points_, half_points_);
}

bool GroupCarrier::operator==(const GroupCarrier& o) const {
    if (kind_ != o.kind_) return false;
    if (kind_ == Kind::FiniteTorus) return modulus_ == o.modulus_;
    return half_extent_ == o.half_extent_ && step_ == o.step_;
}

nlohmann::json GroupCarrier::to_json() const {
    if (kind_ == Kind::FiniteTorus) return {{"kind", "finite"}, {"N", modulus_}};
    return {{"kind", "planar"}, {"L", half_extent_}, {"h", step_}};
}

GroupCarrier GroupCarrier::from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "finite") return finite_torus(j.at("N").get<long>());
    if (kind == "planar")
        return planar_grid(j.at("L").get<double>(), j.at("h").get<double>());
    throw IoError("unknown carrier kind \"" + kind + "\"");
}

namespace {

Operator make_finite_weyl(const GroupCarrier& carrier, std::size_t index) {
    const long n = carrier.modulus();
    auto [a, b] = carrier.axis_indices(index);

    // Shared root table keeps phases bit-identical across all W(a,b).
    std::vector<cx> roots(static_cast<std::size_t>(n));
    for (long r = 0; r < n; ++r)
        roots[static_cast<std::size_t>(r)] = std::polar(1.0, kTwoPi * r / n);

    cx tau_power;
    if (n % 2 == 1) {
        // tau = omega^{(N+1)/2}, an exact N-th root
        const long e = positive_mod(((n + 1) / 2) * a * b, n);
        tau_power = roots[static_cast<std::size_t>(e)];
    } else {
        // tau = exp(i pi / N), primitive 2N-th root
        const long e = positive_mod(a * b, 2 * n);
        tau_power = std::polar(1.0, std::numbers::pi * e / n);
    }

    Matrix w = Matrix::Zero(n, n);
    for (long k = 0; k < n; ++k) {
        const long row = positive_mod(k + a, n);
        const long e = positive_mod(b * k, n);
        w(row, k) = tau_power * roots[static_cast<std::size_t>(e)];
    }
    return Operator(std::move(w));
}

Operator make_planar_weyl(Eigen::Index fock_dim, double q, double p) {
    const Eigen::Index m = fock_dim;
    const cx alpha = cx(-q, p) / std::numbers::sqrt2;
    const double u = std::norm(alpha);
    if (u == 0.0) return Operator::identity(m);

    const double log_mod = 0.5 * std::log(u);
    const cx phase = alpha / std::abs(alpha);

    Matrix w(m, m);
    std::vector<double> lag(static_cast<std::size_t>(m));
    cx phase_pow_upper = 1.0;  // phase^k
    cx phase_pow_lower = 1.0;  // (-conj(phase))^k
    for (Eigen::Index k = 0; k < m; ++k) {
        // L_n^{(k)}(u) by the three-term recurrence in the degree n
        lag[0] = 1.0;
        if (m - k > 1) lag[1] = 1.0 + static_cast<double>(k) - u;
        for (Eigen::Index n = 1; n + 1 < m - k; ++n)
            lag[static_cast<std::size_t>(n + 1)] =
                ((static_cast<double>(2 * n + k + 1) - u) * lag[static_cast<std::size_t>(n)] -
                 static_cast<double>(n + k) * lag[static_cast<std::size_t>(n - 1)]) /
                static_cast<double>(n + 1);

        for (Eigen::Index n = 0; n + k < m; ++n) {
            const Eigen::Index row = n + k;
            const double lpre = 0.5 * (std::lgamma(static_cast<double>(n + 1)) -
                                       std::lgamma(static_cast<double>(row + 1))) +
                                static_cast<double>(k) * log_mod - 0.5 * u;
            const double mag = std::exp(lpre) * lag[static_cast<std::size_t>(n)];
            w(row, n) = mag * phase_pow_upper;
            w(n, row) = mag * phase_pow_lower;
        }
        phase_pow_upper *= phase;
        phase_pow_lower *= -std::conj(phase);
    }
    return Operator(std::move(w));
}

} // namespace

Operator make_weyl_matrix(const GroupCarrier& carrier, Eigen::Index fock_dim,
                          std::size_t index) {
    if (carrier.kind() == GroupCarrier::Kind::FiniteTorus)
        return make_finite_weyl(carrier, index);
    auto [q, p] = carrier.planar_point(index);
    return make_planar_weyl(fock_dim, q, p);
}

WeylSystem::WeylSystem(GroupCarrier carrier, Eigen::Index fock_dim, double d_const)
    : carrier_(std::move(carrier)), fock_dim_(fock_dim), d_const_(d_const),
      cache_(std::make_shared<Cache>()) {}

WeylSystem WeylSystem::finite(long modulus) {
    GroupCarrier carrier = GroupCarrier::finite_torus(modulus);
    return WeylSystem(std::move(carrier), modulus, static_cast<double>(modulus));
}

WeylSystem WeylSystem::planar(Eigen::Index fock_dim, double half_extent, double step) {
    if (fock_dim < 2) throw InvalidArgument("planar system needs fock dim >= 2");
    GroupCarrier carrier = GroupCarrier::planar_grid(half_extent, step);
    return WeylSystem(std::move(carrier), fock_dim, kTwoPi);
}

Operator WeylSystem::weyl(std::size_t index) const {
    if (index >= carrier_.size()) throw OffGridElement("index out of range");
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        auto it = cache_->map.find(index);
        if (it != cache_->map.end()) {
            cache_->order.splice(cache_->order.begin(), cache_->order, it->second);
            return *it->second->second;
        }
    }
    auto built = std::make_shared<const Operator>(
        make_weyl_matrix(carrier_, fock_dim_, index));
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        auto it = cache_->map.find(index);
        if (it == cache_->map.end()) {
            cache_->order.emplace_front(index, built);
            cache_->map[index] = cache_->order.begin();
            while (cache_->order.size() > cache_->capacity) {
                cache_->map.erase(cache_->order.back().first);
                cache_->order.pop_back();
            }
        }
    }
    return *built;
}

Operator WeylSystem::beta(std::size_t index, const Operator& s) const {
    if (s.dim() != fock_dim_) throw DimensionMismatch("operand dim vs fock dim");
    const Operator w = weyl(index);
    return Operator(w.matrix() * s.matrix() * w.matrix().adjoint());
}

Operator WeylSystem::beta_dual(std::size_t index, const Operator& a) const {
    if (a.dim() != fock_dim_) throw DimensionMismatch("operand dim vs fock dim");
    const Operator w = weyl(index);
    return Operator(w.matrix().adjoint() * a.matrix() * w.matrix());
}

double WeylSystem::unitarity_defect(std::size_t index, int probe_dim) const {
    const Operator w = weyl(index);
    const Matrix residual =
        w.matrix().adjoint() * w.matrix() - Matrix::Identity(fock_dim_, fock_dim_);
    if (!is_planar()) return max_abs(residual);
    return probe_block_max_abs(residual, probe_dim);
}

void WeylSystem::set_cache_capacity(std::size_t entries) const {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    cache_->capacity = entries == 0 ? 1 : entries;
    while (cache_->order.size() > cache_->capacity) {
        cache_->map.erase(cache_->order.back().first);
        cache_->order.pop_back();
    }
}

nlohmann::json WeylSystem::descriptor() const {
    if (!is_planar())
        return {{"kind", "finite"}, {"N", carrier_.modulus()}, {"d", d_const_}};
    return {{"kind", "planar"},
            {"M", fock_dim_},
            {"L", carrier_.half_extent()},
            {"h", carrier_.step()},
            {"d", d_const_}};
}

WeylSystem WeylSystem::from_descriptor(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "finite") return finite(j.at("N").get<long>());
    if (kind == "planar")
        return planar(j.at("M").get<Eigen::Index>(), j.at("L").get<double>(),
                      j.at("h").get<double>());
    throw IoError("unknown system kind \"" + kind + "\"");
}

namespace {

// Unit vector of a rank-one projection, gated by the spectrum.
Vector rank_one_vector(const Effect& p, const Tolerances& tols) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(p.op().matrix());
    const Eigen::VectorXd eigs = es.eigenvalues();
    const Eigen::Index top = p.dim() - 1;
    const double rank_tol = 100.0 * tols.psd_tol;
    if (std::abs(eigs[top] - 1.0) > rank_tol)
        throw NotRankOneProjection("top eigenvalue " + std::to_string(eigs[top]));
    for (Eigen::Index i = 0; i < top; ++i)
        if (std::abs(eigs[i]) > rank_tol)
            throw NotRankOneProjection("secondary eigenvalue " +
                                       std::to_string(eigs[i]));
    return es.eigenvectors().col(top);
}

} // namespace

double check_square_integrability(const WeylSystem& system, const Effect& p1,
                                  const Effect& p2, const Tolerances& tols,
                                  bool parallel) {
    if (p1.dim() != system.fock_dim() || p2.dim() != system.fock_dim())
        throw DimensionMismatch("projection dim vs fock dim");
    const Vector v1 = rank_one_vector(p1, tols);
    const Vector v2 = rank_one_vector(p2, tols);
    const GroupCarrier& carrier = system.carrier();
    const Eigen::Index m = system.fock_dim();
    return detsum::accumulate<double>(
        carrier.size(), 0.0,
        [&](double& acc, std::size_t g) {
            const Operator w = make_weyl_matrix(carrier, m, g);
            const cx amp = v1.dot(w.matrix() * v2); // Tr[P1 beta_g(P2)] = |<v1|W v2>|^2
            acc += carrier.weight(g) * std::norm(amp);
        },
        parallel);
}

double composition_phase_residual(const WeylSystem& system, std::size_t x,
                                  std::size_t y, const Tolerances& tols) {
    const GroupCarrier& carrier = system.carrier();
    const auto sum = carrier.add(x, y);
    if (!sum) throw OffGridElement("x + y leaves the window");

    const Matrix wx = system.weyl(x).matrix();
    const Matrix wy = system.weyl(y).matrix();
    const Matrix wxy = system.weyl(*sum).matrix();
    const Matrix product = wx * wy;

    cx phase;
    double phase_defect = 0.0;
    if (!carrier.is_planar() && carrier.modulus() % 2 == 1) {
        const long n = carrier.modulus();
        auto [a, b] = carrier.axis_indices(x);
        auto [ap, bp] = carrier.axis_indices(y);
        const long e = positive_mod(((n + 1) / 2) * (ap * b - a * bp), n);
        phase = std::polar(1.0, kTwoPi * e / n);
    } else if (!carrier.is_planar()) {
        // even N: projective law only; extract the scalar and check |c| = 1
        phase = (wxy.adjoint() * product).trace() / static_cast<double>(carrier.modulus());
        phase_defect = std::abs(std::abs(phase) - 1.0);
    } else {
        auto [q, p] = carrier.planar_point(x);
        auto [qp, pp] = carrier.planar_point(y);
        phase = std::polar(1.0, 0.5 * (q * pp - p * qp));
    }

    const Matrix residual = product - phase * wxy;
    const double norm = carrier.is_planar()
                            ? probe_block_max_abs(residual, tols.probe_dim)
                            : max_abs(residual);
    return std::max(norm, phase_defect);
}

} // namespace covquant
