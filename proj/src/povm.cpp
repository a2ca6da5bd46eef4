#include "covquant/povm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "covquant/random.hpp"
#include "spectral.hpp"

namespace covquant {

OutcomePartition::OutcomePartition(GroupCarrier carrier, std::vector<Cell> cells)
    : carrier_(std::move(carrier)), cells_(std::move(cells)) {
    if (cells_.empty()) throw InvalidArgument("partition needs at least one cell");
    std::vector<char> seen(carrier_.size(), 0);
    for (const Cell& cell : cells_) {
        for (std::size_t g : cell.indices) {
            if (g >= carrier_.size())
                throw OffGridElement("cell index out of range");
            if (seen[g])
                throw InvalidArgument("cells overlap at index " + std::to_string(g));
            seen[g] = 1;
        }
    }
    for (std::size_t g = 0; g < carrier_.size(); ++g)
        if (!seen[g])
            throw InvalidArgument("cells do not cover index " + std::to_string(g));
}

OutcomePartition OutcomePartition::whole(const GroupCarrier& carrier) {
    Cell cell;
    cell.label = "G";
    cell.indices.resize(carrier.size());
    for (std::size_t g = 0; g < carrier.size(); ++g) cell.indices[g] = g;
    return OutcomePartition(carrier, {std::move(cell)});
}

OutcomePartition OutcomePartition::singletons(const GroupCarrier& carrier) {
    std::vector<Cell> cells(carrier.size());
    for (std::size_t g = 0; g < carrier.size(); ++g) {
        std::ostringstream label;
        if (carrier.is_planar()) {
            auto [q, p] = carrier.planar_point(g);
            label << "(" << q << "," << p << ")";
        } else {
            auto [a, b] = carrier.axis_indices(g);
            label << "(" << a << "," << b << ")";
        }
        cells[g].label = label.str();
        cells[g].indices = {g};
    }
    return OutcomePartition(carrier, std::move(cells));
}

OutcomePartition OutcomePartition::quadrants(const GroupCarrier& carrier) {
    if (!carrier.is_planar())
        throw InvalidArgument("quadrant partition needs a planar carrier");
    std::vector<Cell> cells(4);
    cells[0].label = "q+p+";
    cells[1].label = "q+p-";
    cells[2].label = "q-p+";
    cells[3].label = "q-p-";
    for (std::size_t g = 0; g < carrier.size(); ++g) {
        auto [q, p] = carrier.planar_point(g);
        const std::size_t cell = (q >= 0.0 ? 0 : 2) + (p >= 0.0 ? 0 : 1);
        cells[cell].indices.push_back(g);
    }
    return OutcomePartition(carrier, std::move(cells));
}

double OutcomePartition::cell_measure(std::size_t cell) const {
    return carrier_.weight(0) * static_cast<double>(cells_.at(cell).indices.size());
}

nlohmann::json OutcomePartition::to_json() const {
    nlohmann::json cells = nlohmann::json::array();
    for (const Cell& cell : cells_)
        cells.push_back({{"label", cell.label}, {"indices", cell.indices}});
    return {{"cells", std::move(cells)}};
}

OutcomePartition OutcomePartition::from_json(const GroupCarrier& carrier,
                                             const nlohmann::json& j) {
    std::vector<Cell> cells;
    for (const auto& c : j.at("cells")) {
        Cell cell;
        cell.label = c.at("label").get<std::string>();
        cell.indices = c.at("indices").get<std::vector<std::size_t>>();
        cells.push_back(std::move(cell));
    }
    return OutcomePartition(carrier, std::move(cells));
}

Povm::Povm(OutcomePartition partition, std::vector<Effect> effects, double d_const,
           std::optional<QuantizationKernel> generator, const Tolerances& tols)
    : partition_(std::move(partition)), effects_(std::move(effects)),
      d_const_(d_const), generator_(std::move(generator)) {
    if (effects_.size() != partition_.cell_count())
        throw InvalidArgument("one effect per cell required");
    if (!(d_const_ > 0.0)) throw InvalidArgument("d must be positive");
    const Eigen::Index m = effects_.front().dim();
    Matrix sum = Matrix::Zero(m, m);
    for (const Effect& e : effects_) {
        if (e.dim() != m) throw DimensionMismatch("effects of mixed dimension");
        sum += e.op().matrix();
    }
    const Matrix defect = sum - Matrix::Identity(m, m);
    norm_defect_full_ = max_abs(defect);
    norm_defect_probe_ = probe_block_max_abs(defect, tols.probe_dim);
    if (!partition_.carrier().is_planar() &&
        norm_defect_full_ > tols.povm_norm_tol_finite)
        throw InvalidArgument("effects sum to I only within " +
                              std::to_string(norm_defect_full_));
}

nlohmann::json Povm::to_json() const {
    nlohmann::json effects = nlohmann::json::array();
    for (const Effect& e : effects_) effects.push_back(operator_to_json(e.op()));
    nlohmann::json j{{"carrier", partition_.carrier().to_json()},
                     {"partition", partition_.to_json()},
                     {"effects", std::move(effects)},
                     {"d", d_const_}};
    if (generator_) j["generator"] = operator_to_json(generator_->op());
    return j;
}

Povm Povm::from_json(const nlohmann::json& j, const Tolerances& tols) {
    GroupCarrier carrier = GroupCarrier::from_json(j.at("carrier"));
    OutcomePartition partition = OutcomePartition::from_json(carrier, j.at("partition"));
    std::vector<Effect> effects;
    for (const auto& e : j.at("effects"))
        effects.emplace_back(operator_from_json(e), tols);
    std::optional<QuantizationKernel> generator;
    if (j.contains("generator"))
        generator = QuantizationKernel{
            DensityOperator(operator_from_json(j.at("generator")), tols)};
    return Povm(std::move(partition), std::move(effects), j.at("d").get<double>(),
                std::move(generator), tols);
}

Povm build_povm(const WeylSystem& system, const QuantizationKernel& kernel,
                const OutcomePartition& partition, const Tolerances& tols,
                bool parallel) {
    if (partition.carrier() != system.carrier())
        throw CarrierMismatch("partition carrier differs from the system carrier");
    if (kernel.dim() != system.fock_dim())
        throw DimensionMismatch("kernel dim vs fock dim");

    const GroupCarrier& carrier = system.carrier();
    const Eigen::Index m = system.fock_dim();
    const Matrix factor = detail::positive_factor(kernel.op());
    const double inv_d = 1.0 / system.d_const();

    std::vector<Effect> effects;
    effects.reserve(partition.cell_count());
    for (const auto& cell : partition.cells()) {
        Matrix e = detsum::accumulate<Matrix>(
            cell.indices.size(), Matrix::Zero(m, m),
            [&](Matrix& acc, std::size_t k) {
                const std::size_t g = cell.indices[k];
                const Operator w = make_weyl_matrix(carrier, m, g);
                const Matrix y = w.matrix() * factor;
                acc.noalias() += (inv_d * carrier.weight(g)) * (y * y.adjoint());
            },
            parallel);
        effects.emplace_back(Operator(std::move(e)), tols);
    }
    return Povm(partition, std::move(effects), system.d_const(), kernel, tols);
}

double cell_trace_residual(const Povm& povm) {
    double worst = 0.0;
    for (std::size_t cell = 0; cell < povm.partition().cell_count(); ++cell) {
        const double expected = povm.partition().cell_measure(cell) / povm.d_const();
        const double got = trace(povm.effect(cell).op()).real();
        worst = std::max(worst, std::abs(got - expected));
    }
    return worst;
}

std::vector<double> probabilities(const Povm& povm, const DensityOperator& rho) {
    if (rho.dim() != povm.effects().front().dim())
        throw DimensionMismatch("state dim vs effect dim");
    std::vector<double> p(povm.partition().cell_count());
    for (std::size_t cell = 0; cell < p.size(); ++cell) {
        const double value =
            (rho.op().matrix() * povm.effect(cell).op().matrix()).trace().real();
        if (value < -1e-12)
            throw NotPositive("outcome probability " + std::to_string(value));
        p[cell] = std::max(value, 0.0);
    }
    return p;
}

std::vector<std::int64_t> sample(const Povm& povm, const DensityOperator& rho,
                                 std::int64_t shots, std::uint64_t seed) {
    if (shots < 1) throw InvalidArgument("shots must be >= 1");
    const std::vector<double> p = probabilities(povm, rho);
    std::vector<double> cdf(p.size());
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        total += p[i];
        cdf[i] = total;
    }
    if (!(total > 0.0)) throw InvalidArgument("all outcome probabilities vanish");

    std::vector<std::int64_t> counts(p.size(), 0);
    Rng rng(seed);
    for (std::int64_t s = 0; s < shots; ++s) {
        const double u = rng.u01() * total;
        const std::size_t cell = static_cast<std::size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u,
                             [](double c, double x) { return c <= x; }) -
            cdf.begin());
        ++counts[std::min(cell, counts.size() - 1)];
    }
    return counts;
}

std::string counts_to_csv(const Povm& povm, const std::vector<std::int64_t>& counts) {
    if (counts.size() != povm.partition().cell_count())
        throw InvalidArgument("count vector size vs cell count");
    std::ostringstream out;
    out << "label,count\n";
    for (std::size_t i = 0; i < counts.size(); ++i)
        out << povm.partition().cells()[i].label << "," << counts[i] << "\n";
    return out.str();
}

ComplexMeasureTable::ComplexMeasureTable(GroupCarrier carrier, Vector density)
    : carrier_(std::move(carrier)), density_(std::move(density)) {
    if (static_cast<std::size_t>(density_.size()) != carrier_.size())
        throw InvalidArgument("density size does not match carrier size");
    if (!density_.allFinite()) throw InvalidArgument("density must be finite");
}

cx ComplexMeasureTable::integrate_cell(const OutcomePartition& partition,
                                       std::size_t cell) const {
    if (partition.carrier() != carrier_)
        throw CarrierMismatch("partition carrier differs from the table carrier");
    const auto& indices = partition.cells().at(cell).indices;
    return detsum::accumulate<cx>(
        indices.size(), cx(0.0),
        [&](cx& acc, std::size_t k) {
            const std::size_t g = indices[k];
            acc += carrier_.weight(g) * density_[static_cast<Eigen::Index>(g)];
        },
        false);
}

ComplexMeasureTable complex_measure_density(const WeylSystem& system,
                                            const QuantizationKernel& kernel,
                                            const Vector& psi, const Vector& phi,
                                            bool parallel) {
    const Eigen::Index m = system.fock_dim();
    if (psi.size() != m || phi.size() != m)
        throw DimensionMismatch("vector dim vs fock dim");
    if (kernel.dim() != m) throw DimensionMismatch("kernel dim vs fock dim");

    const GroupCarrier& carrier = system.carrier();
    const Matrix factor = detail::positive_factor(kernel.op());
    const double inv_d = 1.0 / system.d_const();
    Vector density(static_cast<Eigen::Index>(carrier.size()));
    detsum::for_each(
        carrier.size(),
        [&](std::size_t g) {
            const Operator w = make_weyl_matrix(carrier, m, g);
            const Matrix y = w.matrix() * factor;
            const Vector zpsi = y.adjoint() * psi;
            const Vector zphi = y.adjoint() * phi;
            density[static_cast<Eigen::Index>(g)] = inv_d * zpsi.dot(zphi);
        },
        parallel);
    return ComplexMeasureTable(carrier, std::move(density));
}

namespace {

// Lattice-aligned default sweep for the integral gate: half, three quarter
// and full window. Empty when the grid is too small to form three distinct
// windows (nothing useful can be said there).
std::vector<double> default_gate_extents(const GroupCarrier& carrier) {
    const long full = static_cast<long>(carrier.axis_size() / 2);
    if (full < 3) return {};
    long mid = (3 * full) / 4;
    long low = full / 2;
    if (mid >= full) mid = full - 1;
    if (low >= mid) low = mid - 1;
    const double h = carrier.step();
    return {static_cast<double>(low) * h, static_cast<double>(mid) * h,
            static_cast<double>(full) * h};
}

// Window membership by integer axis coordinates, exact for lattice data.
std::vector<long> extent_points(const GroupCarrier& carrier,
                                const std::vector<double>& extents) {
    std::vector<long> points;
    points.reserve(extents.size());
    for (double ext : extents) {
        const double ratio = ext / carrier.step();
        const double rounded = std::round(ratio);
        if (std::abs(ratio - rounded) > 1e-9)
            throw InvalidArgument("sweep extent must be a lattice multiple");
        points.push_back(static_cast<long>(rounded));
    }
    for (std::size_t i = 1; i < points.size(); ++i)
        if (points[i] <= points[i - 1])
            throw InvalidArgument("sweep extents must increase");
    return points;
}

} // namespace

DomainVerdict domain_check(const WeylSystem& system, const QuantizationKernel& kernel,
                           const ClassicalObservable& f, const Vector& phi,
                           const std::vector<double>& sweep_extents,
                           const Tolerances& tols, bool parallel) {
    const Eigen::Index m = system.fock_dim();
    if (phi.size() != m) throw DimensionMismatch("vector dim vs fock dim");
    if (kernel.dim() != m) throw DimensionMismatch("kernel dim vs fock dim");

    DomainVerdict verdict;
    if (!f.carrier().is_planar()) {
        // finite carrier: every function is integrable
        verdict.in_domain = true;
        verdict.window_extents = {0.0};
        return verdict;
    }
    if (sweep_extents.size() < 2)
        throw InvalidArgument("domain sweep needs at least two windows");
    const GroupCarrier& carrier = f.carrier();
    if (carrier.step() != system.carrier().step())
        throw CarrierMismatch("observable grid step differs from the system grid");
    const std::vector<long> windows = extent_points(carrier, sweep_extents);
    if (windows.back() > static_cast<long>(carrier.axis_size() / 2))
        throw CarrierMismatch("largest sweep window exceeds the observable grid");

    // probe vectors: low Fock basis plus phi itself
    std::vector<Vector> probes;
    const Eigen::Index k = std::min<Eigen::Index>(tols.probe_dim, m);
    for (Eigen::Index i = 0; i < k; ++i) {
        Vector e = Vector::Zero(m);
        e[i] = 1.0;
        probes.push_back(std::move(e));
    }
    probes.push_back(phi);

    const Matrix factor = detail::positive_factor(kernel.op());
    const double inv_d = 1.0 / system.d_const();
    const long half = static_cast<long>(carrier.axis_size() / 2);
    const std::size_t n_windows = windows.size();
    const std::size_t n_probes = probes.size();

    Eigen::VectorXd partials = detsum::accumulate<Eigen::VectorXd>(
        carrier.size(),
        Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_windows * n_probes)),
        [&](Eigen::VectorXd& acc, std::size_t g) {
            const double fabsval = std::abs(f.value(g));
            if (fabsval == 0.0) return;
            auto [i, j] = carrier.axis_indices(g);
            const long di = i - half;
            const long dj = j - half;
            const Operator w = make_weyl_matrix(carrier, m, g);
            const Matrix y = w.matrix() * factor;
            const Vector zphi = y.adjoint() * phi;
            for (std::size_t pi = 0; pi < n_probes; ++pi) {
                const Vector zprobe = y.adjoint() * probes[pi];
                const double den = std::abs(zprobe.dot(zphi)) * inv_d;
                const double term = carrier.weight(g) * fabsval * den;
                for (std::size_t wi = 0; wi < n_windows; ++wi) {
                    const long lim = windows[wi];
                    if (di >= -lim && di < lim && dj >= -lim && dj < lim)
                        acc[static_cast<Eigen::Index>(wi * n_probes + pi)] += term;
                }
            }
        },
        parallel);

    verdict.window_extents = sweep_extents;
    verdict.partial_sums.assign(n_probes, std::vector<double>(n_windows, 0.0));
    for (std::size_t pi = 0; pi < n_probes; ++pi)
        for (std::size_t wi = 0; wi < n_windows; ++wi)
            verdict.partial_sums[pi][wi] =
                partials[static_cast<Eigen::Index>(wi * n_probes + pi)];

    verdict.in_domain = true;
    for (std::size_t pi = 0; pi < n_probes; ++pi) {
        const auto& sums = verdict.partial_sums[pi];
        const double last = sums[n_windows - 1];
        const double prev = sums[n_windows - 2];
        if (!std::isfinite(last) ||
            std::abs(last - prev) > tols.dom_tol * (1.0 + std::abs(last))) {
            verdict.in_domain = false;
            break;
        }
    }
    return verdict;
}

namespace {

// Weak divergence gate for the operator integral: with partial sums over the
// half / three-quarter / full windows, reject only when the increments are
// both non-negligible and non-shrinking. Certifying "in-domain" at dom_tol is
// domain_check's job with caller-chosen windows; this gate cannot see past
// the carrier window, so it only screens manifest divergence.
void gate_or_throw(const WeylSystem& system, const QuantizationKernel& kernel,
                   const ClassicalObservable& f, const Vector& phi,
                   const Tolerances& tols, bool parallel) {
    if (!f.carrier().is_planar()) return;
    const std::vector<double> extents = default_gate_extents(f.carrier());
    if (extents.empty()) return;
    DomainVerdict v = domain_check(system, kernel, f, phi, extents, tols, parallel);
    for (const auto& sums : v.partial_sums) {
        const std::size_t n = sums.size();
        const double tiny = 1e-300;
        const double g1 =
            (sums[n - 2] - sums[n - 3]) / std::max(std::abs(sums[n - 3]), tiny);
        const double g2 =
            (sums[n - 1] - sums[n - 2]) / std::max(std::abs(sums[n - 2]), tiny);
        if (!std::isfinite(sums[n - 1]) ||
            (g2 > tols.gate_growth_tol && g2 > 0.5 * g1))
            throw NotInDomain("partial sums keep growing across windows (" +
                              std::to_string(sums[n - 3]) + ", " +
                              std::to_string(sums[n - 2]) + ", " +
                              std::to_string(sums[n - 1]) + ")");
    }
}

} // namespace

std::vector<cx> operator_integral_batch(const WeylSystem& system,
                                        const QuantizationKernel& kernel,
                                        const ClassicalObservable& f,
                                        const std::vector<std::pair<Vector, Vector>>& pairs,
                                        const Tolerances& tols, bool parallel) {
    if (pairs.empty()) return {};
    const Eigen::Index m = system.fock_dim();
    if (kernel.dim() != m) throw DimensionMismatch("kernel dim vs fock dim");
    if (f.carrier() != system.carrier())
        throw CarrierMismatch("observable carrier differs from the system carrier");
    for (const auto& [psi, phi] : pairs)
        if (psi.size() != m || phi.size() != m)
            throw DimensionMismatch("vector dim vs fock dim");

    // one gate per distinct phi
    std::vector<const Vector*> gated;
    for (const auto& [psi, phi] : pairs) {
        bool seen = false;
        for (const Vector* v : gated)
            if (*v == phi) { seen = true; break; }
        if (!seen) {
            gate_or_throw(system, kernel, f, phi, tols, parallel);
            gated.push_back(&phi);
        }
    }

    const GroupCarrier& carrier = system.carrier();
    const Matrix factor = detail::positive_factor(kernel.op());
    const double inv_d = 1.0 / system.d_const();
    const std::size_t n_pairs = pairs.size();

    Vector sums = detsum::accumulate<Vector>(
        carrier.size(), Vector::Zero(static_cast<Eigen::Index>(n_pairs)),
        [&](Vector& acc, std::size_t g) {
            const cx fval = f.value(g);
            if (fval == cx(0.0, 0.0)) return;
            const Operator w = make_weyl_matrix(carrier, m, g);
            const Matrix y = w.matrix() * factor;
            const cx coeff = carrier.weight(g) * fval * inv_d;
            for (std::size_t k = 0; k < n_pairs; ++k) {
                const Vector zpsi = y.adjoint() * pairs[k].first;
                const Vector zphi = y.adjoint() * pairs[k].second;
                acc[static_cast<Eigen::Index>(k)] += coeff * zpsi.dot(zphi);
            }
        },
        parallel);

    std::vector<cx> out(n_pairs);
    for (std::size_t k = 0; k < n_pairs; ++k) out[k] = sums[static_cast<Eigen::Index>(k)];
    return out;
}

cx operator_integral(const WeylSystem& system, const QuantizationKernel& kernel,
                     const ClassicalObservable& f, const Vector& psi,
                     const Vector& phi, const Tolerances& tols, bool parallel) {
    return operator_integral_batch(system, kernel, f, {{psi, phi}}, tols, parallel)[0];
}

cx operator_integral(const ComplexMeasureTable& table, const ClassicalObservable& f,
                     bool parallel) {
    if (table.carrier() != f.carrier())
        throw CarrierMismatch("observable carrier differs from the table carrier");
    const GroupCarrier& carrier = table.carrier();
    return detsum::accumulate<cx>(
        carrier.size(), cx(0.0),
        [&](cx& acc, std::size_t g) {
            acc += carrier.weight(g) * f.value(g) *
                   table.density()[static_cast<Eigen::Index>(g)];
        },
        parallel);
}

cx operator_integral(const Povm& povm, const WeylSystem& system,
                     const ClassicalObservable& f, const Vector& psi,
                     const Vector& phi, const Tolerances& tols, bool parallel) {
    if (!povm.generator())
        throw InvalidArgument("POVM carries no generator kernel");
    return operator_integral(system, *povm.generator(), f, psi, phi, tols, parallel);
}

QuasicontinuityReport quasicontinuity_check(const WeylSystem& system,
                                            const QuantizationKernel& kernel,
                                            const std::vector<ClassicalObservable>& sequence,
                                            const ClassicalObservable& limit,
                                            const Vector& psi, const Vector& phi,
                                            const Tolerances& tols, bool parallel) {
    if (sequence.empty()) throw InvalidArgument("empty function sequence");
    constexpr double kSlack = 1e-12;
    auto check_real_positive = [&](const ClassicalObservable& f) {
        for (Eigen::Index i = 0; i < f.values().size(); ++i) {
            const cx v = f.values()[i];
            if (std::abs(v.imag()) > kSlack || v.real() < -kSlack)
                throw NotMonotone("sequence members must be positive real");
        }
    };
    check_real_positive(limit);
    for (std::size_t k = 0; k < sequence.size(); ++k) {
        if (sequence[k].carrier() != limit.carrier())
            throw CarrierMismatch("sequence member carrier differs from the limit");
        check_real_positive(sequence[k]);
        const ClassicalObservable& upper = k + 1 < sequence.size() ? sequence[k + 1] : limit;
        for (Eigen::Index i = 0; i < limit.values().size(); ++i)
            if (sequence[k].values()[i].real() > upper.values()[i].real() + kSlack)
                throw NotMonotone("sequence not increasing toward the limit at index " +
                                  std::to_string(i));
    }

    gate_or_throw(system, kernel, limit, phi, tols, parallel);
    const ComplexMeasureTable table =
        complex_measure_density(system, kernel, psi, phi, parallel);
    const cx limit_value = operator_integral(table, limit, parallel);

    QuasicontinuityReport report;
    report.residuals.reserve(sequence.size());
    for (const ClassicalObservable& f : sequence)
        report.residuals.push_back(std::abs(operator_integral(table, f, parallel) - limit_value));
    report.final_residual = report.residuals.back();
    report.nonincreasing = true;
    for (std::size_t k = 1; k < report.residuals.size(); ++k)
        if (report.residuals[k] > report.residuals[k - 1] + kSlack)
            report.nonincreasing = false;
    return report;
}

} // namespace covquant
