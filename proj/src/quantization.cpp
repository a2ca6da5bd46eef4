#include "covquant/quantization.hpp"

#include <cmath>

#include "covquant/random.hpp"
#include "spectral.hpp"

namespace covquant {

ClassicalObservable::ClassicalObservable(GroupCarrier carrier, Vector values,
                                         std::optional<double> declared_sup)
    : carrier_(std::move(carrier)), values_(std::move(values)),
      declared_sup_(declared_sup) {
    if (static_cast<std::size_t>(values_.size()) != carrier_.size())
        throw InvalidArgument("value count does not match carrier size");
    if (!values_.allFinite())
        throw InvalidArgument("observable values must be finite");
    if (declared_sup_ && sup_norm() > *declared_sup_ + 1e-12)
        throw InvalidArgument("values exceed the declared sup bound");
}

ClassicalObservable ClassicalObservable::one(const GroupCarrier& carrier) {
    return ClassicalObservable(carrier, Vector::Ones(static_cast<Eigen::Index>(carrier.size())), 1.0);
}

ClassicalObservable ClassicalObservable::indicator(
    const GroupCarrier& carrier, const std::vector<std::size_t>& indices) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(carrier.size()));
    for (std::size_t i : indices) {
        if (i >= carrier.size()) throw OffGridElement("indicator index out of range");
        v[static_cast<Eigen::Index>(i)] = 1.0;
    }
    return ClassicalObservable(carrier, std::move(v), 1.0);
}

ClassicalObservable ClassicalObservable::indicator_rect(const GroupCarrier& carrier,
                                                        double q0, double q1,
                                                        double p0, double p1) {
    if (!carrier.is_planar())
        throw InvalidArgument("rectangle indicator needs a planar carrier");
    Vector v = Vector::Zero(static_cast<Eigen::Index>(carrier.size()));
    for (std::size_t g = 0; g < carrier.size(); ++g) {
        auto [q, p] = carrier.planar_point(g);
        if (q >= q0 && q < q1 && p >= p0 && p < p1)
            v[static_cast<Eigen::Index>(g)] = 1.0;
    }
    return ClassicalObservable(carrier, std::move(v), 1.0);
}

ClassicalObservable ClassicalObservable::poly_qp(const GroupCarrier& carrier,
                                                 const std::vector<Monomial>& monomials) {
    if (!carrier.is_planar())
        throw InvalidArgument("poly-qp is defined on planar carriers only");
    Vector v = Vector::Zero(static_cast<Eigen::Index>(carrier.size()));
    for (std::size_t g = 0; g < carrier.size(); ++g) {
        auto [q, p] = carrier.planar_point(g);
        cx acc = 0.0;
        for (const Monomial& m : monomials)
            acc += m.coeff * std::pow(q, m.q_power) * std::pow(p, m.p_power);
        v[static_cast<Eigen::Index>(g)] = acc;
    }
    return ClassicalObservable(carrier, std::move(v));
}

ClassicalObservable ClassicalObservable::gauss_bump(const GroupCarrier& carrier,
                                                    double center_q, double center_p,
                                                    double width) {
    if (!(width > 0.0)) throw InvalidArgument("gauss bump needs width > 0");
    Vector v(static_cast<Eigen::Index>(carrier.size()));
    for (std::size_t g = 0; g < carrier.size(); ++g) {
        double q, p;
        if (carrier.is_planar()) {
            std::tie(q, p) = carrier.planar_point(g);
        } else {
            auto [a, b] = carrier.axis_indices(g);
            q = static_cast<double>(a);
            p = static_cast<double>(b);
        }
        const double dq = q - center_q;
        const double dp = p - center_p;
        v[static_cast<Eigen::Index>(g)] =
            std::exp(-(dq * dq + dp * dp) / (2.0 * width * width));
    }
    return ClassicalObservable(carrier, std::move(v), 1.0);
}

double ClassicalObservable::sup_norm() const {
    return values_.size() == 0 ? 0.0 : values_.cwiseAbs().maxCoeff();
}

double ClassicalObservable::weighted_l1() const {
    return carrier_.weight(0) * values_.cwiseAbs().sum();
}

ClassicalObservable ClassicalObservable::translated(std::size_t g,
                                                    double mass_tol) const {
    const std::size_t n = carrier_.size();
    if (g >= n) throw OffGridElement("translation element off the carrier");
    Vector out = Vector::Zero(static_cast<Eigen::Index>(n));
    std::vector<char> used(n, 0);
    for (std::size_t target = 0; target < n; ++target) {
        const auto source = carrier_.add(target, g);
        if (source) {
            out[static_cast<Eigen::Index>(target)] =
                values_[static_cast<Eigen::Index>(*source)];
            used[*source] = 1;
        }
    }
    if (carrier_.is_planar()) {
        double dropped = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (!used[i])
                dropped += carrier_.weight(i) * std::abs(values_[static_cast<Eigen::Index>(i)]);
        if (dropped > mass_tol)
            throw TranslationLeavesGrid("mass " + std::to_string(dropped) +
                                        " beyond the window exceeds tol " +
                                        std::to_string(mass_tol));
    }
    return ClassicalObservable(carrier_, std::move(out), declared_sup_);
}

nlohmann::json ClassicalObservable::to_json() const {
    nlohmann::json vals = nlohmann::json::array();
    for (Eigen::Index i = 0; i < values_.size(); ++i)
        vals.push_back({values_[i].real(), values_[i].imag()});
    nlohmann::json j{{"carrier", carrier_.to_json()}, {"values", std::move(vals)}};
    if (declared_sup_) j["declared_sup"] = *declared_sup_;
    return j;
}

ClassicalObservable ClassicalObservable::from_json(const nlohmann::json& j) {
    GroupCarrier carrier = GroupCarrier::from_json(j.at("carrier"));
    const auto& vals = j.at("values");
    if (!vals.is_array()) throw IoError("observable values must be an array");
    Vector v(static_cast<Eigen::Index>(vals.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const auto& entry = vals.at(static_cast<std::size_t>(i));
        v[i] = cx(entry.at(0).get<double>(), entry.at(1).get<double>());
    }
    std::optional<double> sup;
    if (j.contains("declared_sup")) sup = j.at("declared_sup").get<double>();
    return ClassicalObservable(std::move(carrier), std::move(v), sup);
}

MapTable::MapTable(GroupCarrier carrier, std::vector<Operator> entries)
    : carrier_(std::move(carrier)), entries_(std::move(entries)) {
    if (entries_.size() != carrier_.size())
        throw IncompleteTable("table has " + std::to_string(entries_.size()) +
                              " entries for " + std::to_string(carrier_.size()) +
                              " carrier points");
    for (const Operator& e : entries_)
        if (e.dim() != entries_.front().dim())
            throw DimensionMismatch("table entries of mixed dimension");
}

nlohmann::json MapTable::to_json() const {
    nlohmann::json entries = nlohmann::json::array();
    for (const Operator& e : entries_) entries.push_back(operator_to_json(e));
    return {{"carrier", carrier_.to_json()}, {"entries", std::move(entries)}};
}

MapTable MapTable::from_json(const nlohmann::json& j) {
    GroupCarrier carrier = GroupCarrier::from_json(j.at("carrier"));
    std::vector<Operator> entries;
    for (const auto& e : j.at("entries")) entries.push_back(operator_from_json(e));
    return MapTable(std::move(carrier), std::move(entries));
}

namespace {

void require_compatible(const WeylSystem& system, const QuantizationKernel& kernel,
                        const ClassicalObservable& f) {
    if (f.carrier() != system.carrier())
        throw CarrierMismatch("observable carrier differs from the system carrier");
    if (kernel.dim() != system.fock_dim())
        throw DimensionMismatch("kernel dim vs fock dim");
}

} // namespace

Operator quantize(const WeylSystem& system, const QuantizationKernel& kernel,
                  const ClassicalObservable& f, bool parallel) {
    require_compatible(system, kernel, f);
    if (!std::isfinite(f.weighted_l1()))
        throw UnsummableFunction("weighted l1 mass is not finite");

    const GroupCarrier& carrier = system.carrier();
    const Eigen::Index m = system.fock_dim();
    const Matrix factor = detail::positive_factor(kernel.op());
    const double inv_d = 1.0 / system.d_const();

    Matrix sum = detsum::accumulate<Matrix>(
        carrier.size(), Matrix::Zero(m, m),
        [&](Matrix& acc, std::size_t g) {
            const cx coeff = inv_d * carrier.weight(g) * f.value(g);
            if (coeff == cx(0.0, 0.0)) return;
            const Operator w = make_weyl_matrix(carrier, m, g);
            const Matrix y = w.matrix() * factor;
            acc.noalias() += coeff * (y * y.adjoint());
        },
        parallel);
    if (!sum.allFinite())
        throw UnsummableFunction("quantization sum overflowed");
    return Operator(std::move(sum));
}

ClassicalObservable dual_symbol(const WeylSystem& system,
                                const QuantizationKernel& kernel,
                                const Operator& s, bool parallel) {
    if (kernel.dim() != system.fock_dim() || s.dim() != system.fock_dim())
        throw DimensionMismatch("operand dim vs fock dim");
    const GroupCarrier& carrier = system.carrier();
    const Eigen::Index m = system.fock_dim();
    const Matrix factor = detail::positive_factor(kernel.op());
    const double inv_d = 1.0 / system.d_const();

    Vector values(static_cast<Eigen::Index>(carrier.size()));
    detsum::for_each(
        carrier.size(),
        [&](std::size_t g) {
            const Operator w = make_weyl_matrix(carrier, m, g);
            const Matrix y = w.matrix() * factor;
            // Tr[S beta_g(T)] = sum_r y_r^dag S y_r
            cx val = 0.0;
            for (Eigen::Index r = 0; r < y.cols(); ++r)
                val += y.col(r).dot(s.matrix() * y.col(r));
            values[static_cast<Eigen::Index>(g)] = inv_d * val;
        },
        parallel);
    return ClassicalObservable(carrier, std::move(values));
}

double duality_residual(const WeylSystem& system, const QuantizationKernel& kernel,
                        const ClassicalObservable& f, const Operator& s,
                        bool parallel) {
    const cx lhs = (s.matrix() * quantize(system, kernel, f, parallel).matrix()).trace();
    const ClassicalObservable symbol = dual_symbol(system, kernel, s, parallel);
    const GroupCarrier& carrier = system.carrier();
    const cx rhs = detsum::accumulate<cx>(
        carrier.size(), cx(0.0),
        [&](cx& acc, std::size_t g) {
            acc += carrier.weight(g) * f.value(g) * symbol.value(g);
        },
        parallel);
    return std::abs(lhs - rhs);
}

std::pair<double, double> trace_identity_residual(const WeylSystem& system,
                                                  const Operator& a, const Operator& s,
                                                  const Tolerances& tols,
                                                  bool parallel) {
    if (a.dim() != system.fock_dim() || s.dim() != system.fock_dim())
        throw DimensionMismatch("operand dim vs fock dim");
    if (!is_positive(a, tols.psd_tol, tols)) throw NotPositive("first operand");
    if (!is_positive(s, tols.psd_tol, tols)) throw NotPositive("second operand");

    const GroupCarrier& carrier = system.carrier();
    const Eigen::Index m = system.fock_dim();
    const Matrix factor = detail::positive_factor(Operator(s.matrix()));
    const double inv_d = 1.0 / system.d_const();

    const cx lhs = detsum::accumulate<cx>(
        carrier.size(), cx(0.0),
        [&](cx& acc, std::size_t g) {
            const Operator w = make_weyl_matrix(carrier, m, g);
            const Matrix y = w.matrix() * factor;
            cx val = 0.0;
            for (Eigen::Index r = 0; r < y.cols(); ++r)
                val += y.col(r).dot(a.matrix() * y.col(r));
            acc += carrier.weight(g) * val;
        },
        parallel);
    const double rhs = trace(a).real() * trace(Operator(s.matrix())).real();
    return {inv_d * lhs.real(), rhs};
}

double covariance_residual(const WeylSystem& system, const QuantizationKernel& kernel,
                           const ClassicalObservable& f, std::size_t g,
                           const Tolerances& tols, bool parallel) {
    require_compatible(system, kernel, f);
    const Operator lhs = system.beta_dual(g, quantize(system, kernel, f, parallel));
    const Operator rhs =
        quantize(system, kernel, f.translated(g, tols.mass_tol), parallel);
    return max_abs(lhs.matrix() - rhs.matrix());
}

MapTable kernel_to_map_table(const WeylSystem& system,
                             const QuantizationKernel& kernel, bool parallel) {
    if (kernel.dim() != system.fock_dim())
        throw DimensionMismatch("kernel dim vs fock dim");
    const GroupCarrier& carrier = system.carrier();
    const Eigen::Index m = system.fock_dim();
    const double inv_d = 1.0 / system.d_const();
    std::vector<Matrix> mats(carrier.size());
    detsum::for_each(
        carrier.size(),
        [&](std::size_t g) {
            const Operator w = make_weyl_matrix(carrier, m, g);
            mats[g] = inv_d * carrier.weight(g) *
                      (w.matrix() * kernel.op().matrix() * w.matrix().adjoint());
        },
        parallel);
    std::vector<Operator> entries;
    entries.reserve(mats.size());
    for (Matrix& mm : mats) entries.emplace_back(std::move(mm));
    return MapTable(carrier, std::move(entries));
}

RecoveryResult recover_kernel(const WeylSystem& system, const MapTable& table,
                              const Tolerances& tols, bool parallel) {
    if (table.carrier() != system.carrier())
        throw CarrierMismatch("table carrier differs from the system carrier");
    if (table.size() == 0) throw IncompleteTable("empty table");
    if (table.entry(0).dim() != system.fock_dim())
        throw DimensionMismatch("table entry dim vs fock dim");

    const GroupCarrier& carrier = system.carrier();
    const Eigen::Index m = system.fock_dim();
    const std::size_t n = carrier.size();
    const double d = system.d_const();

    // candidate generator per point: s_g = (d / w_g) beta_g^*(table[g])
    std::vector<Matrix> candidates(n);
    detsum::for_each(
        n,
        [&](std::size_t g) {
            const Operator w = make_weyl_matrix(carrier, m, g);
            candidates[g] = (d / carrier.weight(g)) *
                            (w.matrix().adjoint() * table.entry(g).matrix() * w.matrix());
        },
        parallel);

    Matrix mean = detsum::accumulate<Matrix>(
                      n, Matrix::Zero(m, m),
                      [&](Matrix& acc, std::size_t g) { acc += candidates[g]; },
                      parallel) /
                  static_cast<double>(n);

    std::vector<double> deviations(n);
    detsum::for_each(
        n, [&](std::size_t g) { deviations[g] = max_abs(candidates[g] - mean); },
        parallel);
    double max_deviation = 0.0;
    for (double dev : deviations) max_deviation = std::max(max_deviation, dev);

    Matrix herm = 0.5 * (mean + mean.adjoint());
    const double tr = herm.trace().real();
    if (!(tr > 1e-12))
        throw NotPositiveRecovered("candidate mean has nonpositive trace " +
                                   std::to_string(tr));
    herm /= tr;
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tols.psd_tol)
        throw NotPositiveRecovered("candidate mean eigenvalue " +
                                   std::to_string(es.eigenvalues().minCoeff()));
    return RecoveryResult{QuantizationKernel{DensityOperator(Operator(std::move(herm)), tols)},
                          max_deviation};
}

NormalityReport normality_surrogate_check(const WeylSystem& system,
                                          const QuantizationKernel& kernel,
                                          const std::vector<ClassicalObservable>& sequence,
                                          const ClassicalObservable& limit, double tol,
                                          const Tolerances& tols, bool parallel) {
    if (sequence.empty()) throw InvalidArgument("empty function sequence");
    require_compatible(system, kernel, limit);
    double uniform = 0.0;
    for (const ClassicalObservable& f : sequence) {
        if (f.carrier() != limit.carrier())
            throw CarrierMismatch("sequence member carrier differs from the limit");
        uniform = std::max(uniform, f.sup_norm());
    }
    if (!(uniform < 1e12))
        throw UnboundedSequence("sup bound " + std::to_string(uniform));

    // Probe states: low Fock projections plus one seeded random density.
    const Eigen::Index m = system.fock_dim();
    std::vector<Operator> probes;
    const Eigen::Index k = std::min<Eigen::Index>(tols.probe_dim, m);
    for (Eigen::Index i = 0; i < k; ++i) {
        Matrix p = Matrix::Zero(m, m);
        p(i, i) = 1.0;
        probes.emplace_back(std::move(p));
    }
    Rng rng(0x5eedu);
    probes.push_back(random_density(m, rng, tols).op());

    const GroupCarrier& carrier = system.carrier();
    auto pair_with = [&](const ClassicalObservable& f, const ClassicalObservable& symbol) {
        return detsum::accumulate<cx>(
            carrier.size(), cx(0.0),
            [&](cx& acc, std::size_t g) {
                acc += carrier.weight(g) * f.value(g) * symbol.value(g);
            },
            parallel);
    };

    NormalityReport report;
    report.residuals.assign(sequence.size(), 0.0);
    for (const Operator& s : probes) {
        const ClassicalObservable symbol = dual_symbol(system, kernel, s, parallel);
        const cx limit_value = pair_with(limit, symbol);
        for (std::size_t i = 0; i < sequence.size(); ++i) {
            const double r = std::abs(pair_with(sequence[i], symbol) - limit_value);
            report.residuals[i] = std::max(report.residuals[i], r);
        }
    }
    for (std::size_t i = 0; i < report.residuals.size(); ++i) {
        report.max_residual = std::max(report.max_residual, report.residuals[i]);
        if (!report.first_index_within_tol && report.residuals[i] <= tol)
            report.first_index_within_tol = i;
    }
    return report;
}

} // namespace covquant
