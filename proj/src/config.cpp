#include "covquant/config.hpp"

#include <fstream>

#include "covquant/errors.hpp"

namespace covquant {

const Tolerances& Tolerances::defaults() {
    static const Tolerances t;
    return t;
}

nlohmann::json Tolerances::to_json() const {
    return {{"herm_tol", herm_tol},
            {"psd_tol", psd_tol},
            {"trace_tol", trace_tol},
            {"unitary_tol_finite", unitary_tol_finite},
            {"unitary_tol_planar", unitary_tol_planar},
            {"dom_tol", dom_tol},
            {"qc_tol", qc_tol},
            {"mass_tol", mass_tol},
            {"povm_norm_tol_finite", povm_norm_tol_finite},
            {"povm_norm_tol_planar", povm_norm_tol_planar},
            {"gate_growth_tol", gate_growth_tol},
            {"probe_dim", probe_dim}};
}

Tolerances Tolerances::from_json(const nlohmann::json& j) {
    Tolerances t;
    auto pick = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    pick("herm_tol", t.herm_tol);
    pick("psd_tol", t.psd_tol);
    pick("trace_tol", t.trace_tol);
    pick("unitary_tol_finite", t.unitary_tol_finite);
    pick("unitary_tol_planar", t.unitary_tol_planar);
    pick("dom_tol", t.dom_tol);
    pick("qc_tol", t.qc_tol);
    pick("mass_tol", t.mass_tol);
    pick("povm_norm_tol_finite", t.povm_norm_tol_finite);
    pick("povm_norm_tol_planar", t.povm_norm_tol_planar);
    pick("gate_growth_tol", t.gate_growth_tol);
    pick("probe_dim", t.probe_dim);
    return t;
}

Tolerances Tolerances::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open tolerance file " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

} // namespace covquant
