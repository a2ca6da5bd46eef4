#pragma once

#include <string>

#include <json.hpp>

namespace covquant {

/// Numerical tolerances used by the validators. The built-in defaults are the
/// ones every documented residual bound refers to; individual runs may
/// override them through a JSON file (CLI flag --tol-overrides).
struct Tolerances {
    double herm_tol = 1e-10;          // max |A - A^dag| entry
    double psd_tol = 1e-9;            // eigenvalue floor for positivity
    double trace_tol = 1e-9;          // |tr - 1| for density operators
    double unitary_tol_finite = 1e-8; // ||U^dag U - I||_max, finite systems
    double unitary_tol_planar = 1e-6; // looser: truncation breaks exact unitarity
    double dom_tol = 1e-6;            // relative Cauchy gap between sweep windows
    double qc_tol = 1e-6;             // quasicontinuity residual at final index
    double mass_tol = 1e-8;           // function mass allowed to leave the window
    double povm_norm_tol_finite = 1e-10; // ||sum E(B) - I||_max gate, finite torus
    double povm_norm_tol_planar = 1e-3;  // probe-block residual at the default grid
    double gate_growth_tol = 1e-2;    // relative growth admitted by the integral gate
    int probe_dim = 6;                // Fock block used for truncated-identity checks

    double unitary_tol(bool planar) const {
        return planar ? unitary_tol_planar : unitary_tol_finite;
    }

    static const Tolerances& defaults();

    nlohmann::json to_json() const;
    static Tolerances from_json(const nlohmann::json& j);
    static Tolerances from_json_file(const std::string& path);
};

} // namespace covquant
