#pragma once

#include <optional>

#include "crproj/duality.hpp"

namespace crproj {

struct config {
    int m = 2;
    int order = 5;           ///< jet truncation degree N
    int p_max = 4;           ///< highest invariant order
    double tol_structural = 1e-8;
    double tol_derivative = 1e-10;
    double tol_orbit = 1e-6;
    std::uint64_t seed = 1;
    bool json = false;

    void validate() const {
        if (p_max < 2) throw domain_error("config: p_max must be >= 2");
        if (order < p_max + 1) throw domain_error("config: order must be at least p_max + 1");
        if (m < 2) throw domain_error("config: m must be >= 2");
    }
};

/// Everything the commands need, computed once per surface.
struct analysis {
    surface_germ germ;
    frame_section section;
    mc_pullback mc;
    invariant_tables tables;
    second_order_at0 so;
    adaptation_result adapted;
    third_order_data p3;
    pseudoconvexity_result levi;
    std::optional<sclc_result> sclc;
    std::optional<inversion_result> inv;
};

analysis run_analysis(const surface_germ& germ, const config& cfg);

struct verify_line {
    std::string name;
    double residual;
    bool pass;
};

/// The structural identity suite: complex-structure relations, the
/// Maurer-Cartan identity, omega^{n+1}_0 = 0, semi-basic rank, the forced
/// second-order identities, recursion re-substitution, the index-1
/// redundancy identities, and the adapted-bundle relations.
std::vector<verify_line> verify_suite(const analysis& a, const config& cfg);

/// Same suite run against an externally supplied (possibly corrupted)
/// Maurer-Cartan table; used by the fault-injection hook.
std::vector<verify_line> verify_suite_on(const mc_pullback& mc, const config& cfg);

}  // namespace crproj
