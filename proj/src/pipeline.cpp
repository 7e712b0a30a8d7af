#include "crproj/pipeline.hpp"

#include <limits>

namespace crproj {

analysis run_analysis(const surface_germ& germ, const config& cfg) {
    cfg.validate();
    if (germ.m != cfg.m) throw domain_error("surface dimension does not match the configured m");
    analysis a;
    a.germ = germ;
    a.section = build_section(germ);
    a.mc = pullback_mc(a.section);
    a.tables = compute_invariants(a.mc, cfg.p_max);
    a.so = h_to_p(a.tables);
    a.adapted = adapt_to_ps(a.mc, a.tables, cfg.p_max);
    a.p3 = compute_p3(a.adapted.mc, a.adapted.tables);
    a.levi = pseudoconvexity(a.so.pl);
    if (a.levi.definite()) {
        sclc_options opt;
        opt.seed = cfg.seed;
        a.sclc = sclc_test(a.so.pl, opt);
        if (a.sclc->sclc) a.inv = invert_pl(a.so.pl);
    }
    return a;
}

std::vector<verify_line> verify_suite_on(const mc_pullback& mc, const config& cfg) {
    std::vector<verify_line> out;
    auto push = [&](const std::string& name, double resid, double tol) {
        out.push_back({name, resid, resid <= tol});
    };
    const double tol = cfg.tol_structural;

    push("complex structure relations", complex_structure_residual(mc), 1e-12);
    push("omega^{n+1}_0 = 0", semibasic_normal_residual(mc), 1e-12);
    push("maurer-cartan d omega = -omega ^ omega", maurer_cartan_residual(mc), tol);
    push("maurer-cartan d Omega = -Omega ^ Omega", maurer_cartan_residual_complex(mc), tol);
    int rank = semibasic_rank(mc);
    push("semi-basic forms full rank", rank == 2 * mc.m - 1 ? 0.0 : 1.0, 0.5);

    const double inf = std::numeric_limits<double>::infinity();
    try {
        invariant_tables t = compute_invariants(mc, std::min(3, cfg.p_max), /*strict=*/false);
        push("h_{1s} = 0, h_{1n} = 1", t.h2_row1_residual, 1e-12);
        push("h symmetry", t.sym_residual, tol);
        push("recursion re-substitution", t.resub_residual, tol);
        if (t.p_max >= 3)
            for (const auto& c : verify_index1_redundancy(t, tol)) push(c.name, c.residual, tol);
        try {
            adaptation_result ad = adapt_to_ps(mc, t, std::min(3, cfg.p_max), /*strict=*/false);
            push("adapted: re-substitution", ad.tables.resub_residual, tol);
            for (const auto& c : corollary_cps_check(ad.mc, ad.tables, tol)) push("adapted: " + c.name, c.residual, tol);
        } catch (const std::exception&) {
            push("adapted-bundle reduction", inf, tol);
        }
    } catch (const std::exception&) {
        push("invariant solve", inf, tol);
    }
    return out;
}

std::vector<verify_line> verify_suite(const analysis& a, const config& cfg) { return verify_suite_on(a.mc, cfg); }

}  // namespace crproj
