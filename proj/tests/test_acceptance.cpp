#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <random>

#include "crproj/pipeline.hpp"
#include "support.hpp"

using namespace crproj;
namespace ct = crproj::testing;

namespace {

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// the 50-germ corpus: m in {2, 3}, order 5, seeded
const std::vector<surface_germ>& corpus() {
    static std::vector<surface_germ> germs = [] {
        std::vector<surface_germ> out;
        for (int i = 0; i < 25; ++i) out.push_back(random_germ(2, 5, 10'000 + i, 0.3));
        for (int i = 0; i < 25; ++i) out.push_back(random_germ(3, 5, 20'000 + i, 0.3));
        return out;
    }();
    return germs;
}

struct corpus_entry {
    mc_pullback mc;
    invariant_tables tables;
    adaptation_result adapted;
};

const std::vector<corpus_entry>& corpus_runs() {
    static std::vector<corpus_entry> runs = [] {
        std::vector<corpus_entry> out;
        for (const auto& g : corpus()) {
            corpus_entry e;
            e.mc = pullback_mc(build_section(g));
            e.tables = compute_invariants(e.mc, 4);
            e.adapted = adapt_to_ps(e.mc, e.tables, 4);
            out.push_back(std::move(e));
        }
        return out;
    }();
    return runs;
}

// 50 random SCLC-passing second-order datasets, seeded
const std::vector<second_order_data>& sclc_corpus() {
    static std::vector<second_order_data> data = [] {
        std::vector<second_order_data> out;
        std::mt19937_64 rng(424242);
        std::uniform_real_distribution<double> u(-0.3, 0.3);
        while (out.size() < 50) {
            int k = 1 + static_cast<int>(out.size()) % 3;
            Eigen::MatrixXcd P(k, k), H(k, k);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) {
                    P(i, j) = cplx(u(rng), u(rng));
                    H(i, j) = 0.4 * cplx(u(rng), u(rng));
                }
            second_order_data d;
            d.P = ((P + P.transpose()) / 2).eval();
            d.L = cplx(0, -1) * (Eigen::MatrixXcd::Identity(k, k) + 0.5 * (H + H.adjoint()));
            if (pseudoconvexity(d).definite() && sclc_test(d).sclc) out.push_back(std::move(d));
        }
        return out;
    }();
    return data;
}

}  // namespace

TEST_CASE("criterion 1: hyperquadric ground truth, m = 2, 3, 4") {
    bool pass = true;
    double worst = 0, worst_time = 0;
    for (int m : {2, 3, 4}) {
        auto t0 = std::chrono::steady_clock::now();
        config cfg;
        cfg.m = m;
        cfg.order = 6;
        cfg.p_max = 4;
        analysis a = run_analysis(hyperquadric(m, 6), cfg);
        orbit_match_result o2 = selfdual_second_order(a.so.pl);
        double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        worst_time = std::max(worst_time, dt);

        Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(m - 1, m - 1);
        double r = a.so.pl.P.cwiseAbs().maxCoeff();
        r = std::max(r, (a.so.pl.L + cplx(0, 1) * id).cwiseAbs().maxCoeff());
        CHECK(r < 1e-10);
        CHECK(a.levi.definite());
        CHECK(a.sclc.has_value());
        CHECK(a.sclc->sclc);
        REQUIRE(a.inv.has_value());
        double rq = a.inv->Q.cwiseAbs().maxCoeff();
        rq = std::max(rq, (a.inv->M - cplx(0, 1) * id).cwiseAbs().maxCoeff());
        CHECK(rq < 1e-10);
        CHECK(o2.status == match_status::match);
        CHECK(o2.residual < 1e-9);
        CHECK(dt < 5.0);
        worst = std::max({worst, r, rq, o2.residual});
        pass = pass && r < 1e-10 && rq < 1e-10 && a.levi.definite() && a.sclc->sclc &&
               o2.status == match_status::match && o2.residual < 1e-9 && dt < 5.0;
    }
    report(1, pass, "quadric P/L/Q/M/self-duality, worst residual " + fmt(worst) + ", slowest m " +
                        fmt(worst_time) + "s");
}

TEST_CASE("criterion 2: forced identities on the corpus") {
    double worst = 0;
    for (const auto& e : corpus_runs()) {
        worst = std::max(worst, e.tables.h2_row1_residual);
        const int n = e.mc.n();
        for (int s = 2; s < n; ++s) worst = std::max(worst, std::abs(e.tables.at0(2, midx{1, s})));
        worst = std::max(worst, std::abs(e.tables.at0(2, midx{1, n}) - 1.0));
    }
    CHECK(worst < 1e-12);
    report(2, worst < 1e-12, "h_{1s} = 0, h_{1n} = 1 over 50 germs, worst " + fmt(worst));
}

TEST_CASE("criterion 3: redundancy and adapted-bundle identities on the corpus") {
    double worst = 0;
    for (const auto& e : corpus_runs()) {
        for (const auto& c : verify_index1_redundancy(e.adapted.tables)) worst = std::max(worst, c.residual);
        for (const auto& c : corollary_cps_check(e.adapted.mc, e.adapted.tables)) worst = std::max(worst, c.residual);
    }
    CHECK(worst < 1e-8);
    report(3, worst < 1e-8, "index-1 and adapted-bundle relations over 50 germs, worst " + fmt(worst));
}

TEST_CASE("criterion 4: structural suite on the corpus") {
    double worst = 0;
    for (const auto& e : corpus_runs()) {
        worst = std::max(worst, complex_structure_residual(e.mc));
        worst = std::max(worst, semibasic_normal_residual(e.mc));
        worst = std::max(worst, maurer_cartan_residual(e.mc));
    }
    CHECK(worst < 1e-8);
    report(4, worst < 1e-8, "maurer-cartan and complex-structure relations over 50 germs, worst " + fmt(worst));
}

TEST_CASE("criterion 5: recursion against the explicit low-order formulas") {
    double worst = 0;
    for (const auto& e : corpus_runs()) {
        const int n = e.mc.n();
        semibasic_expansion ex = build_expansion(e.mc);
        for (int r = 1; r <= n; ++r)
            for (int s = r; s <= n; ++s) {
                form diff = recursion_rhs(e.mc, e.tables, midx{r, s}) - ct::oracle_h3_rhs(e.mc, e.tables, r, s);
                worst = std::max(worst, diff.max_abs());
                auto coeffs = ex.expand(ct::oracle_h3_rhs(e.mc, e.tables, r, s));
                for (int tt = 2; tt <= n; ++tt)
                    worst = std::max(worst,
                                     std::abs(coeffs[tt - 2].value0() - e.tables.at0(3, sorted_with(midx{r, s}, tt))));
                for (int u = s; u <= n; ++u) {
                    form diff4 =
                        recursion_rhs(e.mc, e.tables, midx{r, s, u}) - ct::oracle_h4_rhs(e.mc, e.tables, r, s, u);
                    worst = std::max(worst, diff4.max_abs());
                }
            }
    }
    CHECK(worst < 1e-9);
    report(5, worst < 1e-9, "general recursion vs explicit order-3/4 formulas, worst " + fmt(worst));
}

TEST_CASE("criterion 6: levi cross-check against wirtinger derivatives") {
    double worst = 0;
    for (std::size_t gi = 0; gi < corpus().size(); ++gi) {
        const surface_germ& g = corpus()[gi];
        second_order_at0 so = h_to_p(corpus_runs()[gi].tables);
        for (int al = 1; al < g.m; ++al)
            for (int be = 1; be < g.m; ++be) {
                jet fxx = g.f.partial(var_x(g.m, al)).partial(var_x(g.m, be));
                jet fyy = g.f.partial(var_y(g.m, al)).partial(var_y(g.m, be));
                jet fxy = g.f.partial(var_x(g.m, al)).partial(var_y(g.m, be));
                jet fyx = g.f.partial(var_y(g.m, al)).partial(var_x(g.m, be));
                cplx fzzb = 0.25 * cplx(fxx.value0() + fyy.value0(), fxy.value0() - fyx.value0());
                cplx fzz = 0.25 * cplx(fxx.value0() - fyy.value0(), -(fxy.value0() + fyx.value0()));
                worst = std::max(worst, std::abs(fzzb - cplx(0, -0.5) * so.pl.L(al - 1, be - 1)));
                worst = std::max(worst, std::abs(fzz - cplx(0, -0.5) * so.pl.P(al - 1, be - 1)));
            }
    }
    CHECK(worst < 1e-10);
    report(6, worst < 1e-10, "-(i/2) P vs wirtinger second derivatives over 50 germs, worst " + fmt(worst));
}

TEST_CASE("criterion 7: inversion identity on 50 sclc datasets") {
    double worst = 0;
    for (const auto& d : sclc_corpus()) {
        inversion_result inv = invert_pl(d);
        worst = std::max(worst, inv.block_identity_residual);
        worst = std::max(worst, (inv.Q - inv.Q.transpose()).cwiseAbs().maxCoeff());
        worst = std::max(worst, (inv.M.conjugate().transpose() + inv.M).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-9);
    report(7, worst < 1e-9, "block inverse identity and Q/M symmetries, worst " + fmt(worst));
}

TEST_CASE("criterion 8: duality properties on the sclc corpus") {
    double worst = 0;
    bool all_sclc = true;
    for (const auto& d : sclc_corpus()) {
        second_order_data dual = dual_second_order(d);
        all_sclc = all_sclc && sclc_test(dual).sclc;
        second_order_data dd = dual_second_order(dual);
        worst = std::max(worst, (dd.P - d.P).cwiseAbs().maxCoeff());
        worst = std::max(worst, (dd.L - d.L).cwiseAbs().maxCoeff());
    }
    CHECK(all_sclc);
    CHECK(worst < 1e-8);
    report(8, all_sclc && worst < 1e-8,
           std::string("dual sclc on 50/50 datasets, double-dual worst ") + fmt(worst));
}

TEST_CASE("criterion 9: projective invariance under su(1,m)") {
    bool pass = true;
    double worst = 0;
    for (int m : {2, 3}) {
        config cfg;
        cfg.m = m;
        cfg.order = 6;
        cfg.p_max = 3;
        surface_germ q = hyperquadric(m, 6);
        analysis a0 = run_analysis(q, cfg);
        projective_map mv{ct::su1m_element(m, 99 + m, 0.15)};
        regraph_result rr = regraph(q, mv);
        analysis a1 = run_analysis(rr.germ, cfg);
        double p_resid = a1.so.pl.P.cwiseAbs().maxCoeff();
        worst = std::max(worst, p_resid);
        bool same_class = a1.levi.classification == a0.levi.classification;
        CHECK(p_resid < 1e-7);
        CHECK(same_class);
        pass = pass && p_resid < 1e-7 && same_class;
    }
    report(9, pass, "regraphed quadric keeps P = 0 and its levi class, worst |P| " + fmt(worst));
}

TEST_CASE("criterion 10: negative controls") {
    config cfg;
    cfg.order = 5;
    cfg.p_max = 3;
    analysis a = run_analysis(parse_surface("x1*y1", 2, 5), cfg);
    bool degenerate = a.levi.classification == levi_class::degenerate;
    CHECK(degenerate);

    second_order_data bad;
    bad.P = cplx(0, 2) * Eigen::MatrixXcd::Identity(2, 2);
    bad.L = cplx(0, -1) * Eigen::MatrixXcd::Identity(2, 2);
    sclc_result r = sclc_test(bad);
    CHECK_FALSE(r.sclc);
    double im_p = std::abs(std::imag(p_form(bad.P, r.witness)));
    double lv = std::abs(l_form(bad.L, r.witness));
    bool witness_ok = im_p >= lv - 1e-7;
    CHECK(witness_ok);
    report(10, degenerate && !r.sclc && witness_ok,
           "x1*y1 degenerate; |P| > |L| rejected with witness, margin " + fmt(r.margin));
}
