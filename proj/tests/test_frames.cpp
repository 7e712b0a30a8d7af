#include <doctest.h>

#include "crproj/frames.hpp"
#include "support.hpp"

using namespace crproj;
namespace ct = crproj::testing;

namespace {

surface_germ flat_germ(int m, int order) {
    return surface_germ{m, order, jet(monomial_basis::get(2 * m - 1, order))};
}

double identity_residual(const jmat& a, const jmat& b) {
    jmat prod = a * b;
    double r = 0;
    for (int i = 0; i < prod.rows(); ++i)
        for (int j = 0; j < prod.cols(); ++j) {
            jet e = prod(i, j);
            if (i == j) e = e - 1.0;
            r = std::max(r, e.max_abs());
        }
    return r;
}

}  // namespace

TEST_CASE("coframe is dual to the frame") {
    for (int m : {2, 3}) {
        surface_germ q = hyperquadric(m, 5);
        frame_section s = build_section(q);
        CHECK(identity_residual(s.Einv, s.E) < 1e-10);
        CHECK(identity_residual(s.E, s.Einv) < 1e-10);
    }
    surface_germ g = random_germ(2, 5, 3);
    frame_section s = build_section(g);
    CHECK(identity_residual(s.Einv, s.E) < 1e-10);
}

TEST_CASE("flat germ gives the coordinate frame") {
    surface_germ g = flat_germ(2, 4);
    frame_section s = build_section(g);
    // all frame vectors at 0 are coordinate vectors
    Eigen::MatrixXd e0 = s.E.at0();
    CHECK((e0 - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);
    // with f = 0 the delta corrections vanish identically
    CHECK(s.E(4, 2).max_abs() == 0.0);  // x^m component of e_2
    CHECK(max_abs_diff(s.delta, jet::constant(s.delta.basis(), 1.0)) == 0.0);

    mc_pullback mc = pullback_mc(s);
    const int n = mc.n();
    // the curvature-type components vanish identically (omega^{n+1}_1 = omega^n_0
    // is forced by the complex structure and stays dx^m)
    for (int sidx = 2; sidx <= n; ++sidx) CHECK(mc.omega[n + 1][sidx].max_abs() == 0.0);
    for (int sg = 2; sg < n; ++sg) CHECK(mc.omega[n][sg].max_abs() == 0.0);
    CHECK(max_abs_diff(mc.omega[n + 1][1][var_x(2, 2)], jet::constant(mc.omega[0][0][0].basis(), 1.0)) == 0.0);
}

TEST_CASE("frame vectors at the base point are coordinate vectors") {
    surface_germ g = random_germ(3, 5, 11);
    frame_section s = build_section(g);
    Eigen::MatrixXd e0 = s.E.at0();
    CHECK((e0 - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pulled-back omega at 0 matches the local-coordinate table") {
    const int m = 2;
    surface_germ g = random_germ(m, 5, 19);
    frame_section s = build_section(g);
    mc_pullback mc = pullback_mc(s);
    const int n = 2 * m;
    const int nv = 2 * m - 1;

    auto comp0 = [&](int j, int k) {
        std::vector<double> v(nv);
        for (int i = 0; i < nv; ++i) v[i] = mc.omega[j][k][i].value0();
        return v;
    };
    auto unit = [&](int i) {
        std::vector<double> v(nv, 0.0);
        v[i] = 1.0;
        return v;
    };
    auto close = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double r = 0;
        for (int i = 0; i < nv; ++i) r = std::max(r, std::abs(a[i] - b[i]));
        return r < 1e-12;
    };
    auto df_at0 = [&](int var) {
        jet d = g.f.partial(var);
        std::vector<double> v(nv);
        for (int i = 0; i < nv; ++i) v[i] = d.partial(i).value0();
        return v;
    };

    for (int al = 1; al < m; ++al) {
        CHECK(close(comp0(2 * al, 0), unit(var_x(m, al))));       // omega^{2a}_0 = dx^a
        CHECK(close(comp0(2 * al + 1, 0), unit(var_y(m, al))));   // omega^{2a+1}_0 = dy^a
        std::vector<double> neg = unit(var_y(m, al));
        for (auto& v : neg) v = -v;
        CHECK(close(comp0(2 * al, 1), neg));                      // omega^{2a}_1 = -dy^a
        CHECK(close(comp0(2 * al + 1, 1), unit(var_x(m, al))));   // omega^{2a+1}_1 = dx^a
        CHECK(close(comp0(n, 2 * al), df_at0(var_y(m, al))));     // omega^n_{2b} = d f_{y^b}
        CHECK(close(comp0(n + 1, 2 * al), df_at0(var_x(m, al)))); // omega^{n+1}_{2b} = d f_{x^b}
        CHECK(close(comp0(n + 1, 2 * al + 1), df_at0(var_y(m, al))));
    }
    CHECK(close(comp0(n, 0), unit(var_x(m, m))));      // omega^n_0 = dx^m
    CHECK(close(comp0(n + 1, 1), unit(var_x(m, m))));  // omega^{n+1}_1 = dx^m
    CHECK(close(comp0(n + 1, n), df_at0(var_x(m, m))));
    std::vector<double> negdfm = df_at0(var_x(m, m));
    for (auto& v : negdfm) v = -v;
    CHECK(close(comp0(n, n + 1), negdfm));  // omega^n_{n+1} = -d f_{x^m}

    // everything else vanishes at the base point
    std::vector<std::pair<int, int>> nonzero;
    for (int al = 1; al < m; ++al) {
        nonzero.insert(nonzero.end(), {{2 * al, 0}, {2 * al + 1, 0}, {2 * al, 1}, {2 * al + 1, 1},
                                        {n, 2 * al}, {n, 2 * al + 1}, {n + 1, 2 * al}, {n + 1, 2 * al + 1}});
    }
    nonzero.insert(nonzero.end(), {{n, 0}, {n + 1, 1}, {n, n + 1}, {n + 1, n}});
    for (int j = 0; j < 2 * m + 2; ++j)
        for (int k = 0; k < 2 * m + 2; ++k) {
            bool expected_nonzero = false;
            for (auto [a, b] : nonzero) expected_nonzero |= (a == j && b == k);
            if (!expected_nonzero) {
                double at0 = 0;
                for (int i = 0; i < nv; ++i) at0 = std::max(at0, std::abs(mc.omega[j][k][i].value0()));
                CHECK(at0 < 1e-12);
            }
        }
}

TEST_CASE("complex structure relations hold coefficient-exactly") {
    for (int m : {2, 3}) {
        surface_germ g = random_germ(m, 5, 29 + m);
        mc_pullback mc = pullback_mc(build_section(g));
        CHECK(complex_structure_residual(mc) < 1e-12);
        CHECK(semibasic_normal_residual(mc) < 1e-12);
    }
}

TEST_CASE("maurer-cartan identity holds to truncation") {
    surface_germ g = random_germ(2, 5, 31);
    mc_pullback mc = pullback_mc(build_section(g));
    CHECK(maurer_cartan_residual(mc) < 1e-8);
    CHECK(maurer_cartan_residual_complex(mc) < 1e-8);

    surface_germ q = hyperquadric(3, 5);
    mc_pullback mcq = pullback_mc(build_section(q));
    CHECK(maurer_cartan_residual(mcq) < 1e-10);
}

TEST_CASE("semi-basic forms have full rank at 0") {
    for (int m : {2, 3}) {
        surface_germ g = random_germ(m, 4, 37 + m);
        mc_pullback mc = pullback_mc(build_section(g));
        CHECK(semibasic_rank(mc) == 2 * m - 1);
    }
}

TEST_CASE("transform_frame with the identity changes nothing") {
    surface_germ g = random_germ(2, 5, 41);
    mc_pullback mc = pullback_mc(build_section(g));
    mc_pullback moved = transform_frame(mc, Eigen::MatrixXcd::Identity(3, 3));
    double r = 0;
    for (int j = 0; j < 6; ++j)
        for (int k = 0; k < 6; ++k)
            for (int i = 0; i < 3; ++i) {
                int o = std::min(moved.omega[j][k][i].order(), mc.omega[j][k][i].order());
                r = std::max(r, max_abs_diff(moved.omega[j][k][i].truncated(o), mc.omega[j][k][i].truncated(o)));
            }
    CHECK(r < 1e-12);
}

TEST_CASE("transform_frame preserves the structure relations") {
    surface_germ g = random_germ(2, 5, 43);
    mc_pullback mc = pullback_mc(build_section(g));
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(3, 3);
    a(0, 1) = cplx(0.2, -0.1);
    a(1, 1) = cplx(1.1, 0.05);
    a(0, 2) = cplx(-0.03, 0.2);
    mc_pullback moved = transform_frame(mc, a);
    CHECK(complex_structure_residual(moved) < 1e-12);
    CHECK(maurer_cartan_residual(moved) < 1e-8);
}

TEST_CASE("fault injection breaks the maurer-cartan identity") {
    surface_germ g = hyperquadric(2, 5);
    mc_pullback mc = pullback_mc(build_section(g));
    corrupt_component(mc, 2, 3, 1e-3);
    CHECK(maurer_cartan_residual(mc) > 1e-6);
}

TEST_CASE("frame satisfies J e_{2a} = e_{2a+1}") {
    surface_germ g = random_germ(2, 5, 47);
    frame_section s = build_section(g);
    const int dv = 6;
    double r = 0;
    for (int a = 0; a <= 2; ++a)
        for (int row = 0; row <= 2; ++row) {
            // J maps the x-component of each complex coordinate to y and y to -x
            r = std::max(r, max_abs_diff(s.E(2 * row + 1, 2 * a), s.E(2 * row, 2 * a + 1) * -1.0));
            r = std::max(r, max_abs_diff(s.E(2 * row, 2 * a), s.E(2 * row + 1, 2 * a + 1)));
        }
    (void)dv;
    CHECK(r == 0.0);
}
