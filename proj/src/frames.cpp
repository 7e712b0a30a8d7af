#include "crproj/frames.hpp"

namespace crproj {

frame_section build_section(const surface_germ& g) {
    validate_germ(g);
    const int m = g.m;
    const int nv = 2 * m - 1;
    const int dv = 2 * m + 2;
    auto b = g.f.basis();

    jet f = g.f;
    jet fxm = f.partial(var_x(m, m));
    jet delta = (fxm * fxm + 1.0).reciprocal();

    auto cst = [&](double v) { return jet::constant(b, v); };
    auto var = [&](int v) { return jet::variable(b, v); };

    frame_section s;
    s.m = m;
    s.order = g.order;
    s.E = jmat(dv, dv, b);
    s.delta = delta;

    // V-coordinate rows are ordered (x^0, y^0, x^1, y^1, ..., x^m, y^m);
    // row index 2a is x^a, 2a+1 is y^a.
    auto rx = [&](int a) { return 2 * a; };
    auto ry = [&](int a) { return 2 * a + 1; };

    // e_0: the position vector (1, 0, x^1, y^1, ..., x^m, f)
    s.E(rx(0), 0) = cst(1.0);
    for (int a = 1; a < m; ++a) {
        s.E(rx(a), 0) = var(var_x(m, a));
        s.E(ry(a), 0) = var(var_y(m, a));
    }
    s.E(rx(m), 0) = var(var_x(m, m));
    s.E(ry(m), 0) = f;

    // e_1 = J e_0
    s.E(ry(0), 1) = cst(1.0);
    for (int a = 1; a < m; ++a) {
        s.E(rx(a), 1) = -var(var_y(m, a));
        s.E(ry(a), 1) = var(var_x(m, a));
    }
    s.E(rx(m), 1) = -f;
    s.E(ry(m), 1) = var(var_x(m, m));

    // e_{2alpha}, e_{2alpha+1} with the delta corrections
    for (int al = 1; al < m; ++al) {
        jet fxa = f.partial(var_x(m, al));
        jet fya = f.partial(var_y(m, al));
        jet A = delta * (fya - fxa * fxm);
        jet B = delta * (fxa + fya * fxm);
        s.E(rx(al), 2 * al) = cst(1.0);
        s.E(rx(m), 2 * al) = A;
        s.E(ry(m), 2 * al) = B;
        s.E(ry(al), 2 * al + 1) = cst(1.0);
        s.E(rx(m), 2 * al + 1) = -B;
        s.E(ry(m), 2 * al + 1) = A;
    }

    // e_n = e_{2m} and e_{n+1} = J e_{2m}
    s.E(rx(m), 2 * m) = cst(1.0);
    s.E(ry(m), 2 * m) = fxm;
    s.E(rx(m), 2 * m + 1) = -fxm;
    s.E(ry(m), 2 * m + 1) = cst(1.0);

    (void)nv;
    s.Einv = s.E.inverse();
    return s;
}

mc_pullback pullback_mc(const frame_section& s) {
    const int dv = s.dim_v();
    const int nv = 2 * s.m - 1;
    basis_ptr b = s.E(0, 0).basis();

    mc_pullback mc;
    mc.m = s.m;
    mc.order = s.order;
    mc.omega.assign(dv, std::vector<form>(dv, form(b)));

    // d e_j expanded in the frame: omega^k_j(component i) = sum_l Einv[k][l] d_i E[l][j]
    std::vector<std::vector<std::vector<jet>>> dE(dv, std::vector<std::vector<jet>>(dv));
    for (int l = 0; l < dv; ++l)
        for (int j = 0; j < dv; ++j) {
            dE[l][j].reserve(nv);
            for (int i = 0; i < nv; ++i) dE[l][j].push_back(s.E(l, j).partial(i));
        }
    for (int k = 0; k < dv; ++k)
        for (int j = 0; j < dv; ++j)
            for (int i = 0; i < nv; ++i) {
                jet acc = mc.omega[k][j][i];
                for (int l = 0; l < dv; ++l) {
                    if (s.Einv(k, l).nnz() == 0 || dE[l][j][i].nnz() == 0) continue;
                    acc = acc + s.Einv(k, l) * dE[l][j][i];
                }
                mc.omega[k][j][i] = acc;
            }
    return mc;
}

jmat realify(const cjmat& g, int m) {
    const int dc = m + 1;
    if (g.rows() != dc || g.cols() != dc) throw internal_error("realify: wrong matrix size");
    basis_ptr b = g(0, 0).basis();
    jmat r(2 * dc, 2 * dc, b);
    for (int bb = 0; bb < dc; ++bb)
        for (int a = 0; a < dc; ++a) {
            jet re = real_part(g(bb, a));
            jet im = imag_part(g(bb, a));
            r(2 * bb, 2 * a) = re;
            r(2 * bb + 1, 2 * a + 1) = re;
            r(2 * bb, 2 * a + 1) = -im;
            r(2 * bb + 1, 2 * a) = im;
        }
    return r;
}

mc_pullback transform_frame(const mc_pullback& mc, const cjmat& g) {
    const int dv = mc.dim_v();
    const int nv = 2 * mc.m - 1;
    jmat G = realify(g, mc.m);
    jmat Ginv = G.inverse();
    basis_ptr b = G(0, 0).basis();

    mc_pullback out;
    out.m = mc.m;
    out.order = mc.order;
    out.omega.assign(dv, std::vector<form>(dv, form(b)));

    for (int i = 0; i < nv; ++i) {
        jmat Wi(dv, dv, b);
        jmat dGi(dv, dv, b);
        bool has_dg = false;
        for (int j = 0; j < dv; ++j)
            for (int k = 0; k < dv; ++k) {
                Wi(j, k) = mc.omega[j][k][i];
                dGi(j, k) = G(j, k).partial(i);
                has_dg = has_dg || dGi(j, k).nnz() != 0;
            }
        // constant motions keep the full jet order
        jmat res = has_dg ? Ginv * (dGi + Wi * G) : Ginv * (Wi * G);
        for (int j = 0; j < dv; ++j)
            for (int k = 0; k < dv; ++k) out.omega[j][k][i] = res(j, k);
    }
    return out;
}

mc_pullback transform_frame(const mc_pullback& mc, const Eigen::MatrixXcd& g) {
    basis_ptr b = mc.omega[0][0][0].basis();
    cjmat gj(mc.m + 1, mc.m + 1, b);
    for (int i = 0; i <= mc.m; ++i)
        for (int j = 0; j <= mc.m; ++j) gj(i, j) = cjet::constant(b, g(i, j));
    return transform_frame(mc, gj);
}

double complex_structure_residual(const mc_pullback& mc) {
    double r = 0;
    for (int a = 0; a <= mc.m; ++a)
        for (int b = 0; b <= mc.m; ++b) {
            r = std::max(r, (mc.omega[2 * a][2 * b] - mc.omega[2 * a + 1][2 * b + 1]).max_abs());
            r = std::max(r, (mc.omega[2 * a][2 * b + 1] + mc.omega[2 * a + 1][2 * b]).max_abs());
        }
    return r;
}

double maurer_cartan_residual(const mc_pullback& mc) {
    const int dv = mc.dim_v();
    double r = 0;
    for (int j = 0; j < dv; ++j)
        for (int k = 0; k < dv; ++k) {
            two_form res = exterior_derivative(mc.omega[j][k]);
            for (int l = 0; l < dv; ++l) {
                if (mc.omega[j][l].max_abs() == 0 || mc.omega[l][k].max_abs() == 0) continue;
                res = res + wedge(mc.omega[j][l], mc.omega[l][k]);
            }
            r = std::max(r, res.max_abs());
        }
    return r;
}

double maurer_cartan_residual_complex(const mc_pullback& mc) {
    const int dc = mc.m + 1;
    double r = 0;
    std::vector<std::vector<cform>> Om(dc);
    for (int b = 0; b < dc; ++b)
        for (int a = 0; a < dc; ++a) Om[b].push_back(mc.Om(b, a));
    for (int b = 0; b < dc; ++b)
        for (int a = 0; a < dc; ++a) {
            ctwo_form res = exterior_derivative(Om[b][a]);
            for (int c = 0; c < dc; ++c) res = res + wedge(Om[b][c], Om[c][a]);
            r = std::max(r, res.max_abs());
        }
    return r;
}

double semibasic_normal_residual(const mc_pullback& mc) { return mc.omega[mc.n() + 1][0].max_abs(); }

int semibasic_rank(const mc_pullback& mc) {
    const int n = mc.n();
    const int nv = 2 * mc.m - 1;
    Eigen::MatrixXd rows(n + 1, nv);
    for (int s = 0; s <= n; ++s)
        for (int i = 0; i < nv; ++i) rows(s, i) = mc.omega[s][0][i].value0();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(rows);
    lu.setThreshold(1e-10);
    return static_cast<int>(lu.rank());
}

void corrupt_component(mc_pullback& mc, int j, int k, double eps) {
    std::vector<std::uint8_t> e(mc.omega[j][k][0].num_vars(), 0);
    mc.omega[j][k][0].set_coefficient(e, mc.omega[j][k][0].coefficient(e) + eps);
}

}  // namespace crproj
