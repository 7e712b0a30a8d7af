#include "crproj/adaptation.hpp"

namespace crproj {

block_motion block_motion::identity(int m) {
    return block_motion{cplx(1, 0), Eigen::MatrixXcd::Identity(m - 1, m - 1), cplx(1, 0)};
}

Eigen::MatrixXcd block_motion::matrix(int m) const {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(m + 1, m + 1);
    g(0, 0) = g00;
    g.block(1, 1, m - 1, m - 1) = gab;
    g(m, m) = gmm;
    return g;
}

shear_motion shear_motion::identity(int m) {
    return shear_motion{Eigen::VectorXcd::Zero(m - 1), cplx(0, 0), Eigen::VectorXcd::Zero(m - 1)};
}

Eigen::MatrixXcd shear_motion::matrix(int m) const {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Identity(m + 1, m + 1);
    for (int al = 1; al < m; ++al) {
        g(0, al) = g0a(al - 1);
        g(al, m) = gam(al - 1);
    }
    g(0, m) = g0m;
    return g;
}

bool shear_motion::is_identity(double tol) const {
    return g0a.cwiseAbs().maxCoeff() <= tol && gam.cwiseAbs().maxCoeff() <= tol && std::abs(g0m) <= tol;
}

second_order_data apply_block(const second_order_data& d, const block_motion& g) {
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(g.gab);
    if (!lu.isInvertible() || std::abs(g.g00) == 0.0 || std::abs(g.gmm) == 0.0)
        throw domain_error("apply_block: singular block motion");
    second_order_data r;
    r.P = (g.gab.transpose() * d.P * g.gab) / (g.g00 * g.gmm);
    r.L = (g.gab.transpose() * d.L * g.gab.conjugate()) / (std::conj(g.g00) * g.gmm);
    return r;
}

second_order_at0 apply_shear(const second_order_at0& d, const shear_motion& g) {
    second_order_at0 r = d;
    r.Pam = d.Pam + g.g0a + d.pl.P * g.gam + d.pl.L * g.gam.conjugate();
    cplx mix = (g.g0a.transpose() * g.gam)(0, 0);
    // the two trailing sums drop out when P_{alpha m} vanishes before and
    // after the motion, which is the only case the reduction lemma needs
    cplx old_mix = (g.gam.transpose() * d.Pam)(0, 0);
    cplx new_mix = (g.gam.transpose() * r.Pam)(0, 0);
    auto skew = [](cplx z) { return z - std::conj(z); };
    r.Pmm = d.Pmm + skew(mix) - 2.0 * skew(g.g0m) - skew(old_mix) - skew(new_mix);
    return r;
}

shear_motion residual_shear(const second_order_data& d, const Eigen::VectorXcd& gam, cplx re_g0m) {
    const int m = static_cast<int>(d.P.rows()) + 1;
    shear_motion g = shear_motion::identity(m);
    g.gam = gam;
    g.g0a = -(d.P * gam + d.L * gam.conjugate());
    // Im(g0m) solves the second constraint so P_{mm} stays zero
    cplx mix = (g.g0a.transpose() * g.gam)(0, 0);
    g.g0m = cplx(re_g0m.real(), (mix - std::conj(mix)).imag() / 4.0);
    return g;
}

adaptation_result adapt_to_ps(const mc_pullback& mc, const invariant_tables& t, int p_max, bool strict) {
    const int m = mc.m;
    second_order_jets so = h_to_p_jets(t);
    basis_ptr b = so.Pmm.basis();

    cjmat g(m + 1, m + 1, b);
    for (int a = 0; a <= m; ++a) g(a, a) = cjet::constant(b, cplx(1, 0));
    for (int al = 1; al < m; ++al) g(0, al) = -so.Pam[al - 1];
    // P_{mm} = -2i h_{nn}; Im(g0m) = Im(P_{mm})/4 kills it
    g(0, m) = complexify(imag_part(so.Pmm) * 0.25) * cplx(0, 1);

    adaptation_result r;
    r.mc = transform_frame(mc, g);
    r.tables = compute_invariants(r.mc, p_max, strict);

    shear_motion s = shear_motion::identity(m);
    for (int al = 1; al < m; ++al) s.g0a(al - 1) = g(0, al).value0();
    s.g0m = g(0, m).value0();
    r.motion.kind = motion_kind::shear;
    r.motion.shear = s;
    r.motion.block = block_motion::identity(m);
    return r;
}

std::vector<cps_check> corollary_cps_check(const mc_pullback& mc, const invariant_tables& t, double tol) {
    const int n = mc.n();
    const int nv = 2 * mc.m - 1;
    std::vector<cps_check> out;
    auto value_resid = [&](const form& f) {
        double r = 0;
        for (int i = 0; i < nv; ++i) r = std::max(r, std::abs(f[i].value0()));
        return r;
    };
    auto push = [&](const std::string& name, double resid) { out.push_back({name, resid, resid <= tol}); };

    push("omega^n_1 = 0", value_resid(mc.omega[n][1]));
    push("omega^{n+1}_1 = omega^n_0", value_resid(mc.omega[n + 1][1] - mc.omega[n][0]));
    for (int sg = 2; sg < n; ++sg) {
        form res = mc.omega[n + 1][sg];
        for (int ta = 2; ta < n; ++ta) {
            midx key = sg <= ta ? midx{sg, ta} : midx{ta, sg};
            res = res - t.at(2, key) * mc.omega[ta][0];
        }
        push("omega^{n+1}_" + std::to_string(sg) + " = h omega^._0", value_resid(res));
    }
    push("omega^{n+1}_n = omega^1_0", value_resid(mc.omega[n + 1][n] - mc.omega[1][0]));
    push("omega^1_0 = -omega^n_{n+1}", value_resid(mc.omega[1][0] + mc.omega[n][n + 1]));
    return out;
}

}  // namespace crproj
