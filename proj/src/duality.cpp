#include "crproj/duality.hpp"

#include <random>

namespace crproj {

int nu_permutation(int n, int j) {
    if (j == 0) return n + 1;
    if (j == n + 1) return 0;
    if (j == 1) return n;
    if (j == n) return 1;
    return j % 2 == 0 ? j + 1 : j - 1;
}

second_order_data dual_second_order(const second_order_data& d) {
    inversion_result inv = invert_pl(d);
    second_order_data r;
    r.P = inv.Q;
    r.L = -inv.M;
    return r;
}

dual_third_data dual_third_order(const third_order_data& p3, const Eigen::MatrixXcd& Q, const Eigen::MatrixXcd& M) {
    const int k = static_cast<int>(Q.rows());
    dual_third_data r;
    r.Qabm.setZero(k, k);
    r.Qabbm.setZero(k, k);
    r.Qamm.setZero(k);
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
            cplx s1(0), s2(0);
            for (int g = 0; g < k; ++g)
                for (int e = 0; e < k; ++e) {
                    // Q^{ab m} = Q^{ag} P_{gem} Q^{eb} + Q^{ag} P_{g bar-e m} Q^{b bar-e}
                    //          - Q^{a bar-g} conj(P_{gem}) Q^{b bar-e} + Q^{a bar-g} P_{e bar-g m} Q^{eb}
                    s1 += Q(a, g) * p3.Pabm(g, e) * Q(e, b) + Q(a, g) * p3.Pabbm(g, e) * M(b, e) -
                          M(a, g) * std::conj(p3.Pabm(g, e)) * M(b, e) + M(a, g) * p3.Pabbm(e, g) * Q(e, b);
                    // Q^{a bar-b m} = Q^{ag} P_{gem} Q^{e bar-b} - Q^{ag} P_{g bar-e m} conj(Q^{eb})
                    //               + Q^{a bar-g} conj(P_{gem}) conj(Q^{eb}) + Q^{a bar-g} P_{e bar-g m} Q^{e bar-b}
                    s2 += Q(a, g) * p3.Pabm(g, e) * M(e, b) - Q(a, g) * p3.Pabbm(g, e) * std::conj(Q(e, b)) +
                          M(a, g) * std::conj(p3.Pabm(g, e)) * std::conj(Q(e, b)) + M(a, g) * p3.Pabbm(e, g) * M(e, b);
                }
            r.Qabm(a, b) = s1;
            r.Qabbm(a, b) = s2;
        }
        cplx s3(0);
        for (int g = 0; g < k; ++g) s3 += Q(a, g) * p3.Pamm(g) - M(a, g) * std::conj(p3.Pamm(g));
        r.Qamm(a) = s3;
    }
    return r;
}

std::string to_string(match_status s) {
    switch (s) {
        case match_status::match: return "match";
        case match_status::no_match: return "no_match";
        case match_status::indeterminate: return "indeterminate";
    }
    return "?";
}

namespace {

// Parameters -> block motion.  The scalars are locked to a common phase so
// that gmm / g00 stays real and the transformed L keeps iL Hermitian.
block_motion unpack(const Eigen::VectorXd& x, int k, double sigma) {
    block_motion g;
    double scale = x(0);
    double phase = x(1);
    g.g00 = std::exp(cplx(scale / 2, phase));
    g.gmm = sigma * std::exp(cplx(scale / 2, phase));
    g.gab.resize(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) g.gab(i, j) = cplx(x(2 + 2 * (i * k + j)), x(3 + 2 * (i * k + j)));
    return g;
}

Eigen::VectorXd residual_vec(const second_order_data& d, const Eigen::MatrixXcd& Ptgt, const Eigen::MatrixXcd& Ltgt,
                             const block_motion& g) {
    const int k = static_cast<int>(d.P.rows());
    second_order_data td = apply_block(d, g);
    Eigen::VectorXd r(2 * k * k + k * (k + 1));
    int idx = 0;
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) {
            cplx e = td.P(i, j) - Ptgt(i, j);
            r(idx++) = e.real();
            r(idx++) = e.imag();
        }
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            cplx e = td.L(i, j) - Ltgt(i, j);
            r(idx++) = e.real();
            r(idx++) = e.imag();
        }
    return r.head(idx).eval();
}

// signature of the Hermitian matrix iL, as (pos, neg)
std::pair<int, int> levi_signature(const Eigen::MatrixXcd& L, double tol = 1e-9) {
    Eigen::MatrixXcd H = cplx(0, 1) * L;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (H + H.adjoint()));
    int pos = 0, neg = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        if (es.eigenvalues()(i) > tol) ++pos;
        if (es.eigenvalues()(i) < -tol) ++neg;
    }
    return {pos, neg};
}

}  // namespace

orbit_match_result orbit_match(const second_order_data& d, const Eigen::MatrixXcd& Ptgt,
                               const Eigen::MatrixXcd& Ltgt, const orbit_options& opt) {
    const int k = static_cast<int>(d.P.rows());
    orbit_match_result best;
    best.residual = std::numeric_limits<double>::infinity();
    best.motion = block_motion::identity(k + 1);

    // block motions act on iL by congruence up to a real scalar of either
    // sign: the signature up to flip is an orbit invariant
    auto sig = levi_signature(d.L);
    auto sig_t = levi_signature(Ltgt);
    bool sig_ok = (sig == sig_t) || (sig.first == sig_t.second && sig.second == sig_t.first);
    if (!sig_ok) {
        best.status = match_status::no_match;
        best.obstruction = "levi signature (" + std::to_string(sig.first) + "," + std::to_string(sig.second) +
                           ") vs (" + std::to_string(sig_t.first) + "," + std::to_string(sig_t.second) + ")";
        best.residual = residual_vec(d, Ptgt, Ltgt, best.motion).norm();
        return best;
    }

    const int np = 2 + 2 * k * k;
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss(0.0, 0.5);

    for (int start = 0; start < opt.starts; ++start) {
        for (double sigma : {1.0, -1.0}) {
            Eigen::VectorXd x = Eigen::VectorXd::Zero(np);
            if (start > 0) {
                x(0) = gauss(rng);
                x(1) = gauss(rng);
                for (int i = 0; i < k; ++i)
                    for (int j = 0; j < k; ++j) {
                        x(2 + 2 * (i * k + j)) = (i == j ? 1.0 : 0.0) + 0.6 * gauss(rng);
                        x(3 + 2 * (i * k + j)) = 0.6 * gauss(rng);
                    }
            } else {
                for (int i = 0; i < k; ++i) x(2 + 2 * (i * k + i)) = 1.0;
            }

            double lambda = 1e-3;
            Eigen::VectorXd r;
            try {
                r = residual_vec(d, Ptgt, Ltgt, unpack(x, k, sigma));
            } catch (const domain_error&) {
                continue;
            }
            double cost = r.squaredNorm();
            for (int it = 0; it < opt.iterations; ++it) {
                const double h = 1e-6;
                Eigen::MatrixXd J(r.size(), np);
                bool bad = false;
                for (int p = 0; p < np && !bad; ++p) {
                    Eigen::VectorXd xp = x;
                    xp(p) += h;
                    try {
                        J.col(p) = (residual_vec(d, Ptgt, Ltgt, unpack(xp, k, sigma)) - r) / h;
                    } catch (const domain_error&) {
                        bad = true;
                    }
                }
                if (bad) break;
                Eigen::MatrixXd A = J.transpose() * J;
                Eigen::VectorXd gvec = J.transpose() * r;
                bool improved = false;
                for (int tries = 0; tries < 8; ++tries) {
                    Eigen::MatrixXd Ad = A + lambda * Eigen::MatrixXd::Identity(np, np);
                    Eigen::VectorXd delta = Ad.ldlt().solve(-gvec);
                    Eigen::VectorXd xn = x + delta;
                    Eigen::VectorXd rn;
                    try {
                        rn = residual_vec(d, Ptgt, Ltgt, unpack(xn, k, sigma));
                    } catch (const domain_error&) {
                        lambda *= 10;
                        continue;
                    }
                    if (rn.squaredNorm() < cost) {
                        x = xn;
                        r = rn;
                        cost = rn.squaredNorm();
                        lambda = std::max(lambda * 0.3, 1e-12);
                        improved = true;
                        break;
                    }
                    lambda *= 10;
                }
                if (!improved || cost < 1e-28) break;
            }
            if (std::sqrt(cost) < best.residual) {
                best.residual = std::sqrt(cost);
                best.motion = unpack(x, k, sigma);
            }
        }
    }

    best.status = best.residual < opt.match_threshold ? match_status::match : match_status::indeterminate;
    return best;
}

orbit_match_result selfdual_second_order(const second_order_data& d, const orbit_options& opt) {
    second_order_data dual = dual_second_order(d);
    return orbit_match(d, dual.P, dual.L, opt);
}

selfdual_third_report selfdual_third_order(const mc_pullback& adapted_mc, const third_order_data& p3,
                                           const dual_third_data& q3, const block_motion& motion, int p_max) {
    const int m = adapted_mc.m;
    mc_pullback moved = transform_frame(adapted_mc, motion.matrix(m));
    invariant_tables tables = compute_invariants(moved, std::max(2, std::min(p_max, 3)));
    third_order_data p3m = compute_p3(moved, tables);

    selfdual_third_report r;
    r.r_abm = (p3m.Pabm - q3.Qabm).cwiseAbs().maxCoeff();
    r.r_abbm = (p3m.Pabbm + q3.Qabbm).cwiseAbs().maxCoeff();
    r.r_amm = (p3m.Pamm - q3.Qamm).cwiseAbs().maxCoeff();
    r.r_mmm = std::abs(p3m.Pmmm - p3.Pmmm);
    return r;
}

selfdual_h_report selfdual_h_version(const mc_pullback& adapted_mc, const invariant_tables& adapted_tables,
                                     const block_motion& motion, int p_max) {
    const int m = adapted_mc.m;
    const int n = adapted_mc.n();
    selfdual_h_report rep;

    k_tables k;
    try {
        k = compute_k(adapted_tables, p_max >= 3);
    } catch (const domain_error&) {
        rep.h_invertible = false;
        return rep;
    }

    mc_pullback moved = transform_frame(adapted_mc, motion.matrix(m));
    invariant_tables moved_tables = compute_invariants(moved, std::min(p_max, 3));

    auto nu = [&](int s) { return nu_permutation(n, s); };
    double r2 = 0;
    for (int s = 1; s <= n; ++s)
        for (int tt = s; tt <= n; ++tt) {
            int a = nu(s), b = nu(tt);
            double kv = k.k2(a - 1, b - 1).value0();
            r2 = std::max(r2, std::abs(moved_tables.at0(2, midx{s, tt}) - kv));
        }
    rep.order2 = r2;

    if (p_max >= 3) {
        double r3 = 0;
        for (int s = 1; s <= n; ++s)
            for (int tt = s; tt <= n; ++tt)
                for (int u = tt; u <= n; ++u) {
                    midx key = sorted_with(sorted_with(midx{nu(s)}, nu(tt)), nu(u));
                    auto it = k.k3.find(key);
                    if (it == k.k3.end()) throw internal_error("k3 entry missing");
                    r3 = std::max(r3, std::abs(moved_tables.at0(3, midx{s, tt, u}) - it->second.value0()));
                }
        rep.order3 = r3;
    }
    return rep;
}

}  // namespace crproj
