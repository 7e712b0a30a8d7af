#include "crproj/invariants.hpp"

#include <algorithm>
#include <functional>

namespace crproj {

namespace {

std::string midx_str(const midx& s) {
    std::string r;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) r += ",";
        r += std::to_string(s[i]);
    }
    return r;
}

std::vector<midx> sorted_multisets(int n, int p) {
    std::vector<midx> out;
    midx cur;
    // non-decreasing sequences of length p with entries in 1..n
    std::function<void(int)> rec = [&](int lo) {
        if (static_cast<int>(cur.size()) == p) {
            out.push_back(cur);
            return;
        }
        for (int v = lo; v <= n; ++v) {
            cur.push_back(v);
            rec(v);
            cur.pop_back();
        }
    };
    rec(1);
    return out;
}

int count_ones(const midx& s) {
    int c = 0;
    for (int v : s)
        if (v == 1) ++c;
    return c;
}

// J^tau_sigma on the sigma-range 2..n-1: J^{2a+1}_{2a} = 1, J^{2a}_{2a+1} = -1.
int j_entry(int upper, int lower) {
    if (upper % 2 == 1 && lower == upper - 1) return 1;
    if (upper % 2 == 0 && lower == upper + 1) return -1;
    return 0;
}

}  // namespace

midx sorted_with(const midx& s, int extra) {
    midx r = s;
    r.insert(std::upper_bound(r.begin(), r.end(), extra), extra);
    return r;
}

const jet& invariant_tables::at(int p, const midx& s) const {
    auto it = h[p].find(s);
    if (it == h[p].end()) throw internal_error("invariant table lookup failed for level " + std::to_string(p) +
                                               " index " + midx_str(s));
    return it->second;
}

semibasic_expansion build_expansion(const mc_pullback& mc) {
    const int n = mc.n();
    const int nv = 2 * mc.m - 1;
    basis_ptr b = mc.omega[0][0][0].basis();
    semibasic_expansion ex;
    ex.m = mc.m;
    ex.n = n;
    jmat B(n - 1, nv, b);
    for (int t = 2; t <= n; ++t)
        for (int i = 0; i < nv; ++i) B(t - 2, i) = mc.omega[t][0][i];
    ex.Binv = B.inverse();
    ex.c = ex.expand(mc.omega[1][0]);
    return ex;
}

std::vector<jet> semibasic_expansion::expand(const form& xi) const {
    std::vector<jet> rhs;
    for (int i = 0; i < xi.size(); ++i) rhs.push_back(xi[i]);
    return solve_row(rhs, Binv);
}

invariant_tables solve_h2(const mc_pullback& mc, const semibasic_expansion& ex) {
    const int n = mc.n();
    basis_ptr b = mc.omega[0][0][0].basis();
    invariant_tables t;
    t.m = mc.m;
    t.n = n;
    t.p_max = 2;
    t.h.assign(3, {});

    // raw expansions: row[s][t] for t = 2..n, with the omega^1_0 component
    // folded back via the known first row h_{1t} = (0, ..., 0, 1)
    std::vector<std::vector<jet>> raw(n + 1);
    for (int s = 1; s <= n; ++s) raw[s] = ex.expand(mc.omega[n + 1][s]);

    // forced identities: row 1 must expand to delta_{tn}
    double row1 = 0;
    for (int tt = 2; tt <= n; ++tt) {
        double want = (tt == n) ? 1.0 : 0.0;
        row1 = std::max(row1, std::abs(raw[1][tt - 2].value0() - want));
    }
    t.h2_row1_residual = row1;

    auto known_h1 = [&](int s) { return s == n ? 1.0 : 0.0; };

    // h_{st} = raw[s][t] - h_{s1} c_t for t >= 2; h_{s1} = h_{1s} forced
    std::vector<std::vector<jet>> full(n + 1, std::vector<jet>(n + 1, jet::zero(b)));
    for (int s = 1; s <= n; ++s) {
        full[s][1] = jet::constant(ex.c[0].basis(), known_h1(s));
        for (int tt = 2; tt <= n; ++tt) full[s][tt] = raw[s][tt - 2] - ex.c[tt - 2] * known_h1(s);
    }
    // store row 1 exactly
    for (int tt = 1; tt <= n; ++tt) full[1][tt] = jet::constant(ex.c[0].basis(), known_h1(tt));

    double sym = 0;
    for (int s = 1; s <= n; ++s)
        for (int tt = s; tt <= n; ++tt) {
            jet v = full[s][tt];
            if (s != tt) {
                sym = std::max(sym, max_abs_diff(full[s][tt], full[tt][s]));
                v = (full[s][tt] + full[tt][s]) * 0.5;
            }
            t.h[2][midx{s, tt}] = v;
        }
    t.sym_residual = sym;
    return t;
}

form recursion_rhs(const mc_pullback& mc, const invariant_tables& t, const midx& s) {
    const int p = static_cast<int>(s.size());
    const int n = mc.n();
    basis_ptr b = mc.omega[0][0][0].basis();

    const jet& hs = t.at(p, s);
    form rhs = differential(hs);
    rhs = rhs + hs * double(p - 1) * mc.omega[0][0];
    rhs = rhs + hs * mc.omega[n + 1][n + 1];

    // p { (p-2) h_{(s_1..s_{p-1}} omega^0_{s_p)} - h_{t(s_1..s_{p-1}} omega^t_{s_p)} }
    for (int i = 0; i < p; ++i) {
        midx rest;
        for (int q = 0; q < p; ++q)
            if (q != i) rest.push_back(s[q]);
        if (p > 2) rhs = rhs + t.at(p - 1, rest) * double(p - 2) * mc.omega[0][s[i]];
        for (int tt = 1; tt <= n; ++tt) {
            const jet& hts = t.at(p, sorted_with(rest, tt));
            if (hts.nnz() == 0) continue;
            rhs = rhs - hts * mc.omega[tt][s[i]];
        }
    }

    // sum_j binom(p, j) { (j-1) h_{(A} h_{B)} omega^0_{n+1} - h_{t(A} h_{B)} omega^t_{n+1} };
    // the symmetrization average cancels binom(p, j), leaving a plain sum
    // over position subsets A of size j
    for (int j = 1; j <= p - 2; ++j) {
        std::vector<int> pick(p, 0);
        std::fill(pick.begin(), pick.begin() + j, 1);
        std::sort(pick.begin(), pick.end());
        // iterate subsets via permutations of the 0/1 mask
        do {
            midx A, B;
            for (int q = 0; q < p; ++q) (pick[q] ? A : B).push_back(s[q]);
            std::sort(A.begin(), A.end());
            std::sort(B.begin(), B.end());
            const jet& hB = t.at(p - j, B);
            if (j >= 2) {
                const jet& hA = t.at(j, A);
                jet prod = hA * hB;
                if (j - 1 != 0 && prod.nnz() != 0) rhs = rhs + prod * double(j - 1) * mc.omega[0][n + 1];
            }
            for (int tt = 1; tt <= n; ++tt) {
                const jet& htA = t.at(j + 1, sorted_with(A, tt));
                if (htA.nnz() == 0 || hB.nnz() == 0) continue;
                rhs = rhs - (htA * hB) * mc.omega[tt][n + 1];
            }
        } while (std::next_permutation(pick.begin(), pick.end()));
    }

    (void)b;
    return rhs;
}

void recurse_h(const mc_pullback& mc, const semibasic_expansion& ex, invariant_tables& t, bool strict) {
    const int p = t.p_max;
    const int n = t.n;
    basis_ptr b = ex.c[0].basis();
    t.h.resize(p + 2);

    auto rows = sorted_multisets(n, p);
    std::stable_sort(rows.begin(), rows.end(),
                     [](const midx& a, const midx& b2) { return count_ones(a) > count_ones(b2); });

    auto& next = t.h[p + 1];
    next[midx(p + 1, 1)] = jet::zero(b);  // all-ones entry vanishes (index-1 redundancy)

    double sym = t.sym_residual;
    for (const auto& s : rows) {
        form rhs = recursion_rhs(mc, t, s);
        std::vector<jet> raw = ex.expand(rhs);
        midx s1 = sorted_with(s, 1);
        auto it1 = next.find(s1);
        if (it1 == next.end())
            throw internal_error("recursion ordering error: missing index-1 entry " + midx_str(s1));
        const jet& h_s1 = it1->second;
        for (int tt = 2; tt <= n; ++tt) {
            jet v = raw[tt - 2] - ex.c[tt - 2] * h_s1;
            midx target = sorted_with(s, tt);
            auto it = next.find(target);
            if (it == next.end())
                next[target] = v;
            else
                sym = std::max(sym, max_abs_diff(it->second, v));
        }
    }
    t.sym_residual = sym;
    t.p_max = p + 1;
    t.resub_residual = std::max(t.resub_residual, resubstitution_residual(mc, t, p + 1));
    if (strict && t.resub_residual > 1e-5)
        throw internal_error("invariant recursion failed its defining identity, residual " +
                             std::to_string(t.resub_residual));
}

double resubstitution_residual(const mc_pullback& mc, const invariant_tables& t, int p) {
    const int n = t.n;
    double r = 0;
    for (const auto& s : sorted_multisets(n, p - 1)) {
        form rhs = recursion_rhs(mc, t, s);
        for (int tt = 1; tt <= n; ++tt) rhs = rhs - t.at(p, sorted_with(s, tt)) * mc.omega[tt][0];
        r = std::max(r, rhs.max_abs());
    }
    return r;
}

invariant_tables compute_invariants(const mc_pullback& mc, int p_max, bool strict) {
    if (p_max < 2) throw domain_error("p_max must be at least 2");
    semibasic_expansion ex = build_expansion(mc);
    invariant_tables t = solve_h2(mc, ex);
    while (t.p_max < p_max) recurse_h(mc, ex, t, strict);
    return t;
}

std::vector<redundancy_check> verify_index1_redundancy(const invariant_tables& t, double tol) {
    const int n = t.n;
    std::vector<redundancy_check> out;
    auto push = [&](const std::string& name, double resid) { out.push_back({name, resid, resid <= tol}); };

    for (int s = 1; s <= n; ++s) push("h_{1,1," + std::to_string(s) + "}=0", std::abs(t.at0(3, midx{1, 1, s})));
    push("h_{1,n,n}=0", std::abs(t.at0(3, sorted_with(midx{1, n}, n))));
    for (int sg = 2; sg < n; ++sg) {
        double want = 0;
        for (int tau = 2; tau < n; ++tau)
            if (int jv = j_entry(tau, sg)) want -= jv * t.at0(2, sorted_with(midx{tau}, n));
        double got = t.at0(3, sorted_with(sorted_with(midx{1}, sg), n));
        push("h_{1," + std::to_string(sg) + ",n}+J h_{.,n}=0", std::abs(got - want));
    }
    for (int sg = 2; sg < n; ++sg)
        for (int ta = sg; ta < n; ++ta) {
            double want = 0;
            for (int nu = 2; nu < n; ++nu) {
                if (int jv = j_entry(nu, sg)) want -= jv * t.at0(2, sorted_with(midx{nu}, ta));
                if (int jv = j_entry(nu, ta)) want -= jv * t.at0(2, sorted_with(midx{sg}, nu));
            }
            double got = t.at0(3, sorted_with(sorted_with(midx{1}, sg), ta));
            push("h_{1," + std::to_string(sg) + "," + std::to_string(ta) + "} relation", std::abs(got - want));
        }
    return out;
}

second_order_jets h_to_p_jets(const invariant_tables& t) {
    const int m = t.m;
    const int n = t.n;
    basis_ptr b = t.at(2, midx{1, 1}).basis();
    second_order_jets r;
    r.m = m;
    r.P = cjmat(m - 1, m - 1, b);
    r.L = cjmat(m - 1, m - 1, b);
    auto h = [&](int s, int tt) { return t.at(2, s <= tt ? midx{s, tt} : midx{tt, s}); };
    for (int al = 1; al < m; ++al)
        for (int be = 1; be < m; ++be) {
            jet re_p = (h(2 * al, 2 * be + 1) + h(2 * al + 1, 2 * be)) * 0.5;
            jet im_p = (h(2 * al, 2 * be) - h(2 * al + 1, 2 * be + 1)) * 0.5;
            r.P(al - 1, be - 1) = make_complex(re_p, im_p);
            jet re_l = (h(2 * al + 1, 2 * be) - h(2 * al, 2 * be + 1)) * 0.5;
            jet im_l = (h(2 * al, 2 * be) + h(2 * al + 1, 2 * be + 1)) * 0.5;
            r.L(al - 1, be - 1) = make_complex(re_l, im_l);
        }
    for (int al = 1; al < m; ++al) r.Pam.push_back(make_complex(h(n, 2 * al + 1), h(n, 2 * al)));
    r.Pmm = make_complex(jet::zero(b), h(n, n) * -2.0);
    return r;
}

second_order_at0 h_to_p(const invariant_tables& t) {
    second_order_jets j = h_to_p_jets(t);
    const int m = t.m;
    second_order_at0 r;
    r.pl.P = j.P.at0();
    r.pl.L = j.L.at0();
    r.Pam.resize(m - 1);
    for (int al = 1; al < m; ++al) r.Pam(al - 1) = j.Pam[al - 1].value0();
    r.Pmm = j.Pmm.value0();
    return r;
}

complex_expansion build_complex_expansion(const mc_pullback& mc) {
    const int m = mc.m;
    const int nv = 2 * m - 1;
    basis_ptr b = mc.omega[0][0][0].basis();
    complex_expansion ex;
    ex.m = m;
    cjmat B(nv, nv, b);
    for (int be = 1; be < m; ++be) {
        cform om = mc.Om(be, 0);
        cform omc = conjugate(om);
        for (int i = 0; i < nv; ++i) {
            B(be - 1, i) = om[i];
            B(m - 1 + be - 1, i) = omc[i];
        }
    }
    cform omm = mc.Om(m, 0);
    for (int i = 0; i < nv; ++i) B(nv - 1, i) = omm[i];
    ex.Binv = B.inverse();
    return ex;
}

std::vector<cjet> complex_expansion::expand(const cform& xi) const {
    std::vector<cjet> rhs;
    for (int i = 0; i < xi.size(); ++i) rhs.push_back(xi[i]);
    return solve_row(rhs, Binv);
}

third_order_data compute_p3(const mc_pullback& mc, const invariant_tables& t, double adapt_tol) {
    const int m = mc.m;
    second_order_jets so = h_to_p_jets(t);
    for (int al = 0; al < m - 1; ++al)
        if (std::abs(so.Pam[al].value0()) > adapt_tol)
            throw domain_error("compute_p3 requires an adapted frame: P_{alpha m} != 0");
    if (std::abs(so.Pmm.value0()) > adapt_tol)
        throw domain_error("compute_p3 requires an adapted frame: P_{mm} != 0");

    complex_expansion cex = build_complex_expansion(mc);
    const int k = m - 1;

    auto om = [&](int b2, int a) { return mc.Om(b2, a); };
    cform om00 = om(0, 0);
    cform ommm = om(m, m);

    third_order_data r;
    r.Pabm.resize(k, k);
    r.Pabbm.resize(k, k);
    r.Pamm.resize(k);

    // copies of each coefficient from independent equations, for the
    // cross-equation residual
    Eigen::MatrixXcd pabm2(k, k), pabbm2(k, k);
    Eigen::VectorXcd pamm2(k);

    // expansions of the covariant derivatives of P and L
    for (int al = 1; al <= k; ++al) {
        for (int be = 1; be <= k; ++be) {
            cform cp = differential(so.P(al - 1, be - 1)) + so.P(al - 1, be - 1) * (om00 + ommm);
            cform cl = differential(so.L(al - 1, be - 1)) + so.L(al - 1, be - 1) * (conjugate(om00) + ommm);
            for (int ga = 1; ga <= k; ++ga) {
                cp = cp - so.P(ga - 1, be - 1) * om(ga, al) - so.P(al - 1, ga - 1) * om(ga, be);
                cl = cl - so.L(ga - 1, be - 1) * om(ga, al) - so.L(al - 1, ga - 1) * conjugate(om(ga, be));
            }
            auto ep = cex.expand(cp);
            auto el = cex.expand(cl);
            r.Pabm(al - 1, be - 1) = ep[2 * k].value0();
            r.Pabbm(al - 1, be - 1) = el[2 * k].value0();
        }
    }

    // second structure relation: Omega^0_alpha + P Omega^beta_m + L conj(Omega^beta_m)
    //      = -P_{alpha beta m} Omega^beta_0 - P_{alpha bar beta m} conj - P_{alpha mm} Omega^m_0
    for (int al = 1; al <= k; ++al) {
        cform lhs = om(0, al);
        for (int be = 1; be <= k; ++be)
            lhs = lhs + so.P(al - 1, be - 1) * om(be, m) + so.L(al - 1, be - 1) * conjugate(om(be, m));
        auto e = cex.expand(lhs);
        for (int be = 1; be <= k; ++be) {
            pabm2(al - 1, be - 1) = -e[be - 1].value0();
            pabbm2(al - 1, be - 1) = -e[k + be - 1].value0();
        }
        r.Pamm(al - 1) = -e[2 * k].value0();
    }

    // scalar structure relation: -2 (Omega^0_m - conj Omega^0_m)
    //      = P_{alpha mm} Omega^alpha_0 - conj(P_{alpha mm}) conj(Omega^alpha_0) - P_{mmm} Omega^m_0
    {
        cform o0m = om(0, m);
        cform lhs = (o0m - conjugate(o0m)) * cplx(-2.0, 0.0);
        auto e = cex.expand(lhs);
        for (int al = 1; al <= k; ++al) pamm2(al - 1) = e[al - 1].value0();
        r.Pmmm = -e[2 * k].value0();
    }

    double cross = 0;
    cross = std::max(cross, (r.Pabm - pabm2).cwiseAbs().maxCoeff());
    cross = std::max(cross, (r.Pabbm - pabbm2).cwiseAbs().maxCoeff());
    cross = std::max(cross, (r.Pamm - pamm2).cwiseAbs().maxCoeff());
    r.cross_residual = cross;

    double sym = 0;
    sym = std::max(sym, (r.Pabm - r.Pabm.transpose()).cwiseAbs().maxCoeff());
    sym = std::max(sym, (r.Pabbm.conjugate() + r.Pabbm.transpose()).cwiseAbs().maxCoeff());
    sym = std::max(sym, std::abs(std::conj(r.Pmmm) + r.Pmmm));
    r.sym_residual = sym;
    return r;
}

k_tables compute_k(const invariant_tables& t, bool with_k3) {
    const int n = t.n;
    basis_ptr b = t.at(2, midx{1, 1}).basis();
    jmat H(n, n, b);
    for (int s = 1; s <= n; ++s)
        for (int u = s; u <= n; ++u) {
            H(s - 1, u - 1) = t.at(2, midx{s, u});
            H(u - 1, s - 1) = H(s - 1, u - 1);
        }
    Eigen::MatrixXd h0 = H.at0();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(h0);
    lu.setThreshold(1e-10);
    if (!lu.isInvertible()) throw domain_error("compute_k: the matrix (h_{st}) is singular (degenerate hypersurface)");

    k_tables k;
    k.m = t.m;
    k.n = n;
    k.k2 = H.inverse();
    Eigen::MatrixXd prod = h0 * k.k2.at0();
    k.hk_identity_residual = (prod - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();

    if (with_k3 && t.p_max >= 3) {
        // k^{stu} = k^{sa} k^{tb} k^{uc} h_{abc}, staged as three contractions
        auto h3 = [&](int a, int bb, int c) {
            midx s = sorted_with(sorted_with(midx{a}, bb), c);
            return t.at(3, s);
        };
        // T1[a][b] over c fixed is wasteful; contract c last instead
        std::vector<std::vector<std::vector<jet>>> t1(
            n, std::vector<std::vector<jet>>(n, std::vector<jet>(n, jet::zero(b))));
        for (int s = 0; s < n; ++s)
            for (int bb = 0; bb < n; ++bb)
                for (int c = 0; c < n; ++c) {
                    jet acc = jet::zero(b);
                    for (int a = 0; a < n; ++a) {
                        const jet& h = h3(a + 1, bb + 1, c + 1);
                        if (h.nnz() == 0 || k.k2(s, a).nnz() == 0) continue;
                        acc = acc + k.k2(s, a) * h;
                    }
                    t1[s][bb][c] = acc;
                }
        std::vector<std::vector<std::vector<jet>>> t2 = t1;
        for (int s = 0; s < n; ++s)
            for (int u = 0; u < n; ++u)
                for (int c = 0; c < n; ++c) {
                    jet acc = jet::zero(b);
                    for (int bb = 0; bb < n; ++bb) {
                        if (t1[s][bb][c].nnz() == 0 || k.k2(u, bb).nnz() == 0) continue;
                        acc = acc + k.k2(u, bb) * t1[s][bb][c];
                    }
                    t2[s][u][c] = acc;
                }
        for (const auto& s : sorted_multisets(n, 3)) {
            jet acc = jet::zero(b);
            for (int c = 0; c < n; ++c) {
                if (t2[s[0] - 1][s[1] - 1][c].nnz() == 0 || k.k2(s[2] - 1, c).nnz() == 0) continue;
                acc = acc + k.k2(s[2] - 1, c) * t2[s[0] - 1][s[1] - 1][c];
            }
            k.k3[s] = acc;
        }
    }
    return k;
}

double k_recursion_residual(const mc_pullback& mc, const k_tables& k) {
    const int n = k.n;
    double r = 0;
    auto k3 = [&](int s, int tt, int u) {
        midx key = sorted_with(sorted_with(midx{s}, tt), u);
        auto it = k.k3.find(key);
        if (it == k.k3.end()) throw internal_error("k3 lookup failed");
        return it->second;
    };
    for (int s = 1; s <= n; ++s)
        for (int tt = s; tt <= n; ++tt) {
            form res = -differential(k.k2(s - 1, tt - 1));
            res = res + k.k2(s - 1, tt - 1) * (mc.omega[0][0] + mc.omega[n + 1][n + 1]);
            for (int u = 1; u <= n; ++u) {
                res = res - k.k2(u - 1, s - 1) * mc.omega[tt][u] - k.k2(u - 1, tt - 1) * mc.omega[s][u];
                res = res - k3(s, tt, u) * mc.omega[n + 1][u];
            }
            r = std::max(r, res.max_abs());
        }
    return r;
}

}  // namespace crproj
