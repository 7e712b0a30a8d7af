#include "crproj/convexity.hpp"

#include <random>

namespace crproj {

std::string to_string(levi_class c) {
    switch (c) {
        case levi_class::definite_negative: return "definite_negative";
        case levi_class::definite_positive: return "definite_positive";
        case levi_class::indefinite: return "indefinite";
        case levi_class::degenerate: return "degenerate";
    }
    return "?";
}

pseudoconvexity_result pseudoconvexity(const second_order_data& d, double zero_tol) {
    const int k = d.dim();
    Eigen::MatrixXcd H = cplx(0, 1) * d.L;
    Eigen::MatrixXcd Hs = 0.5 * (H + H.adjoint());  // symmetrize rounding noise
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Hs);
    pseudoconvexity_result r;
    r.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
    int pos = 0, neg = 0, zero = 0;
    for (double ev : r.eigenvalues) {
        if (ev > zero_tol)
            ++pos;
        else if (ev < -zero_tol)
            ++neg;
        else
            ++zero;
    }
    if (zero > 0)
        r.classification = levi_class::degenerate;
    else if (pos == k)
        r.classification = levi_class::definite_positive;
    else if (neg == k)
        r.classification = levi_class::definite_negative;
    else
        r.classification = levi_class::indefinite;
    return r;
}

cplx p_form(const Eigen::MatrixXcd& P, const Eigen::VectorXcd& z) { return (z.transpose() * P * z)(0, 0); }

cplx l_form(const Eigen::MatrixXcd& L, const Eigen::VectorXcd& z) { return (z.transpose() * L * z.conjugate())(0, 0); }

namespace {

double sclc_gap(const second_order_data& d, const Eigen::VectorXcd& z) {
    return std::abs(l_form(d.L, z)) - std::abs(p_form(d.P, z));
}

}  // namespace

sclc_result sclc_test(const second_order_data& d, const sclc_options& opt) {
    auto pc = pseudoconvexity(d);
    if (!pc.definite()) throw domain_error("sclc_test requires a definite Levi form (strong pseudoconvexity)");

    const int k = d.dim();
    sclc_result res;

    Eigen::VectorXcd best = Eigen::VectorXcd::Zero(k);
    double best_gap = 0;

    if (k == 1) {
        // |Im(p e^{2 i t})| sweeps [0, |p|]; the margin is |l| - |p|
        best.resize(1);
        best(0) = 1.0;
        best_gap = std::abs(d.L(0, 0)) - std::abs(d.P(0, 0));
    } else {
        std::mt19937_64 rng(opt.seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        auto random_unit = [&]() {
            Eigen::VectorXcd z(k);
            for (int i = 0; i < k; ++i) z(i) = cplx(gauss(rng), gauss(rng));
            return Eigen::VectorXcd(z / z.norm());
        };
        std::vector<std::pair<double, Eigen::VectorXcd>> pool;
        for (int s = 0; s < opt.samples; ++s) {
            Eigen::VectorXcd z = random_unit();
            pool.emplace_back(sclc_gap(d, z), z);
        }
        std::sort(pool.begin(), pool.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        best_gap = pool[0].first;
        best = pool[0].second;
        int starts = std::min<int>(opt.refinements, static_cast<int>(pool.size()));
        for (int s = 0; s < starts; ++s) {
            Eigen::VectorXcd z = pool[s].second;
            double g = pool[s].first;
            double step = 0.1;
            for (int it = 0; it < 200 && step > 1e-12; ++it) {
                // numeric gradient on the real parametrization, projected back
                Eigen::VectorXcd grad(k);
                const double h = 1e-7;
                for (int i = 0; i < k; ++i) {
                    for (int part = 0; part < 2; ++part) {
                        Eigen::VectorXcd zp = z;
                        cplx dz = part == 0 ? cplx(h, 0) : cplx(0, h);
                        zp(i) += dz;
                        zp /= zp.norm();
                        double gp = sclc_gap(d, zp);
                        if (part == 0)
                            grad(i) = cplx((gp - g) / h, 0);
                        else
                            grad(i) += cplx(0, (gp - g) / h);
                    }
                }
                double gn = grad.norm();
                if (gn < 1e-14) break;
                Eigen::VectorXcd zn = z - step * grad / gn;
                zn /= zn.norm();
                double g2 = sclc_gap(d, zn);
                if (g2 < g) {
                    z = zn;
                    g = g2;
                    step *= 1.4;
                } else {
                    step *= 0.5;
                }
            }
            if (g < best_gap) {
                best_gap = g;
                best = z;
            }
        }
    }

    res.margin = best_gap;
    res.sclc = best_gap > opt.threshold;
    if (!res.sclc) {
        // rotate the phase so that Im P(z,z) attains |P(z,z)|
        cplx p = p_form(d.P, best);
        double theta = std::abs(p) == 0.0 ? 0.0 : 0.5 * (M_PI / 2 - std::arg(p));
        res.witness = best * std::exp(cplx(0, theta));
    }
    return res;
}

Eigen::MatrixXcd pl_block(const Eigen::MatrixXcd& P, const Eigen::MatrixXcd& L) {
    const int k = static_cast<int>(P.rows());
    Eigen::MatrixXcd blk(2 * k, 2 * k);
    blk.topLeftCorner(k, k) = P;
    blk.topRightCorner(k, k) = L;
    blk.bottomLeftCorner(k, k) = L.transpose();
    blk.bottomRightCorner(k, k) = -P.conjugate();
    return blk;
}

inversion_result invert_pl(const second_order_data& d, double cond_guard) {
    const int k = d.dim();
    Eigen::FullPivLU<Eigen::MatrixXcd> llu(d.L);
    if (!llu.isInvertible()) throw domain_error("invert_pl: L is singular");
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(d.L);
    double cond = svd.singularValues()(0) / svd.singularValues()(k - 1);
    if (!(cond < cond_guard)) throw domain_error("invert_pl: L is numerically singular");

    Eigen::MatrixXcd linv_p = llu.solve(d.P);
    Eigen::MatrixXcd A = linv_p.conjugate();  // conj(L^{-1} P)
    Eigen::MatrixXcd inner = d.P * A - d.L;
    Eigen::FullPivLU<Eigen::MatrixXcd> ilu(inner);
    if (!ilu.isInvertible()) throw domain_error("invert_pl: block matrix is singular (SCLC fails)");
    Eigen::MatrixXcd Q = A * ilu.inverse();
    Eigen::MatrixXcd Minner = d.P.conjugate() * linv_p - d.L.conjugate();
    Eigen::FullPivLU<Eigen::MatrixXcd> mlu(Minner);
    if (!mlu.isInvertible()) throw domain_error("invert_pl: block matrix is singular (SCLC fails)");
    Eigen::MatrixXcd M = mlu.inverse();

    Eigen::MatrixXcd prod = pl_block(d.P, d.L) * pl_block(Q, M);
    double resid = (prod - Eigen::MatrixXcd::Identity(2 * k, 2 * k)).cwiseAbs().maxCoeff();
    return inversion_result{Q, M, resid};
}

}  // namespace crproj
