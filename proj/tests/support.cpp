#include "support.hpp"

namespace crproj::testing {

namespace {

const jet& h2e(const invariant_tables& t, int a, int b) { return t.at(2, a <= b ? midx{a, b} : midx{b, a}); }

}  // namespace

form oracle_h3_rhs(const mc_pullback& mc, const invariant_tables& t, int r, int s) {
    const int n = mc.n();
    form rhs = differential(h2e(t, r, s));
    rhs = rhs + h2e(t, r, s) * (mc.omega[0][0] + mc.omega[n + 1][n + 1]);
    for (int tt = 1; tt <= n; ++tt)
        rhs = rhs - h2e(t, r, tt) * mc.omega[tt][s] - h2e(t, tt, s) * mc.omega[tt][r];
    return rhs;
}

form oracle_h4_rhs(const mc_pullback& mc, const invariant_tables& t, int r, int s, int u) {
    const int n = mc.n();
    auto h3 = [&](int a, int b, int c) { return t.at(3, sorted_with(sorted_with(midx{a}, b), c)); };
    form rhs = differential(h3(r, s, u));
    rhs = rhs + h3(r, s, u) * (mc.omega[0][0] * 2.0 + mc.omega[n + 1][n + 1]);
    for (int tt = 1; tt <= n; ++tt) {
        rhs = rhs - h3(tt, s, u) * mc.omega[tt][r] - h3(r, tt, u) * mc.omega[tt][s] - h3(r, s, tt) * mc.omega[tt][u];
        rhs = rhs -
              (h2e(t, r, s) * h2e(t, u, tt) + h2e(t, s, u) * h2e(t, r, tt) + h2e(t, u, r) * h2e(t, s, tt)) *
                  mc.omega[tt][n + 1];
    }
    rhs = rhs + h2e(t, r, s) * mc.omega[0][u] + h2e(t, s, u) * mc.omega[0][r] + h2e(t, u, r) * mc.omega[0][s];
    return rhs;
}

namespace {

Eigen::MatrixXcd mat_exp(const Eigen::MatrixXcd& x) {
    const int n = static_cast<int>(x.rows());
    double norm = x.cwiseAbs().maxCoeff();
    int squarings = 0;
    Eigen::MatrixXcd s = x;
    while (norm > 0.25) {
        s /= 2.0;
        norm /= 2.0;
        ++squarings;
    }
    Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd sum = term;
    for (int k = 1; k <= 20; ++k) {
        term = term * s / double(k);
        sum += term;
    }
    for (int k = 0; k < squarings; ++k) sum = sum * sum;
    return sum;
}

}  // namespace

Eigen::MatrixXcd su1m_element(int m, std::uint64_t seed, double t) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto rc = [&]() { return cplx(u(rng), u(rng)); };

    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(m + 1, m + 1);
    // su(1,m) relations: conj(X^0_0) + X^m_m = 0, X^m_0 and X^0_m real,
    // conj(X^m_a) = i X^a_0, conj(X^a_m) = -i X^0_a, (X^a_b) in u(m-1), tr X = 0
    x(m, 0) = cplx(u(rng), 0);
    x(0, m) = cplx(u(rng), 0);
    for (int a = 1; a < m; ++a) {
        cplx xa0 = rc();
        cplx x0a = rc();
        x(a, 0) = xa0;
        x(0, a) = x0a;
        x(m, a) = std::conj(cplx(0, 1) * xa0);
        x(a, m) = std::conj(cplx(0, -1) * x0a);
    }
    // unitary block with imaginary diagonal
    for (int a = 1; a < m; ++a) {
        x(a, a) = cplx(0, u(rng));
        for (int b = a + 1; b < m; ++b) {
            cplx z = rc();
            x(a, b) = z;
            x(b, a) = -std::conj(z);
        }
    }
    cplx block_tr(0);
    for (int a = 1; a < m; ++a) block_tr += x(a, a);
    // X^0_0 = i s forces X^m_m = -conj(X^0_0) = i s; tr X = 2 i s + block_tr = 0
    x(0, 0) = cplx(0, -block_tr.imag() / 2.0);
    x(m, m) = -std::conj(x(0, 0));
    return mat_exp(t * x);
}

Eigen::MatrixXcd su1m_unitary_element(int m, double theta) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(m + 1, m + 1);
    // diag(mu, U, mu) with |mu| = 1 preserves q; det = mu^2 det U = 1
    if (m == 2) {
        cplx mu = std::exp(cplx(0, -theta / 2));
        a(0, 0) = mu;
        a(1, 1) = std::exp(cplx(0, theta));
        a(2, 2) = mu;
        return a;
    }
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(m - 1, m - 1);
    u(0, 0) = std::cos(theta);
    u(0, 1) = -std::sin(theta);
    u(1, 0) = std::sin(theta);
    u(1, 1) = std::cos(theta);  // det 1 rotation
    a(0, 0) = 1;
    a.block(1, 1, m - 1, m - 1) = u;
    a(m, m) = 1;
    return a;
}

double quadric_residual_on_graph(const surface_germ& g, std::uint64_t seed, int samples, double radius) {
    std::mt19937_64 rng(seed);
    double worst = 0;
    for (int s = 0; s < samples; ++s) {
        auto u = random_point(g.num_vars(), rng, radius);
        double ym = g.f.evaluate(u);
        // q(1, z) = 2 y^m + sum |z^alpha|^2
        double q = 2 * ym;
        for (int a = 1; a < g.m; ++a)
            q += u[var_x(g.m, a)] * u[var_x(g.m, a)] + u[var_y(g.m, a)] * u[var_y(g.m, a)];
        worst = std::max(worst, std::abs(q));
    }
    return worst;
}

double regraph_pointwise_residual(const surface_germ& g, const projective_map& map, const surface_germ& image,
                                  std::uint64_t seed, int samples, double radius) {
    std::mt19937_64 rng(seed);
    double worst = 0;
    for (int s = 0; s < samples; ++s) {
        auto u = random_point(g.num_vars(), rng, radius);
        double ym = g.f.evaluate(u);
        Eigen::VectorXcd v(g.m + 1);
        v(0) = 1.0;
        for (int a = 1; a < g.m; ++a) v(a) = cplx(u[var_x(g.m, a)], u[var_y(g.m, a)]);
        v(g.m) = cplx(u[var_x(g.m, g.m)], ym);
        Eigen::VectorXcd w = map.a * v;
        if (std::abs(w(0)) < 1e-9) continue;
        std::vector<double> zu(image.num_vars());
        for (int a = 1; a < image.m; ++a) {
            cplx z = w(a) / w(0);
            zu[var_x(image.m, a)] = z.real();
            zu[var_y(image.m, a)] = z.imag();
        }
        cplx zm = w(image.m) / w(0);
        zu[var_x(image.m, image.m)] = zm.real();
        worst = std::max(worst, std::abs(zm.imag() - image.f.evaluate(zu)));
    }
    return worst;
}

}  // namespace crproj::testing
