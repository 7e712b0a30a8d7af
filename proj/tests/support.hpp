#pragma once

#include <random>

#include "crproj/invariants.hpp"
#include "crproj/surface.hpp"

namespace crproj::testing {

/// Literal transcription of the explicit third-order relation, used as the
/// independent oracle for the general recursion:
/// h_{rst} omega^t_0 = d h_{rs} + h_{rs}(omega^0_0 + omega^{n+1}_{n+1})
///                   - h_{rt} omega^t_s - h_{ts} omega^t_r
form oracle_h3_rhs(const mc_pullback& mc, const invariant_tables& t, int r, int s);

/// Literal transcription of the fourth-order relation.
form oracle_h4_rhs(const mc_pullback& mc, const invariant_tables& t, int r, int s, int u);

inline jet random_jet(basis_ptr b, std::mt19937_64& rng, double amp = 1.0, int min_degree = 0) {
    std::uniform_real_distribution<double> u(-amp, amp);
    jet r(b);
    for (int rk = 0; rk < b->size(); ++rk) {
        if (b->degree(rk) < min_degree) continue;
        r.set_coefficient(b->exponent(rk), u(rng));
    }
    return r;
}

inline std::vector<double> random_point(int nv, std::mt19937_64& rng, double radius = 0.1) {
    std::uniform_real_distribution<double> u(-radius, radius);
    std::vector<double> x(nv);
    for (auto& v : x) v = u(rng);
    return x;
}

/// An element of SU(1,m) = Stab(q) with q = i(z^0 bar z^m - z^m bar z^0)
/// + sum |z^a|^2, built by exponentiating a random Lie-algebra element.
Eigen::MatrixXcd su1m_element(int m, std::uint64_t seed, double t);

/// Chart-linear element of SU(1,m): diag phases plus a unitary rotation of
/// the z^alpha block.  Fixes the base point; regraph reproduces the germ
/// coefficient-exactly.
Eigen::MatrixXcd su1m_unitary_element(int m, double theta);

/// max |q(v)| over sample points v = (1, z) with z on the graph of the germ.
double quadric_residual_on_graph(const surface_germ& g, std::uint64_t seed, int samples = 32,
                                 double radius = 0.05);

/// max over sample points of the implicit relation of `image` evaluated on
/// map(points of `g`): checks regraph against pointwise evaluation.
double regraph_pointwise_residual(const surface_germ& g, const projective_map& map, const surface_germ& image,
                                  std::uint64_t seed, int samples = 24, double radius = 0.02);

}  // namespace crproj::testing
