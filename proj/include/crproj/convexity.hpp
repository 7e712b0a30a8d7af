#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crproj/jet.hpp"

namespace crproj {

/// Second-order invariant data at a frame: P = (P_{alpha beta}) symmetric,
/// L = (P_{alpha bar beta}) with iL Hermitian, and (when the inversion is
/// defined) the dual data Q, M.
struct second_order_data {
    Eigen::MatrixXcd P;
    Eigen::MatrixXcd L;
    std::optional<Eigen::MatrixXcd> Q;
    std::optional<Eigen::MatrixXcd> M;

    int dim() const { return static_cast<int>(P.rows()); }
};

enum class levi_class { definite_negative, definite_positive, indefinite, degenerate };

std::string to_string(levi_class c);

struct pseudoconvexity_result {
    levi_class classification;
    std::vector<double> eigenvalues;  ///< eigenvalues of the Hermitian matrix iL
    bool definite() const {
        return classification == levi_class::definite_negative || classification == levi_class::definite_positive;
    }
};

/// Classify the Levi form by the eigenvalues of i*L (tolerance for zero 1e-9).
pseudoconvexity_result pseudoconvexity(const second_order_data& d, double zero_tol = 1e-9);

struct sclc_result {
    bool sclc;
    double margin;  ///< min over unit z of |L(z, bar z)| - |P(z, z)|
    Eigen::VectorXcd witness;  ///< on failure: unit z with |Im P(z,z)| >= |L(z, bar z)| - tol
};

struct sclc_options {
    int samples = 4096;
    int refinements = 64;
    double threshold = 1e-7;
    std::uint64_t seed = 12345;
};

/// Strong C-linear convexity test: true iff |Im P(z,z)| < |L(z,bar z)| for
/// all unit z, estimated by dense random sampling plus local descent (exact
/// for m = 2, where the margin is |l| - |p|).  Requires a definite Levi form.
sclc_result sclc_test(const second_order_data& d, const sclc_options& opt = {});

/// The inverse block data: [[P, L], [L^t, -bar P]]^{-1} = [[Q, M], [M^t, -bar Q]]
/// with Q = conj(L^{-1} P) (P conj(L^{-1} P) - L)^{-1} and
/// M = (bar P L^{-1} P - bar L)^{-1}.  Throws domain_error when the block
/// matrix is singular (or the condition number exceeds the guard).
struct inversion_result {
    Eigen::MatrixXcd Q;
    Eigen::MatrixXcd M;
    double block_identity_residual;  ///< | [[P,L],[Lt,-Pb]] [[Q,M],[Mt,-Qb]] - I |
};

inversion_result invert_pl(const second_order_data& d, double cond_guard = 1e12);

/// Assemble the 2(m-1) x 2(m-1) block matrix [[P, L], [L^t, -bar P]].
Eigen::MatrixXcd pl_block(const Eigen::MatrixXcd& P, const Eigen::MatrixXcd& L);

/// P(z,z) = P_{ab} z^a z^b and L(z, bar z) = L_{ab} z^a bar z^b.
cplx p_form(const Eigen::MatrixXcd& P, const Eigen::VectorXcd& z);
cplx l_form(const Eigen::MatrixXcd& L, const Eigen::VectorXcd& z);

}  // namespace crproj
