#pragma once

#include "crproj/linalg.hpp"
#include "crproj/surface.hpp"

namespace crproj {

/// The canonical local section e(z) of the frame bundle over a germ: frame
/// vectors as columns of E (constant coefficients of V = R^{2m+2}, entries
/// jets in the surface parameters), the dual coframe as rows of Einv, and
/// the normalizing function delta = 1/(1 + f_{x^m}^2).
struct frame_section {
    int m = 0;
    int order = 0;  ///< truncation order of the underlying germ
    jmat E;
    jmat Einv;
    jet delta;

    int dim_v() const { return 2 * m + 2; }
};

/// Pulled-back Maurer-Cartan components along a section: omega[j][k] is the
/// real 1-form omega^j_k with jet coefficients over the surface parameters.
/// The complex components Omega^b_a are assembled on demand.
struct mc_pullback {
    int m = 0;
    int order = 0;
    std::vector<std::vector<form>> omega;

    int n() const { return 2 * m; }
    int dim_v() const { return 2 * m + 2; }

    /// Omega^b_a = omega^{2b}_{2a} + i omega^{2b+1}_{2a}.
    cform Om(int b, int a) const { return make_complex(omega[2 * b][2 * a], omega[2 * b + 1][2 * a]); }
};

/// Build the explicit frame of the local-coordinate section, together with
/// its exact dual coframe (the jet inverse of the frame matrix).
frame_section build_section(const surface_germ& g);

/// Pull back the Maurer-Cartan form along the section: omega^k_j = <e^k, d e_j>.
mc_pullback pullback_mc(const frame_section& s);

/// Realification of a complex (m+1)x(m+1) jet matrix: each complex entry
/// becomes the 2x2 block [[re, -im], [im, re]], so the result commutes with
/// the standard complex structure.
jmat realify(const cjmat& g, int m);

/// Change of frame e -> e.g with g a (possibly variable) complex matrix of
/// jets: omega~ = g^{-1} dg + g^{-1} omega g.
mc_pullback transform_frame(const mc_pullback& mc, const cjmat& g);

/// Constant-coefficient convenience overload.
mc_pullback transform_frame(const mc_pullback& mc, const Eigen::MatrixXcd& g);

/// max |omega^{2a}_{2b} - omega^{2a+1}_{2b+1}|, |omega^{2a}_{2b+1} + omega^{2a+1}_{2b}|.
double complex_structure_residual(const mc_pullback& mc);

/// max coefficient of d omega^j_k + omega^j_l ^ omega^l_k over all j, k.
double maurer_cartan_residual(const mc_pullback& mc);

/// Complex version: max coefficient of d Omega^b_a + Omega^b_c ^ Omega^c_a.
double maurer_cartan_residual_complex(const mc_pullback& mc);

/// max |omega^{n+1}_0| on the section.
double semibasic_normal_residual(const mc_pullback& mc);

/// Rank of the evaluation-at-0 matrix of {omega^0_0, ..., omega^n_0} against
/// the coordinate differentials.  Full rank is 2m-1 = dim S (omega^0_0 and
/// omega^1_0 pull back to zero along a section).
int semibasic_rank(const mc_pullback& mc);

/// Fault-injection hook for negative controls: perturb the constant
/// coefficient of one component of omega^j_k.
void corrupt_component(mc_pullback& mc, int j, int k, double eps);

}  // namespace crproj
