#pragma once

#include "crproj/invariants.hpp"

namespace crproj {

/// Block fibre motion: f~_0 = g00 f_0, f~_alpha = gab^beta_alpha f_beta,
/// f~_m = gmm f_m.  Frames stay over the same flag only when gmm/g00 is
/// real, which every motion produced here satisfies.
struct block_motion {
    cplx g00{1.0, 0.0};
    Eigen::MatrixXcd gab;  ///< (m-1) x (m-1), invertible
    cplx gmm{1.0, 0.0};

    static block_motion identity(int m);
    Eigen::MatrixXcd matrix(int m) const;  ///< the (m+1)x(m+1) change-of-frame matrix
};

/// Shear fibre motion: f~_0 = f_0, f~_alpha = f_alpha + g0a_alpha f_0,
/// f~_m = f_m + g0m f_0 + gam^alpha f_alpha.
struct shear_motion {
    Eigen::VectorXcd g0a;
    cplx g0m{0.0, 0.0};
    Eigen::VectorXcd gam;

    static shear_motion identity(int m);
    Eigen::MatrixXcd matrix(int m) const;
    bool is_identity(double tol = 0.0) const;
};

enum class motion_kind { block, shear };

struct fibre_motion {
    motion_kind kind = motion_kind::shear;
    block_motion block;
    shear_motion shear;

    Eigen::MatrixXcd matrix(int m) const {
        return kind == motion_kind::block ? block.matrix(m) : shear.matrix(m);
    }
};

/// Transformation of the second-order data under a block motion:
/// P~ = g^t P g / (g00 gmm), L~ = g^t L conj(g) / (conj(g00) gmm).
second_order_data apply_block(const second_order_data& d, const block_motion& g);

/// Shear motions leave P and L unchanged and move P_{alpha m}, P_{mm}:
/// P~_{am} = P_{am} + g0a + P gam + L conj(gam),
/// P~_{mm} = P_{mm} + (g0a.gam - conj) - 2 (g0m - conj g0m).
second_order_at0 apply_shear(const second_order_at0& d, const shear_motion& g);

/// The residual shear freedom of the reduced bundle: given gam, the unique
/// g0a with g0a + P gam + L conj(gam) = 0, so the motion preserves
/// P_{alpha m} = 0.
shear_motion residual_shear(const second_order_data& d, const Eigen::VectorXcd& gam, cplx re_g0m = cplx(0, 0));

struct adaptation_result {
    mc_pullback mc;            ///< Maurer-Cartan pullback on the adapted section
    invariant_tables tables;   ///< invariants re-derived in the adapted frame
    fibre_motion motion;       ///< the shear used (values at the base point)
};

/// Reduce to the adapted bundle: the deterministic shear with gam = 0,
/// g0a = -P_{alpha m} and g0m purely imaginary killing Im P_{mm}, applied
/// with jet coefficients so the whole section lies in the reduced bundle and
/// third-order quantities are computed there.
adaptation_result adapt_to_ps(const mc_pullback& mc, const invariant_tables& t, int p_max, bool strict = true);

struct cps_check {
    std::string name;
    double residual;
    bool pass;
};

/// Relations of the adapted bundle at the base point: omega^n_1 = 0,
/// omega^{n+1}_1 = omega^n_0, omega^{n+1}_sigma = h_{sigma tau} omega^tau_0,
/// omega^{n+1}_n = omega^1_0 = -omega^n_{n+1}.
std::vector<cps_check> corollary_cps_check(const mc_pullback& mc, const invariant_tables& t, double tol = 1e-8);

}  // namespace crproj
