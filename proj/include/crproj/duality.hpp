#pragma once

#include "crproj/adaptation.hpp"

namespace crproj {

/// The index permutation exchanging a frame with its Gauss-image frame:
/// nu(0) = n+1, nu(1) = n, nu(2a) = 2a+1, nu^2 = id, on {0, ..., n+1}.
int nu_permutation(int n, int j);

/// Second-order data of the dual hypersurface at the Gauss-image frame:
/// P* = Q, L* = -M.  Requires the inversion to exist.
second_order_data dual_second_order(const second_order_data& d);

/// Third-order dual coefficients from the inverse data:
///   Q^{abm} = Q P.m Q + Q P.bm M^t - M conj(P.m) M^t + M P.bm^t Q
///   Q^{abbm} = Q P.m M - Q P.bm conj(Q) + M conj(P.m) conj(Q) + M P.bm^t M
///   Q^{amm} = Q P.mm - M conj(P.mm)
struct dual_third_data {
    Eigen::MatrixXcd Qabm;
    Eigen::MatrixXcd Qabbm;
    Eigen::VectorXcd Qamm;
};

dual_third_data dual_third_order(const third_order_data& p3, const Eigen::MatrixXcd& Q, const Eigen::MatrixXcd& M);

enum class match_status { match, no_match, indeterminate };

std::string to_string(match_status s);

struct orbit_match_result {
    match_status status = match_status::indeterminate;
    double residual = 0;
    block_motion motion;
    std::string obstruction;  ///< set when status == no_match
};

struct orbit_options {
    int starts = 16;
    int iterations = 120;
    double match_threshold = 1e-6;
    std::uint64_t seed = 2024;
};

/// Least-squares search for a block motion carrying (P, L) to (Ptgt, Ltgt).
/// A definite retort is only given on a signature obstruction; otherwise the
/// outcome is match or indeterminate, never a bare "no".
orbit_match_result orbit_match(const second_order_data& d, const Eigen::MatrixXcd& Ptgt,
                               const Eigen::MatrixXcd& Ltgt, const orbit_options& opt = {});

/// Order-2 self-duality: does (Q, -M) lie in the block-motion orbit of (P, L)?
orbit_match_result selfdual_second_order(const second_order_data& d, const orbit_options& opt = {});

struct selfdual_third_report {
    double r_abm = 0;   ///< |P3'(motion)_{alpha beta m} - Q^{alpha beta m}|
    double r_abbm = 0;  ///< |P3'_{alpha bar beta m} + Q^{alpha bar beta m}|
    double r_amm = 0;   ///< |P3'_{alpha m m} - Q^{alpha m m}|
    double r_mmm = 0;   ///< |P3'_{mmm} - P3_{mmm}|
};

/// Transport the adapted frame by the order-2 matching motion (rebuilding
/// the Maurer-Cartan data) and compare third-order families against the dual
/// coefficients.
selfdual_third_report selfdual_third_order(const mc_pullback& adapted_mc, const third_order_data& p3,
                                           const dual_third_data& q3, const block_motion& motion, int p_max);

struct selfdual_h_report {
    double order2 = 0;  ///< max |h'_{st} - k^{nu(s) nu(t)}| at the base point
    double order3 = 0;
    bool h_invertible = true;
};

/// The omega-version comparison h(e~) vs k_nu(e) under the matching motion,
/// at orders 2 and 3.
selfdual_h_report selfdual_h_version(const mc_pullback& adapted_mc, const invariant_tables& adapted_tables,
                                     const block_motion& motion, int p_max);

}  // namespace crproj
