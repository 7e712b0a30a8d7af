#pragma once

#include <map>

#include "crproj/convexity.hpp"
#include "crproj/frames.hpp"
#include "crproj/linalg.hpp"

namespace crproj {

/// Sorted multi-index with entries in 1..n.
using midx = std::vector<int>;

midx sorted_with(const midx& s, int extra);

/// The projective differential invariants h^(p) of a section, as jets in the
/// surface parameters, for 2 <= p <= p_max.  Entries are stored once per
/// sorted multi-index; the full symmetry of Prop-type recursions is a
/// consistency check, recorded in the residual fields.
struct invariant_tables {
    int m = 0;
    int n = 0;
    int p_max = 0;
    /// h[p] maps sorted multi-indices of length p to jets; valid for p in 2..p_max.
    std::vector<std::map<midx, jet>> h;

    double h2_row1_residual = 0;    ///< deviation of the expanded row 1 from (0,...,0,1)
    double sym_residual = 0;        ///< disagreement between redundant expansions
    double resub_residual = 0;      ///< defining-identity re-substitution residual

    const jet& at(int p, const midx& s) const;
    double at0(int p, const midx& s) const { return at(p, s).value0(); }
};

/// Expansion of pulled-back 1-forms in the semi-basic basis {omega^t_0}.
/// Along a section only 2m-1 of the n forms are independent; omega^1_0 is
/// expanded in the others (coefficients `c`), and coefficients of index 1
/// are recovered from the full symmetry of the tables.
struct semibasic_expansion {
    int m = 0;
    int n = 0;
    jmat Binv;           ///< inverse of the (n-1)x(n-1) component matrix of {omega^t_0}, t=2..n
    std::vector<jet> c;  ///< omega^1_0 = sum_t c[t-2] omega^t_0

    /// Coefficients x_t (t = 2..n) with xi = sum x_t omega^t_0.
    std::vector<jet> expand(const form& xi) const;
};

semibasic_expansion build_expansion(const mc_pullback& mc);

/// Solve omega^{n+1}_s = h_{st} omega^t_0 for the second-order invariants.
invariant_tables solve_h2(const mc_pullback& mc, const semibasic_expansion& ex);

/// Extend the tables from level p to level p+1 by the general recursion
/// (assemble the right side, expand, and read off the next coefficients).
/// In strict mode a re-substitution residual beyond tolerance throws
/// internal_error; the verify suite runs non-strict and reports it instead.
void recurse_h(const mc_pullback& mc, const semibasic_expansion& ex, invariant_tables& t, bool strict = true);

/// The recursion right side for multi-index `s` at level p = s.size(),
/// exposed so tests can compare against independently coded special cases.
form recursion_rhs(const mc_pullback& mc, const invariant_tables& t, const midx& s);

/// Re-substitution residual of the defining identity at level p:
/// max |rhs(S) - h_{S t} omega^t_0| over all rows S of level p.
double resubstitution_residual(const mc_pullback& mc, const invariant_tables& t, int p);

/// Tables through order p_max (levels 2..p_max).
invariant_tables compute_invariants(const mc_pullback& mc, int p_max, bool strict = true);

struct redundancy_check {
    std::string name;
    double residual;
    bool pass;
};

/// Index-1 redundancy identities at the base point: h_{11s} = 0, h_{1nn} = 0,
/// h_{1 sigma n} = -J_sigma^tau h_{tau n},
/// h_{1 sigma tau} = -J_sigma^nu h_{nu tau} - J_tau^nu h_{sigma nu}.
std::vector<redundancy_check> verify_index1_redundancy(const invariant_tables& t, double tol = 1e-8);

/// Second-order data as jets along the section, converted from h^(2).
struct second_order_jets {
    int m = 0;
    cjmat P;                 ///< P_{alpha beta}, (m-1)^2
    cjmat L;                 ///< P_{alpha bar beta}
    std::vector<cjet> Pam;   ///< P_{alpha m}
    cjet Pmm;                ///< P_{mm} = -2i h_{nn}
};

second_order_jets h_to_p_jets(const invariant_tables& t);

/// Values at the base point.
struct second_order_at0 {
    second_order_data pl;
    Eigen::VectorXcd Pam;
    cplx Pmm;
};

second_order_at0 h_to_p(const invariant_tables& t);

/// Expansion in the complex semi-basic basis {Omega^b_0, conj Omega^b_0,
/// Omega^m_0}; along a section this basis is exactly determined.
struct complex_expansion {
    int m = 0;
    cjmat Binv;

    /// Coefficient order: c_1..c_{m-1} (of Omega^b_0), then conjugate slots,
    /// then the Omega^m_0 slot.
    std::vector<cjet> expand(const cform& xi) const;
};

complex_expansion build_complex_expansion(const mc_pullback& mc);

/// Third-order coefficients with respect to Omega on the adapted bundle,
/// read off from the structure equations obtained by differentiating the
/// adapted relations.  `cross_residual` records the disagreement between the
/// independent appearances of the same coefficient in different equations.
struct third_order_data {
    Eigen::MatrixXcd Pabm;   ///< P_{alpha beta m}
    Eigen::MatrixXcd Pabbm;  ///< P_{alpha bar beta m}
    Eigen::VectorXcd Pamm;   ///< P_{alpha m m}
    cplx Pmmm;               ///< P_{m m m}
    double cross_residual = 0;
    double sym_residual = 0;
};

/// Requires a frame adapted to the reduced bundle (P_{alpha m} and P_{mm}
/// vanish at the base point); throws domain_error otherwise.
third_order_data compute_p3(const mc_pullback& mc, const invariant_tables& t, double adapt_tol = 1e-7);

/// The omega-version dual tables: k^{st} = (h^{-1})^{st} as jets, and the
/// third-order k^{stu} = k^{sa} k^{tb} k^{uc} h_{abc} obtained by feeding
/// dk = -k dh k into the mirrored recursion.
struct k_tables {
    int m = 0;
    int n = 0;
    jmat k2;                  ///< k^{st} jets
    std::map<midx, jet> k3;   ///< sorted multi-indices of length 3
    double hk_identity_residual = 0;  ///< |h k - I| at the base point
};

k_tables compute_k(const invariant_tables& t, bool with_k3 = true);

/// Residual of the mirrored recursion at p = 2:
/// -dk^{st} + k^{st}(omega^0_0 + omega^{n+1}_{n+1}) - k^{us} omega^t_u
/// - k^{ut} omega^s_u - k^{stu} omega^{n+1}_u.
double k_recursion_residual(const mc_pullback& mc, const k_tables& k);

}  // namespace crproj
