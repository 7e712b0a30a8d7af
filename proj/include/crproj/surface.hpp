#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>

#include "crproj/jet.hpp"

namespace crproj {

/// A CR-hypersurface germ in graph form y^m = f(x^1, y^1, ..., x^{m-1},
/// y^{m-1}, x^m) at the base point [1:0:...:0], tangent to {y^m = 0}.
/// The variable order of `f` is fixed as (x^1, y^1, ..., x^{m-1}, y^{m-1}, x^m).
struct surface_germ {
    int m = 0;      ///< complex dimension of the ambient projective space
    int order = 0;  ///< truncation degree of f
    jet f;

    int num_vars() const { return 2 * m - 1; }
    /// n = 2m, the largest tangent frame index; frame indices run 0..n+1.
    int n() const { return 2 * m; }
};

/// Throws domain_error unless f has vanishing constant and linear parts,
/// m >= 2 and order >= 2.
void validate_germ(const surface_germ& g);

/// Zero out constant/linear coefficients smaller than `tol` (and throw if any
/// is larger): restores the graph-form invariant after float arithmetic.
void clean_linear_part(surface_germ& g, double tol = 1e-9);

/// Variable index of x^a (1 <= a <= m) in the germ jet variable order.
inline int var_x(int m, int a) { return a < m ? 2 * (a - 1) : 2 * m - 2; }
/// Variable index of y^alpha (1 <= alpha <= m-1).
inline int var_y(int /*m*/, int alpha) { return 2 * alpha - 1; }

/// Parse an arithmetic expression in x1..x{m-1}, y1..y{m-1}, xm into a germ
/// of the given truncation order.  Grammar:
///   expression := ['+'|'-'] term (('+'|'-') term)*
///   term       := factor ('*' factor)*
///   factor     := base ('^' uint)?
///   base       := var | number | '(' expression ')'
surface_germ parse_surface(const std::string& text, int m, int order);

/// JSON file format: {"m": int, "order": int, "coeffs": [{"exp": [...],
/// "val": float}, ...]} with exponents in the fixed variable order.
surface_germ load_surface(const std::string& path);
void save_surface(const surface_germ& g, const std::string& path);
surface_germ surface_from_json_text(const std::string& text);
std::string surface_to_json_text(const surface_germ& g);

/// Print a germ back as parser input; parse_surface(surface_to_expression(g))
/// reproduces the coefficient map.
std::string surface_to_expression(const surface_germ& g);

/// Germ of the hyperquadric {i(z^0 bar z^m - z^m bar z^0) + sum |z^alpha|^2 = 0}
/// at [1:0:...:0]: y^m = -1/2 sum ((x^alpha)^2 + (y^alpha)^2).
surface_germ hyperquadric(int m, int order);

/// Random germ with quadratic through order-degree terms, coefficients
/// uniform in [-amp, amp].  Deterministic for a fixed seed.
surface_germ random_germ(int m, int order, std::uint64_t seed, double amp = 0.3);

/// A projective linear transformation of P(W), acting on homogeneous
/// coordinates [z^0 : ... : z^m] by an invertible (m+1)x(m+1) matrix.
struct projective_map {
    Eigen::MatrixXcd a;

    static projective_map identity(int m);
    projective_map inverse() const;
    friend projective_map operator*(const projective_map& p, const projective_map& q) {
        return projective_map{p.a * q.a};
    }
};

struct regraph_result {
    surface_germ germ;
    /// The projective map actually applied: the input map composed with the
    /// affine renormalization that restores the base point and tangent
    /// alignment.  Applying `total.inverse()` to the output germ reproduces
    /// the input exactly (to truncation).
    projective_map total;
};

/// Re-graph the image of a germ under a projective map.  The image base
/// point is translated back to the origin of the chart and the chart
/// coordinates are corrected by the inverse Jacobian of the map, so the
/// image is again a graph over {y^m = 0}.  The implicit equation is solved
/// for y^m by fixed-point iteration on jets.
regraph_result regraph(const surface_germ& g, const projective_map& map);

}  // namespace crproj
