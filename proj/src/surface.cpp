#include "crproj/surface.hpp"

#include <cctype>
#include <iomanip>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace crproj {

void validate_germ(const surface_germ& g) {
    if (g.m < 2) throw domain_error("surface germ requires m >= 2");
    if (g.order < 2) throw domain_error("surface germ requires order >= 2");
    if (g.f.num_vars() != g.num_vars()) throw domain_error("surface germ jet has wrong variable count");
    if (std::abs(g.f.value0()) != 0.0) throw domain_error("surface germ has nonzero constant part");
    std::vector<std::uint8_t> e(g.num_vars(), 0);
    for (int v = 0; v < g.num_vars(); ++v) {
        e[v] = 1;
        if (std::abs(g.f.coefficient(e)) != 0.0) throw domain_error("surface germ has nonzero linear part");
        e[v] = 0;
    }
}

void clean_linear_part(surface_germ& g, double tol) {
    std::vector<std::uint8_t> e(g.num_vars(), 0);
    double c0 = std::abs(g.f.coefficient(e));
    if (c0 > tol) throw domain_error("regraphed surface has nonzero constant part: " + std::to_string(c0));
    g.f.set_coefficient(e, 0.0);
    for (int v = 0; v < g.num_vars(); ++v) {
        e[v] = 1;
        double c = std::abs(g.f.coefficient(e));
        if (c > tol) throw domain_error("regraphed surface has nonzero linear part: " + std::to_string(c));
        g.f.set_coefficient(e, 0.0);
        e[v] = 0;
    }
}

// ---------------------------------------------------------------------------
// expression parser
// ---------------------------------------------------------------------------

namespace {

struct parser {
    const std::string& s;
    std::size_t pos = 0;
    int m;
    basis_ptr basis;

    [[noreturn]] void fail(const std::string& msg) const {
        throw parse_error("syntax error at position " + std::to_string(pos) + ": " + msg);
    }

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }

    jet expression() {
        int sign = 1;
        if (eat('-'))
            sign = -1;
        else
            eat('+');
        jet acc = term() * double(sign);
        for (;;) {
            if (eat('+'))
                acc = acc + term();
            else if (eat('-'))
                acc = acc - term();
            else
                break;
        }
        return acc;
    }

    jet term() {
        jet acc = factor();
        while (eat('*')) acc = acc * factor();
        return acc;
    }

    jet factor() {
        jet b = base();
        if (eat('^')) {
            skip_ws();
            if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos]))) fail("expected exponent");
            int e = 0;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) e = 10 * e + (s[pos++] - '0');
            jet r = jet::constant(basis, 1.0);
            for (int k = 0; k < e; ++k) r = r * b;
            return r;
        }
        return b;
    }

    jet base() {
        skip_ws();
        if (pos >= s.size()) fail("unexpected end of expression");
        char c = s[pos];
        if (c == '(') {
            ++pos;
            jet e = expression();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (c == 'x' || c == 'y') return variable();
        fail(std::string("unexpected character '") + c + "'");
    }

    jet number() {
        std::size_t start = pos;
        while (pos < s.size() &&
               (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.' || s[pos] == 'e' || s[pos] == 'E' ||
                ((s[pos] == '+' || s[pos] == '-') && (s[pos - 1] == 'e' || s[pos - 1] == 'E'))))
            ++pos;
        try {
            std::size_t used = 0;
            double v = std::stod(s.substr(start, pos - start), &used);
            if (used != pos - start) fail("malformed number");
            return jet::constant(basis, v);
        } catch (const std::exception&) {
            pos = start;
            fail("malformed number");
        }
    }

    jet variable() {
        std::size_t start = pos;
        char kind = s[pos++];
        if (pos < s.size() && s[pos] == 'm') {
            ++pos;
            if (kind == 'y') {
                pos = start;
                fail("unknown variable 'ym' (the graph variable cannot appear)");
            }
            return jet::variable(basis, var_x(m, m));
        }
        if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos]))) {
            pos = start;
            fail("expected variable index");
        }
        int idx = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) idx = 10 * idx + (s[pos++] - '0');
        if (kind == 'x') {
            if (idx >= 1 && idx <= m) return jet::variable(basis, var_x(m, idx));
        } else {
            if (idx >= 1 && idx <= m - 1) return jet::variable(basis, var_y(m, idx));
        }
        pos = start;
        fail("unknown variable '" + s.substr(start, 8) + "'");
    }
};

}  // namespace

surface_germ parse_surface(const std::string& text, int m, int order) {
    if (m < 2) throw domain_error("parse_surface requires m >= 2");
    parser p{text, 0, m, monomial_basis::get(2 * m - 1, order)};
    jet f = p.expression();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    surface_germ g{m, order, f};
    validate_germ(g);
    return g;
}

// ---------------------------------------------------------------------------
// file io
// ---------------------------------------------------------------------------

surface_germ surface_from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("malformed surface file: ") + e.what());
    }
    if (!j.contains("m") || !j.contains("order") || !j.contains("coeffs"))
        throw parse_error("surface file must have fields m, order, coeffs");
    int m = j["m"].get<int>();
    int order = j["order"].get<int>();
    if (m < 2 || order < 2) throw parse_error("surface file has invalid m or order");
    int nv = 2 * m - 1;
    jet f(monomial_basis::get(nv, order));
    for (const auto& c : j["coeffs"]) {
        if (!c.contains("exp") || !c.contains("val")) throw parse_error("coefficient entry must have exp and val");
        auto ev = c["exp"].get<std::vector<int>>();
        if (static_cast<int>(ev.size()) != nv)
            throw parse_error("exponent vector has length " + std::to_string(ev.size()) + ", expected " +
                              std::to_string(nv));
        std::vector<std::uint8_t> e(nv);
        int deg = 0;
        for (int v = 0; v < nv; ++v) {
            if (ev[v] < 0) throw parse_error("negative exponent");
            e[v] = static_cast<std::uint8_t>(ev[v]);
            deg += ev[v];
        }
        if (deg > order) throw parse_error("coefficient of total degree " + std::to_string(deg) +
                                           " exceeds declared order " + std::to_string(order));
        f.set_coefficient(e, c["val"].get<double>());
    }
    surface_germ g{m, order, f};
    validate_germ(g);
    return g;
}

std::string surface_to_json_text(const surface_germ& g) {
    nlohmann::json j;
    j["m"] = g.m;
    j["order"] = g.order;
    j["coeffs"] = nlohmann::json::array();
    const auto& bs = *g.f.basis();
    for (int rk = 0; rk < bs.size(); ++rk) {
        double v = g.f.coeffs()[rk];
        if (v == 0.0) continue;
        nlohmann::json c;
        c["exp"] = std::vector<int>(bs.exponent(rk).begin(), bs.exponent(rk).end());
        c["val"] = v;
        j["coeffs"].push_back(c);
    }
    return j.dump(2);
}

std::string surface_to_expression(const surface_germ& g) {
    const auto& bs = *g.f.basis();
    std::ostringstream ss;
    ss << std::setprecision(17);
    bool first = true;
    for (int rk = 0; rk < bs.size(); ++rk) {
        double v = g.f.coeffs()[rk];
        if (v == 0.0) continue;
        if (first)
            ss << (v < 0 ? "-" : "");
        else
            ss << (v < 0 ? " - " : " + ");
        first = false;
        ss << std::abs(v);
        const auto& e = bs.exponent(rk);
        for (int a = 1; a <= g.m; ++a) {
            int ex = e[var_x(g.m, a)];
            if (ex > 0) ss << "*" << (a < g.m ? "x" + std::to_string(a) : std::string("xm"))
                          << (ex > 1 ? "^" + std::to_string(ex) : "");
            if (a < g.m) {
                int ey = e[var_y(g.m, a)];
                if (ey > 0) ss << "*y" << a << (ey > 1 ? "^" + std::to_string(ey) : "");
            }
        }
    }
    if (first) ss << "0*x1^2";
    return ss.str();
}

surface_germ load_surface(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open surface file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return surface_from_json_text(ss.str());
}

void save_surface(const surface_germ& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write surface file: " + path);
    out << surface_to_json_text(g) << "\n";
}

// ---------------------------------------------------------------------------
// model surfaces
// ---------------------------------------------------------------------------

surface_germ hyperquadric(int m, int order) {
    if (m < 2) throw domain_error("hyperquadric requires m >= 2");
    if (order < 2) throw domain_error("hyperquadric requires order >= 2");
    auto b = monomial_basis::get(2 * m - 1, order);
    jet f(b);
    for (int a = 1; a < m; ++a) {
        jet x = jet::variable(b, var_x(m, a));
        jet y = jet::variable(b, var_y(m, a));
        f = f - (x * x + y * y) * 0.5;
    }
    return surface_germ{m, order, f};
}

surface_germ random_germ(int m, int order, std::uint64_t seed, double amp) {
    auto b = monomial_basis::get(2 * m - 1, order);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-amp, amp);
    jet f(b);
    for (int rk = 0; rk < b->size(); ++rk) {
        if (b->degree(rk) < 2) continue;
        f.set_coefficient(b->exponent(rk), u(rng));
    }
    surface_germ g{m, order, f};
    validate_germ(g);
    return g;
}

// ---------------------------------------------------------------------------
// projective maps and re-graphing
// ---------------------------------------------------------------------------

projective_map projective_map::identity(int m) { return projective_map{Eigen::MatrixXcd::Identity(m + 1, m + 1)}; }

projective_map projective_map::inverse() const {
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(a);
    if (!lu.isInvertible()) throw domain_error("projective map is singular");
    return projective_map{lu.inverse()};
}

regraph_result regraph(const surface_germ& g, const projective_map& map) {
    validate_germ(g);
    const int m = g.m;
    if (map.a.rows() != m + 1 || map.a.cols() != m + 1) throw domain_error("projective map has wrong size");
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(map.a);
    if (!lu.isInvertible()) throw domain_error("projective map is singular");

    // image of the base point [1:0:...:0]
    Eigen::VectorXcd w = map.a.col(0);
    if (std::abs(w(0)) < 1e-12 * w.norm()) throw domain_error("image base point leaves the affine chart");
    Eigen::VectorXcd zstar = w.tail(m) / w(0);

    // Jacobian of the chart map z -> (A z)^i / (A z)^0 at z = 0
    Eigen::MatrixXcd jac(m, m);
    for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= m; ++j) jac(i - 1, j - 1) = (map.a(i, j) * map.a(0, 0) - map.a(i, 0) * map.a(0, j)) /
                                                         (map.a(0, 0) * map.a(0, 0));
    Eigen::FullPivLU<Eigen::MatrixXcd> jlu(jac);
    if (!jlu.isInvertible()) throw domain_error("image tangent alignment is singular in the chart");
    Eigen::MatrixXcd jinv = jlu.inverse();

    // renormalization: chart-affine map zeta -> jinv * (zeta - zstar)
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(m + 1, m + 1);
    r(0, 0) = 1.0;
    r.block(1, 1, m, m) = jinv;
    r.block(1, 0, m, 1) = -jinv * zstar;
    projective_map total{r * map.a};

    // chart map of total^{-1} as degree-1 complex jets in the 2m real
    // coordinates of the image chart
    Eigen::MatrixXcd binv = total.inverse().a;
    const int nv = 2 * m;
    auto ab = monomial_basis::get(nv, g.order);
    std::vector<cjet> ell;  // homogeneous linear forms, index 0..m
    for (int j = 0; j <= m; ++j) {
        cjet s = cjet::constant(ab, binv(j, 0));
        for (int k = 1; k <= m; ++k) {
            cjet zk = make_complex(jet::variable(ab, 2 * (k - 1)), jet::variable(ab, 2 * k - 1));
            s = s + cjet::constant(ab, binv(j, k)) * zk;
        }
        ell.push_back(s);
    }
    if (std::abs(ell[0].value0()) < 1e-12) throw domain_error("re-graphed chart is degenerate");
    cjet inv0 = ell[0].reciprocal();

    // original chart coordinates as jets of the new ones; the constant terms
    // vanish because total maps the base point to itself
    std::vector<jet> subs;  // substitutions for f's variables (x^1,y^1,...,x^m)
    jet im_zm(ab);
    for (int j = 1; j <= m; ++j) {
        cjet zj = ell[j] * inv0;
        jet re = real_part(zj), im = imag_part(zj);
        std::vector<std::uint8_t> zero_exp(nv, 0);
        if (std::abs(zj.value0()) > 1e-9)
            throw internal_error("regraph: renormalized base point is not at the origin");
        re.set_coefficient(zero_exp, 0.0);
        im.set_coefficient(zero_exp, 0.0);
        if (j < m) {
            subs.push_back(re);
            subs.push_back(im);
        } else {
            subs.push_back(re);
            im_zm = im;
        }
    }

    // implicit equation G = Im z^m - f(x, y, x^m) = 0 in the new chart
    jet G = im_zm - g.f.compose(subs);

    // solve for y'^m: the linear part of G is exactly dy'^m, so iterate
    // v <- v - G(u, v)
    auto ub = monomial_basis::get(nv - 1, g.order);
    jet v(ub);
    for (int it = 0; it <= g.order; ++it) {
        // substitute (u, v) into G
        std::vector<jet> gs;
        for (int k = 0; k < nv - 1; ++k) gs.push_back(jet::variable(ub, k));
        gs.push_back(v);
        jet gv = G.compose(gs);
        v = v - gv;
    }

    surface_germ out{m, g.order, v};
    clean_linear_part(out, 1e-7);
    validate_germ(out);
    return regraph_result{out, total};
}

}  // namespace crproj
