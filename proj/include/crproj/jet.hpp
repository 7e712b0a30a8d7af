#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace crproj {

/// Error in the input data (degenerate surface, non-SCLC input, ...).
struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed file / expression / configuration.
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An internal consistency check failed (a structural identity that should
/// hold by construction does not).
struct internal_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using cplx = std::complex<double>;

/// Monomial table for truncated power series in `num_vars` variables up to
/// total degree `order`.  Monomials are ranked in graded lexicographic order,
/// so the ranks of degree <= d always form a prefix.  Instances are shared
/// and cached; jets hold a pointer to their basis.
class monomial_basis {
  public:
    static std::shared_ptr<const monomial_basis> get(int num_vars, int order);

    int num_vars() const { return num_vars_; }
    int order() const { return order_; }
    int size() const { return static_cast<int>(exps_.size()); }

    int degree(int rank) const { return deg_[rank]; }
    const std::vector<std::uint8_t>& exponent(int rank) const { return exps_[rank]; }

    /// Rank of an exponent vector, or -1 when its total degree exceeds `order`.
    int rank_of(const std::vector<std::uint8_t>& exp) const;

    /// Rank of the product monomial, or -1 on truncation overflow.
    int product(int ra, int rb) const {
        if (deg_[ra] + deg_[rb] > order_) return -1;
        if (!prod_.empty()) return prod_[static_cast<std::size_t>(ra) * exps_.size() + rb];
        return product_slow(ra, rb);
    }

    /// d/dx_v of monomial `rank`: pair (rank of lowered monomial, exponent
    /// factor).  Returns (-1, 0) when the monomial does not contain x_v.
    std::pair<int, int> lower(int rank, int var) const { return low_[static_cast<std::size_t>(rank) * num_vars_ + var]; }

    /// Rank of x_v * monomial, or -1 on overflow.
    int raise(int rank, int var) const { return raise_[static_cast<std::size_t>(rank) * num_vars_ + var]; }

  private:
    monomial_basis(int num_vars, int order);
    int product_slow(int ra, int rb) const;

    int num_vars_;
    int order_;
    std::vector<std::vector<std::uint8_t>> exps_;
    std::vector<int> deg_;
    std::map<std::vector<std::uint8_t>, int> rank_;
    std::vector<int> prod_;  // ra*size+rb -> rank, only built for small bases
    std::vector<std::pair<int, int>> low_;
    std::vector<int> raise_;
};

using basis_ptr = std::shared_ptr<const monomial_basis>;

namespace detail {
inline double conj_of(double x) { return x; }
inline cplx conj_of(const cplx& z) { return std::conj(z); }
inline double abs_of(double x) { return x < 0 ? -x : x; }
inline double abs_of(const cplx& z) { return std::abs(z); }
}  // namespace detail

/// Truncated multivariate power series with coefficients of type T (double or
/// std::complex<double>).  Values are immutable in practice: every operation
/// returns a new jet.  Binary operations truncate to the smaller order of the
/// two operands and never extend precision.
template <class T>
class basic_jet {
  public:
    basic_jet() = default;

    explicit basic_jet(basis_ptr b) : basis_(std::move(b)), c_(basis_->size(), T(0)) {}

    static basic_jet zero(basis_ptr b) { return basic_jet(std::move(b)); }

    static basic_jet constant(basis_ptr b, T v) {
        basic_jet r(std::move(b));
        r.c_[0] = v;
        return r;
    }

    static basic_jet variable(basis_ptr b, int var, T scale = T(1)) {
        basic_jet r(b);
        if (var < 0 || var >= b->num_vars()) throw domain_error("jet variable index out of range");
        std::vector<std::uint8_t> e(b->num_vars(), 0);
        e[var] = 1;
        int rk = b->rank_of(e);
        if (rk < 0) throw domain_error("jet order too small for a variable");
        r.c_[rk] = scale;
        return r;
    }

    const basis_ptr& basis() const { return basis_; }
    int num_vars() const { return basis_->num_vars(); }
    int order() const { return basis_->order(); }

    T value0() const { return c_[0]; }
    const std::vector<T>& coeffs() const { return c_; }

    T coefficient(const std::vector<std::uint8_t>& exp) const {
        int rk = basis_->rank_of(exp);
        return rk < 0 ? T(0) : c_[rk];
    }

    void set_coefficient(const std::vector<std::uint8_t>& exp, T v) {
        int rk = basis_->rank_of(exp);
        if (rk < 0) throw domain_error("exponent exceeds jet order");
        c_[rk] = v;
    }

    double max_abs() const {
        double m = 0;
        for (const auto& v : c_) m = std::max(m, detail::abs_of(v));
        return m;
    }

    bool is_zero(double tol = 0.0) const { return max_abs() <= tol; }

    basic_jet truncated(int new_order) const {
        if (new_order >= order()) return *this;
        basic_jet r(monomial_basis::get(num_vars(), new_order));
        std::copy(c_.begin(), c_.begin() + r.c_.size(), r.c_.begin());
        return r;
    }

    basic_jet operator-() const {
        basic_jet r = *this;
        for (auto& v : r.c_) v = -v;
        return r;
    }

    friend basic_jet operator+(const basic_jet& a, const basic_jet& b) { return add_sub(a, b, T(1)); }
    friend basic_jet operator-(const basic_jet& a, const basic_jet& b) { return add_sub(a, b, T(-1)); }

    friend basic_jet operator*(const basic_jet& a, T s) {
        basic_jet r = a;
        for (auto& v : r.c_) v *= s;
        return r;
    }
    friend basic_jet operator*(T s, const basic_jet& a) { return a * s; }
    friend basic_jet operator+(const basic_jet& a, T s) {
        basic_jet r = a;
        r.c_[0] += s;
        return r;
    }
    friend basic_jet operator-(const basic_jet& a, T s) { return a + (-s); }

    friend basic_jet operator*(const basic_jet& a, const basic_jet& b) {
        check_vars(a, b);
        if (a.order() > b.order()) return a.truncated(b.order()) * b;
        if (b.order() > a.order()) return a * b.truncated(a.order());
        const auto& bs = *a.basis_;
        basic_jet r(a.basis_);
        // iterate nonzeros of the sparser factor in the outer loop
        const basic_jet& u = [&]() -> const basic_jet& { return a.nnz() <= b.nnz() ? a : b; }();
        const basic_jet& v = (&u == &a) ? b : a;
        const int ord = bs.order();
        for (int ra = 0; ra < bs.size(); ++ra) {
            const T ua = u.c_[ra];
            if (ua == T(0)) continue;
            const int dmax = ord - bs.degree(ra);
            for (int rb = 0; rb < bs.size(); ++rb) {
                if (bs.degree(rb) > dmax) break;  // graded order: rest overflows
                const T vb = v.c_[rb];
                if (vb == T(0)) continue;
                r.c_[bs.product(ra, rb)] += ua * vb;
            }
        }
        return r;
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    basic_jet reciprocal() const {
        if (detail::abs_of(c_[0]) == 0.0) throw domain_error("jet reciprocal of a jet with zero constant term");
        basic_jet x = constant(basis_, T(1) / c_[0]);
        // Newton iteration x <- x(2 - a x); doubles the correct order each step
        int correct = 0;
        while (correct < order()) {
            basic_jet t = (*this) * x;
            t = -t;
            t.c_[0] += T(2);
            x = x * t;
            correct = correct == 0 ? 1 : 2 * correct;
        }
        return x;
    }

    /// Formal partial derivative with respect to variable `var`; the result
    /// order drops by one.
    basic_jet partial(int var) const {
        if (var < 0 || var >= num_vars()) throw domain_error("partial: variable index out of range");
        int no = std::max(order() - 1, 0);
        basic_jet r(monomial_basis::get(num_vars(), no));
        const auto& bs = *basis_;
        const auto& rb = *r.basis_;
        for (int rk = 0; rk < bs.size(); ++rk) {
            if (c_[rk] == T(0)) continue;
            auto [lo, k] = bs.lower(rk, var);
            if (lo < 0) continue;
            int dst = rb.rank_of(bs.exponent(lo));
            if (dst >= 0) r.c_[dst] += c_[rk] * T(double(k));
        }
        return r;
    }

    /// Formal composition: substitute `subs[v]` for variable v.  Every
    /// substitution must have a zero constant term and all substitutions share
    /// one basis, which becomes the basis of the result.
    basic_jet compose(const std::vector<basic_jet>& subs) const {
        if (static_cast<int>(subs.size()) != num_vars())
            throw domain_error("compose: substitution count must equal num_vars");
        for (const auto& s : subs)
            if (detail::abs_of(s.value0()) != 0.0)
                throw domain_error("compose: substitution with nonzero constant term");
        basis_ptr ob = subs.empty() ? basis_ : subs[0].basis();
        basic_jet r(ob);
        const auto& bs = *basis_;
        for (int rk = 0; rk < bs.size(); ++rk) {
            if (c_[rk] == T(0)) continue;
            if (bs.degree(rk) > ob->order()) continue;  // contributes nothing after truncation
            basic_jet term = constant(ob, c_[rk]);
            const auto& e = bs.exponent(rk);
            for (int v = 0; v < num_vars(); ++v)
                for (int k = 0; k < e[v]; ++k) term = term * subs[v];
            r = r + term;
        }
        return r;
    }

    /// Pointwise evaluation at a numeric point (used by test oracles).
    T evaluate(const std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != num_vars()) throw domain_error("evaluate: wrong point dimension");
        T acc(0);
        const auto& bs = *basis_;
        for (int rk = 0; rk < bs.size(); ++rk) {
            if (c_[rk] == T(0)) continue;
            double mono = 1.0;
            const auto& e = bs.exponent(rk);
            for (int v = 0; v < num_vars(); ++v)
                for (int k = 0; k < e[v]; ++k) mono *= x[v];
            acc += c_[rk] * T(mono);
        }
        return acc;
    }

    int nnz() const {
        int n = 0;
        for (const auto& v : c_)
            if (v != T(0)) ++n;
        return n;
    }

    friend double max_abs_diff(const basic_jet& a, const basic_jet& b) {
        basic_jet d = a - b;
        return d.max_abs();
    }

  private:
    static void check_vars(const basic_jet& a, const basic_jet& b) {
        if (a.num_vars() != b.num_vars()) throw domain_error("jet operands have mismatched num_vars");
    }

    static basic_jet add_sub(const basic_jet& a, const basic_jet& b, T sign) {
        check_vars(a, b);
        if (a.order() > b.order()) return add_sub(a.truncated(b.order()), b, sign);
        if (b.order() > a.order()) return add_sub(a, b.truncated(a.order()), sign);
        basic_jet r = a;
        for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += sign * b.c_[i];
        return r;
    }

    basis_ptr basis_;
    std::vector<T> c_;
};

using jet = basic_jet<double>;
using cjet = basic_jet<cplx>;

inline cjet complexify(const jet& a) {
    cjet r(a.basis());
    cjet im = r;
    for (int rk = 0; rk < a.basis()->size(); ++rk)
        if (a.coeffs()[rk] != 0.0) r.set_coefficient(a.basis()->exponent(rk), cplx(a.coeffs()[rk], 0.0));
    return r;
}

inline jet real_part(const cjet& a) {
    jet r(a.basis());
    for (int rk = 0; rk < a.basis()->size(); ++rk)
        if (a.coeffs()[rk] != cplx(0)) r.set_coefficient(a.basis()->exponent(rk), a.coeffs()[rk].real());
    return r;
}

inline jet imag_part(const cjet& a) {
    jet r(a.basis());
    for (int rk = 0; rk < a.basis()->size(); ++rk)
        if (a.coeffs()[rk] != cplx(0)) r.set_coefficient(a.basis()->exponent(rk), a.coeffs()[rk].imag());
    return r;
}

inline cjet conjugate(const cjet& a) {
    cjet r(a.basis());
    for (int rk = 0; rk < a.basis()->size(); ++rk)
        if (a.coeffs()[rk] != cplx(0)) r.set_coefficient(a.basis()->exponent(rk), std::conj(a.coeffs()[rk]));
    return r;
}

inline cjet make_complex(const jet& re, const jet& im) { return complexify(re) + complexify(im) * cplx(0, 1); }

/// A 1-form with jet coefficients: sum_i a_i(x) dx^i over the same variables
/// the jets live in.
template <class T>
class basic_form {
  public:
    basic_form() = default;
    explicit basic_form(basis_ptr b) : comps_(b->num_vars(), basic_jet<T>::zero(b)) {}
    explicit basic_form(std::vector<basic_jet<T>> comps) : comps_(std::move(comps)) {}

    int size() const { return static_cast<int>(comps_.size()); }
    const basic_jet<T>& operator[](int i) const { return comps_[i]; }
    basic_jet<T>& operator[](int i) { return comps_[i]; }

    friend basic_form operator+(const basic_form& a, const basic_form& b) {
        basic_form r = a;
        for (int i = 0; i < r.size(); ++i) r.comps_[i] = r.comps_[i] + b.comps_[i];
        return r;
    }
    friend basic_form operator-(const basic_form& a, const basic_form& b) {
        basic_form r = a;
        for (int i = 0; i < r.size(); ++i) r.comps_[i] = r.comps_[i] - b.comps_[i];
        return r;
    }
    basic_form operator-() const {
        basic_form r = *this;
        for (auto& c : r.comps_) c = -c;
        return r;
    }
    /// Module action: multiply every component by a jet (function).
    friend basic_form operator*(const basic_jet<T>& f, const basic_form& w) {
        basic_form r = w;
        for (auto& c : r.comps_) c = f * c;
        return r;
    }
    friend basic_form operator*(const basic_form& w, T s) {
        basic_form r = w;
        for (auto& c : r.comps_) c = c * s;
        return r;
    }

    double max_abs() const {
        double m = 0;
        for (const auto& c : comps_) m = std::max(m, c.max_abs());
        return m;
    }

    /// Component values at the base point, as a plain vector.
    std::vector<T> at0() const {
        std::vector<T> v(comps_.size());
        for (std::size_t i = 0; i < comps_.size(); ++i) v[i] = comps_[i].value0();
        return v;
    }

  private:
    std::vector<basic_jet<T>> comps_;
};

using form = basic_form<double>;
using cform = basic_form<cplx>;

inline cform complexify(const form& w) {
    std::vector<cjet> c;
    for (int i = 0; i < w.size(); ++i) c.push_back(complexify(w[i]));
    return cform(std::move(c));
}
inline cform conjugate(const cform& w) {
    std::vector<cjet> c;
    for (int i = 0; i < w.size(); ++i) c.push_back(conjugate(w[i]));
    return cform(std::move(c));
}
inline form real_part(const cform& w) {
    std::vector<jet> c;
    for (int i = 0; i < w.size(); ++i) c.push_back(real_part(w[i]));
    return form(std::move(c));
}
inline form imag_part(const cform& w) {
    std::vector<jet> c;
    for (int i = 0; i < w.size(); ++i) c.push_back(imag_part(w[i]));
    return form(std::move(c));
}
inline cform make_complex(const form& re, const form& im) {
    std::vector<cjet> c;
    for (int i = 0; i < re.size(); ++i) c.push_back(make_complex(re[i], im[i]));
    return cform(std::move(c));
}

/// A 2-form stored as the full antisymmetric coefficient matrix c[i][j],
/// meaning sum_{i<j} c[i][j] dx^i ^ dx^j with c[j][i] = -c[i][j].
template <class T>
class basic_two_form {
  public:
    basic_two_form() = default;
    explicit basic_two_form(basis_ptr b)
        : comps_(b->num_vars(), std::vector<basic_jet<T>>(b->num_vars(), basic_jet<T>::zero(b))) {}

    const basic_jet<T>& operator()(int i, int j) const { return comps_[i][j]; }
    basic_jet<T>& operator()(int i, int j) { return comps_[i][j]; }
    int size() const { return static_cast<int>(comps_.size()); }

    friend basic_two_form operator+(const basic_two_form& a, const basic_two_form& b) {
        basic_two_form r = a;
        for (int i = 0; i < r.size(); ++i)
            for (int j = 0; j < r.size(); ++j) r.comps_[i][j] = r.comps_[i][j] + b.comps_[i][j];
        return r;
    }
    basic_two_form operator-() const {
        basic_two_form r = *this;
        for (auto& row : r.comps_)
            for (auto& c : row) c = -c;
        return r;
    }

    double max_abs() const {
        double m = 0;
        for (const auto& row : comps_)
            for (const auto& c : row) m = std::max(m, c.max_abs());
        return m;
    }

  private:
    std::vector<std::vector<basic_jet<T>>> comps_;
};

using two_form = basic_two_form<double>;
using ctwo_form = basic_two_form<cplx>;

/// d of a function: the 1-form of partial derivatives.
template <class T>
basic_form<T> differential(const basic_jet<T>& f) {
    std::vector<basic_jet<T>> c;
    for (int v = 0; v < f.num_vars(); ++v) c.push_back(f.partial(v));
    return basic_form<T>(std::move(c));
}

/// Exterior derivative of a 1-form: d(sum a_i dx^i) = sum (d_j a_i) dx^j ^ dx^i.
template <class T>
basic_two_form<T> exterior_derivative(const basic_form<T>& w) {
    int n = w.size();
    basis_ptr b;
    {
        const auto& bb = w[0].basis();
        b = monomial_basis::get(bb->num_vars(), std::max(bb->order() - 1, 0));
    }
    basic_two_form<T> r(b);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            // coefficient of dx^i ^ dx^j picks up d_i a_j - d_j a_i
            r(i, j) = w[j].partial(i).truncated(b->order()) - w[i].partial(j).truncated(b->order());
        }
    return r;
}

/// Wedge product of two 1-forms.
template <class T>
basic_two_form<T> wedge(const basic_form<T>& a, const basic_form<T>& b) {
    int n = a.size();
    basic_two_form<T> r(a[0].basis());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            r(i, j) = a[i] * b[j] - a[j] * b[i];
        }
    return r;
}

}  // namespace crproj
