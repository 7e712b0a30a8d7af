#pragma once

#include <Eigen/Dense>

#include "crproj/jet.hpp"

namespace crproj {

/// Dense matrix with jet entries.  Only the handful of operations the frame
/// machinery needs: product, inverse (Newton iteration seeded with the
/// numeric inverse of the constant term), and action on forms.
template <class T>
class jet_matrix {
  public:
    jet_matrix() = default;
    jet_matrix(int rows, int cols, basis_ptr b)
        : rows_(rows), cols_(cols), m_(rows, std::vector<basic_jet<T>>(cols, basic_jet<T>::zero(b))) {}

    static jet_matrix identity(int n, basis_ptr b) {
        jet_matrix r(n, n, b);
        for (int i = 0; i < n; ++i) r(i, i) = basic_jet<T>::constant(b, T(1));
        return r;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const basic_jet<T>& operator()(int i, int j) const { return m_[i][j]; }
    basic_jet<T>& operator()(int i, int j) { return m_[i][j]; }

    friend jet_matrix operator*(const jet_matrix& a, const jet_matrix& b) {
        if (a.cols_ != b.rows_) throw internal_error("jet_matrix product shape mismatch");
        basis_ptr bs = a.m_[0][0].basis();
        jet_matrix r(a.rows_, b.cols_, bs);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                if (a.m_[i][k].nnz() == 0) continue;
                for (int j = 0; j < b.cols_; ++j) {
                    if (b.m_[k][j].nnz() == 0) continue;
                    r.m_[i][j] = r.m_[i][j] + a.m_[i][k] * b.m_[k][j];
                }
            }
        return r;
    }

    friend jet_matrix operator+(const jet_matrix& a, const jet_matrix& b) {
        jet_matrix r = a;
        for (int i = 0; i < a.rows_; ++i)
            for (int j = 0; j < a.cols_; ++j) r.m_[i][j] = r.m_[i][j] + b.m_[i][j];
        return r;
    }

    friend jet_matrix operator-(const jet_matrix& a, const jet_matrix& b) {
        jet_matrix r = a;
        for (int i = 0; i < a.rows_; ++i)
            for (int j = 0; j < a.cols_; ++j) r.m_[i][j] = r.m_[i][j] - b.m_[i][j];
        return r;
    }

    /// Values of all entries at the base point.
    Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> at0() const {
        Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> v(rows_, cols_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) v(i, j) = m_[i][j].value0();
        return v;
    }

    /// Jet inverse of a square matrix whose constant term is invertible.
    jet_matrix inverse() const {
        if (rows_ != cols_) throw internal_error("jet_matrix inverse of non-square matrix");
        auto v0 = at0();
        Eigen::FullPivLU<Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>> lu(v0);
        if (!lu.isInvertible()) throw domain_error("jet_matrix: constant term is singular");
        Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> inv0 = lu.inverse();
        basis_ptr bs = m_[0][0].basis();
        int max_order = 0;
        for (const auto& row : m_)
            for (const auto& e : row) max_order = std::max(max_order, e.order());
        jet_matrix x(rows_, cols_, bs);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) x(i, j) = basic_jet<T>::constant(bs, inv0(i, j));
        // Newton: X <- X (2I - M X)
        int correct = 1;
        while (correct <= max_order) {
            jet_matrix t = (*this) * x;
            for (int i = 0; i < rows_; ++i)
                for (int j = 0; j < cols_; ++j) {
                    t(i, j) = -t(i, j);
                    if (i == j) t(i, j) = t(i, j) + T(2);
                }
            x = x * t;
            correct *= 2;
        }
        return x;
    }

    double max_abs() const {
        double r = 0;
        for (const auto& row : m_)
            for (const auto& e : row) r = std::max(r, e.max_abs());
        return r;
    }

  private:
    int rows_ = 0, cols_ = 0;
    std::vector<std::vector<basic_jet<T>>> m_;
};

using jmat = jet_matrix<double>;
using cjmat = jet_matrix<cplx>;

/// Solve the row-vector system x * M = rhs for jets, via the jet inverse.
template <class T>
std::vector<basic_jet<T>> solve_row(const std::vector<basic_jet<T>>& rhs, const jet_matrix<T>& minv) {
    int n = minv.rows();
    std::vector<basic_jet<T>> x;
    x.reserve(n);
    for (int j = 0; j < n; ++j) {
        basic_jet<T> acc = rhs[0] * minv(0, j);
        for (int i = 1; i < n; ++i) acc = acc + rhs[i] * minv(i, j);
        x.push_back(acc);
    }
    return x;
}

}  // namespace crproj
