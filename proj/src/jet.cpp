#include "crproj/jet.hpp"

#include <mutex>

namespace crproj {

namespace {

// enumerate exponent vectors of fixed total degree in graded lex order
void enumerate_degree(int num_vars, int deg, std::vector<std::uint8_t>& cur, int pos,
                      std::vector<std::vector<std::uint8_t>>& out) {
    if (pos == num_vars - 1) {
        cur[pos] = static_cast<std::uint8_t>(deg);
        out.push_back(cur);
        return;
    }
    for (int k = deg; k >= 0; --k) {
        cur[pos] = static_cast<std::uint8_t>(k);
        enumerate_degree(num_vars, deg - k, cur, pos + 1, out);
    }
}

constexpr std::size_t kEagerProductCap = 16u * 1024u * 1024u;

}  // namespace

monomial_basis::monomial_basis(int num_vars, int order) : num_vars_(num_vars), order_(order) {
    if (num_vars < 1) throw domain_error("monomial_basis: num_vars must be positive");
    if (order < 0) throw domain_error("monomial_basis: order must be non-negative");
    std::vector<std::uint8_t> cur(num_vars, 0);
    for (int d = 0; d <= order; ++d) enumerate_degree(num_vars, d, cur, 0, exps_);
    deg_.resize(exps_.size());
    for (std::size_t r = 0; r < exps_.size(); ++r) {
        int d = 0;
        for (auto e : exps_[r]) d += e;
        deg_[r] = d;
        rank_[exps_[r]] = static_cast<int>(r);
    }

    const std::size_t n = exps_.size();
    if (n * n <= kEagerProductCap) {
        prod_.assign(n * n, -1);
        std::vector<std::uint8_t> t(num_vars);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                if (deg_[a] + deg_[b] > order_) continue;
                for (int v = 0; v < num_vars; ++v) t[v] = static_cast<std::uint8_t>(exps_[a][v] + exps_[b][v]);
                prod_[a * n + b] = rank_.at(t);
            }
    }

    low_.resize(n * num_vars, {-1, 0});
    raise_.assign(n * num_vars, -1);
    std::vector<std::uint8_t> t(num_vars);
    for (std::size_t r = 0; r < n; ++r)
        for (int v = 0; v < num_vars; ++v) {
            if (exps_[r][v] > 0) {
                t = exps_[r];
                --t[v];
                low_[r * num_vars + v] = {rank_.at(t), exps_[r][v]};
            }
            if (deg_[r] + 1 <= order_) {
                t = exps_[r];
                ++t[v];
                raise_[r * num_vars + v] = rank_.at(t);
            }
        }
}

int monomial_basis::rank_of(const std::vector<std::uint8_t>& exp) const {
    if (static_cast<int>(exp.size()) != num_vars_) throw domain_error("exponent vector has wrong length");
    auto it = rank_.find(exp);
    return it == rank_.end() ? -1 : it->second;
}

int monomial_basis::product_slow(int ra, int rb) const {
    std::vector<std::uint8_t> t(num_vars_);
    for (int v = 0; v < num_vars_; ++v) t[v] = static_cast<std::uint8_t>(exps_[ra][v] + exps_[rb][v]);
    auto it = rank_.find(t);
    return it == rank_.end() ? -1 : it->second;
}

std::shared_ptr<const monomial_basis> monomial_basis::get(int num_vars, int order) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const monomial_basis>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(num_vars, order);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto b = std::shared_ptr<const monomial_basis>(new monomial_basis(num_vars, order));
    cache[key] = b;
    return b;
}

}  // namespace crproj
