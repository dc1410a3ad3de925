#include "conslin/linops.hpp"

#include <algorithm>

namespace conslin {

namespace {

long binomial(int n, int k)
{
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

void sub_indices(const MultiIndex& j, std::size_t pos, MultiIndex cur, std::vector<MultiIndex>& out)
{
    if (pos == j.size()) {
        out.push_back(cur);
        return;
    }
    for (int k = 0; k <= j[pos].second; ++k)
        sub_indices(j, pos + 1, k ? raised(cur, j[pos].first, k) : cur, out);
}

} // namespace

int LinearOperator::order() const
{
    int k = 0;
    for (const auto& [key, b] : coeffs)
        if (!b.is_zero()) k = std::max(k, total_order(std::get<2>(key)));
    return k;
}

Expr LinearOperator::coefficient(int nu, int alpha, const MultiIndex& j) const
{
    auto it = coeffs.find({nu, alpha, j});
    return it == coeffs.end() ? Expr(0) : it->second;
}

void LinearOperator::add(int nu, int alpha, const MultiIndex& j, const Expr& b)
{
    auto key = std::make_tuple(nu, alpha, j);
    auto it = coeffs.find(key);
    Expr v = canonicalize(it == coeffs.end() ? b : it->second + b);
    if (v.is_zero()) {
        if (it != coeffs.end()) coeffs.erase(it);
    } else {
        coeffs[key] = v;
    }
}

std::vector<Expr> LinearOperator::equations(const std::vector<std::string>& dependents) const
{
    if (static_cast<int>(dependents.size()) != cols) throw ArityMismatch("operator column count mismatch");
    std::vector<Expr> out(static_cast<std::size_t>(rows), Expr(0));
    for (const auto& [key, b] : coeffs) {
        auto [nu, alpha, j] = key;
        auto& row = out[static_cast<std::size_t>(nu)];
        row = row + b * Expr::jet(dependents[static_cast<std::size_t>(alpha)], alpha, j);
    }
    for (auto& e : out) e = canonicalize(e);
    return out;
}

bool operator==(const LinearOperator& a, const LinearOperator& b)
{
    if (a.rows != b.rows || a.cols != b.cols || a.variables != b.variables) return false;
    for (const auto& [key, c] : a.coeffs)
        if (!canonicalize(c - b.coefficient(std::get<0>(key), std::get<1>(key), std::get<2>(key))).is_zero())
            return false;
    for (const auto& [key, c] : b.coeffs)
        if (!a.coeffs.count(key) && !c.is_zero()) return false;
    return true;
}

std::vector<Expr> apply_operator(const LinearOperator& l, const std::vector<Expr>& w)
{
    if (static_cast<int>(w.size()) != l.cols)
        throw ArityMismatch("operator expects " + std::to_string(l.cols) + " components, got " +
                            std::to_string(w.size()));
    std::vector<Poly> out(static_cast<std::size_t>(l.rows));
    std::map<std::pair<int, MultiIndex>, Poly> derivs;
    for (const auto& [key, b] : l.coeffs) {
        auto [nu, alpha, j] = key;
        auto it = derivs.find({alpha, j});
        if (it == derivs.end()) {
            Poly d = finalize(to_poly(canonicalize(w[static_cast<std::size_t>(alpha)])));
            for (const auto& [v, k] : j)
                for (int i = 0; i < k; ++i) d = total_derivative(d, v);
            it = derivs.emplace(std::make_pair(alpha, j), std::move(d)).first;
        }
        auto& row = out[static_cast<std::size_t>(nu)];
        row = poly_add(std::move(row), poly_mul(to_poly(b), it->second));
    }
    std::vector<Expr> res;
    for (auto& p : out) res.push_back(from_poly(finalize(p)));
    return res;
}

LinearOperator adjoint(const LinearOperator& l)
{
    LinearOperator a;
    a.variables = l.variables;
    a.rows = l.cols;
    a.cols = l.rows;
    for (const auto& [key, b] : l.coeffs) {
        auto [nu, alpha, j] = key;
        std::vector<MultiIndex> ks;
        sub_indices(j, 0, {}, ks);
        long sign = total_order(j) % 2 ? -1 : 1;
        for (const auto& k : ks) {
            long c = sign;
            for (const auto& [v, n] : j) c *= binomial(n, order_in(k, v));
            Expr d = total_derivative(b, index_difference(j, k));
            a.add(alpha, nu, k, Expr(c) * d);
        }
    }
    return a;
}

std::vector<Expr> bilinear_identity(const LinearOperator& l, const std::vector<Expr>& v, const std::vector<Expr>& w)
{
    if (static_cast<int>(v.size()) != l.rows || static_cast<int>(w.size()) != l.cols)
        throw ArityMismatch("bilinear identity: component count mismatch");
    std::vector<Poly> flux(l.variables.size());
    auto slot = [&](const std::string& var) {
        auto it = std::find(l.variables.begin(), l.variables.end(), var);
        if (it == l.variables.end()) throw std::invalid_argument("derivative in undeclared variable " + var);
        return static_cast<std::size_t>(it - l.variables.begin());
    };
    for (const auto& [key, b] : l.coeffs) {
        auto [nu, alpha, j] = key;
        Poly a = poly_mul(to_poly(canonicalize(v[static_cast<std::size_t>(nu)])), to_poly(b));
        MultiIndex rest = j;
        while (!rest.empty()) {
            const std::string var = rest.front().first;
            rest = raised(std::move(rest), var, -1);
            Poly dw = finalize(to_poly(canonicalize(w[static_cast<std::size_t>(alpha)])));
            for (const auto& [x, k] : rest)
                for (int i = 0; i < k; ++i) dw = total_derivative(dw, x);
            std::size_t s = slot(var);
            flux[s] = poly_add(std::move(flux[s]), poly_mul(a, dw));
            a = poly_scale(total_derivative(finalize(a), var), -1);
        }
    }
    std::vector<Expr> out;
    for (auto& p : flux) out.push_back(from_poly(finalize(p)));
    return out;
}

LinearOperator operator_from_equations(const std::vector<Expr>& equations, const std::vector<std::string>& variables,
                                       int cols)
{
    LinearOperator l;
    l.variables = variables;
    l.rows = static_cast<int>(equations.size());
    l.cols = cols;
    for (std::size_t nu = 0; nu < equations.size(); ++nu) {
        Expr e = canonicalize(equations[nu]);
        Expr rest = e;
        for (const auto& j : jets_of(e)) {
            if (j.dep_index() < 0 || j.dep_index() >= cols) throw ArityMismatch("jet outside operator columns");
            Expr c = partial(e, j);
            if (!jets_of(c).empty()) throw NotLinear("equation " + std::to_string(nu + 1) + " is not linear");
            l.add(static_cast<int>(nu), j.dep_index(), j.multi_index(), c);
            rest = rest - c * j;
        }
        if (!canonicalize(rest).is_zero())
            throw NotLinear("equation " + std::to_string(nu + 1) + " is not linear homogeneous");
    }
    return l;
}

} // namespace conslin
