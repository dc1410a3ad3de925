#pragma once

// Seeded random expressions over x, t and two dependents U, V.

#include "conslin/linops.hpp"

#include <random>

namespace conslin::testing {

inline Declarations random_decls()
{
    Declarations d;
    d.independents = {"x", "t"};
    d.dependents = {"U", "V"};
    d.parameters = {"p"};
    return d;
}

class RandomExpr {
public:
    explicit RandomExpr(std::uint64_t seed) : rng_(seed), d_(random_decls()) {}

    const Declarations& decls() const { return d_; }
    std::mt19937_64& rng() { return rng_; }

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

    Rational rational()
    {
        int num = std::uniform_int_distribution<int>(-5, 5)(rng_);
        int den = std::uniform_int_distribution<int>(1, 4)(rng_);
        return Rational(num, den);
    }

    Expr jet(int max_order)
    {
        MultiIndex mi;
        int k = pick(max_order + 1);
        for (int i = 0; i < k; ++i) mi = raised(std::move(mi), d_.independents[static_cast<std::size_t>(pick(2))]);
        return d_.dependent(pick(2), mi);
    }

    Expr atom(int max_order = 2)
    {
        switch (pick(4)) {
        case 0: return d_.independent(d_.independents[static_cast<std::size_t>(pick(2))]);
        case 1: return Expr(rational());
        default: return jet(max_order);
        }
    }

    /// Polynomial in atoms, `terms` terms of degree <= `degree`.
    Expr polynomial(int terms, int degree, int max_order = 2)
    {
        Expr s;
        for (int i = 0; i < terms; ++i) {
            Expr m = Expr(rational());
            int dg = pick(degree + 1);
            for (int j = 0; j < dg; ++j) m = m * atom(max_order);
            s = s + m;
        }
        return s;
    }

    /// General expression with exp, log, reciprocals and symbolic powers.
    Expr general(int depth)
    {
        if (depth == 0) return atom();
        switch (pick(8)) {
        case 0:
        case 1: return general(depth - 1) + general(depth - 1);
        case 2:
        case 3: return general(depth - 1) * general(depth - 1);
        case 4: return Expr::pow(general(depth - 1), pick(4) - 1);
        case 5: return Expr::exp(polynomial(2, 1));
        case 6: return Expr::log(jet(1));
        default: return Expr::sympow(jet(1), Expr::symbol("p", SymbolKind::Parameter));
        }
    }

    /// Coefficient for operators: polynomial in x, t only.
    Expr coefficient()
    {
        Expr s;
        int terms = 1 + pick(2);
        for (int i = 0; i < terms; ++i) {
            Expr m = Expr(rational());
            for (int j = pick(3); j > 0; --j) m = m * d_.independent(d_.independents[static_cast<std::size_t>(pick(2))]);
            s = s + m;
        }
        return s;
    }

    LinearOperator linear_operator(int rows, int cols, int order)
    {
        LinearOperator l;
        l.variables = d_.independents;
        l.rows = rows;
        l.cols = cols;
        int n = 1 + pick(4);
        for (int k = 0; k < n; ++k) {
            MultiIndex mi;
            for (int i = pick(order + 1); i > 0; --i) mi = raised(std::move(mi), d_.independents[static_cast<std::size_t>(pick(2))]);
            l.add(pick(rows), pick(cols), mi, coefficient());
        }
        return l;
    }

private:
    std::mt19937_64 rng_;
    Declarations d_;
};

} // namespace conslin::testing
