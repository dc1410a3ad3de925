#pragma once

#include "conslin/expr.hpp"

#include <map>
#include <optional>
#include <vector>

namespace conslin {

/// A kernel raised to an integer power. Kernels are canonical atoms, exp/log/pow
/// nodes, or (with negative exponent only) canonical sums standing for a
/// reciprocal denominator.
struct Factor {
    Expr kernel;
    long exp = 0;
};

/// Factors sorted by `kernel_compare`, one entry per kernel, no zero exponents.
using Monomial = std::vector<Factor>;

int kernel_compare(const Expr& a, const Expr& b);

/// Graded lexicographic order on exponent vectors (a group order, so it is
/// compatible with monomial multiplication even for negative exponents).
struct MonomialLess {
    bool operator()(const Monomial& a, const Monomial& b) const;
};

using Poly = std::map<Monomial, Rational, MonomialLess>;

Poly poly_const(const Rational& q);
Poly poly_kernel(const Expr& kernel, long exp = 1);
Poly poly_add(Poly a, const Poly& b);
Poly poly_sub(Poly a, const Poly& b);
Poly poly_scale(Poly a, const Rational& q);
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_pow(const Poly& a, long n);
Poly poly_inverse(const Poly& a);
bool poly_is_monomial(const Poly& a);

/// Normal form of an arbitrary tree (without the final denominator pass).
Poly to_poly(const Expr& e);
/// Full normal form: combines reciprocal kernels over a common denominator,
/// cancels exact factors, and yields zero iff the numerator vanishes.
Poly finalize(const Poly& p);
Expr from_poly(const Poly& p);

/// Numerator/denominator split. `numerator` is free of reciprocal kernels;
/// `denominator` holds the reciprocal kernels (negative exponents).
struct Together {
    Poly numerator;
    Monomial denominator;
};
Together together(const Poly& p);

/// Exact quotient a / b when b divides a, within a bounded number of steps.
std::optional<Poly> poly_exact_divide(const Poly& a, const Poly& b);

/// Builders for the transcendental kernels with their merge rules applied.
Poly make_exp(const Poly& arg);
Poly make_log(const Poly& arg);
Poly make_sympow(const Poly& base, const Poly& exponent);

bool is_reciprocal_kernel(const Factor& f);

/// Derivation rule applied to kernels. Returning nullopt means "use the chain
/// rule" for composite kernels and zero for symbols and jets.
using KernelDerivative = std::function<std::optional<Poly>(const Expr& kernel)>;

Poly differentiate(const Poly& p, const KernelDerivative& rule);
Expr differentiate(const Expr& e, const KernelDerivative& rule);

/// Splits `p` by the monomial formed from factors whose kernel satisfies
/// `selector`: result maps that sub-monomial to its coefficient polynomial.
std::map<Monomial, Poly, MonomialLess> split_by(const Poly& p,
                                               const std::function<bool(const Expr&)>& selector);

} // namespace conslin
