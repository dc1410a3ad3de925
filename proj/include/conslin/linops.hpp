#pragma once

#include "conslin/jet.hpp"

#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace conslin {

/// L^nu_alpha[z] = sum_J b_{nu alpha J}(z) D_J, nu = 0..rows-1, alpha = 0..cols-1.
struct LinearOperator {
    std::vector<std::string> variables;
    int rows = 0;
    int cols = 0;
    std::map<std::tuple<int, int, MultiIndex>, Expr> coeffs;

    int order() const;
    Expr coefficient(int nu, int alpha, const MultiIndex& j) const;
    void add(int nu, int alpha, const MultiIndex& j, const Expr& b);
    /// Row nu written as a linear expression in jets of `dependents` (one per column).
    std::vector<Expr> equations(const std::vector<std::string>& dependents) const;
};

bool operator==(const LinearOperator& a, const LinearOperator& b);

class ArityMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NotLinear : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<Expr> apply_operator(const LinearOperator& l, const std::vector<Expr>& w);

LinearOperator adjoint(const LinearOperator& l);

/// Fluxes Y_i (one per variable) with V.LW - W.L*V = sum_i D_i Y_i, built by
/// moving one derivative at a time off W; each boundary term goes to the slot
/// of that derivative's direction.
std::vector<Expr> bilinear_identity(const LinearOperator& l, const std::vector<Expr>& v, const std::vector<Expr>& w);

/// Reads the operator off homogeneous linear equations in jets of `dependents`
/// (dependent index = column) over `variables`.
LinearOperator operator_from_equations(const std::vector<Expr>& equations, const std::vector<std::string>& variables,
                                       int cols);

} // namespace conslin
