#pragma once

#include "conslin/expr.hpp"

#include <vector>

namespace conslin {

using Matrix = std::vector<std::vector<Expr>>;

/// Cofactor expansion; the systems here are at most a few variables wide.
Expr determinant(const Matrix& a);
/// adj(A) with A * adj(A) = det(A) * I.
Matrix adjugate(const Matrix& a);
/// Solution of A y = b by Cramer's rule. Throws std::domain_error if det(A) is 0.
std::vector<Expr> cramer(const Matrix& a, const std::vector<Expr>& b);

} // namespace conslin
