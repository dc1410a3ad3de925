#include "conslin/matrix.hpp"

#include <stdexcept>

namespace conslin {

namespace {

Matrix minor_of(const Matrix& a, std::size_t row, std::size_t col)
{
    Matrix m;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i == row) continue;
        std::vector<Expr> r;
        for (std::size_t j = 0; j < a.size(); ++j)
            if (j != col) r.push_back(a[i][j]);
        m.push_back(std::move(r));
    }
    return m;
}

} // namespace

Expr determinant(const Matrix& a)
{
    if (a.empty()) return Expr(1);
    if (a.size() == 1) return canonicalize(a[0][0]);
    Expr s;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (canonicalize(a[0][j]).is_zero()) continue;
        Expr t = a[0][j] * determinant(minor_of(a, 0, j));
        s = j % 2 ? s - t : s + t;
    }
    return canonicalize(s);
}

Matrix adjugate(const Matrix& a)
{
    const std::size_t n = a.size();
    Matrix adj(n, std::vector<Expr>(n, Expr(0)));
    if (n == 1) {
        adj[0][0] = Expr(1);
        return adj;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Expr c = determinant(minor_of(a, i, j));
            adj[j][i] = (i + j) % 2 ? canonicalize(-c) : c;
        }
    return adj;
}

std::vector<Expr> cramer(const Matrix& a, const std::vector<Expr>& b)
{
    Expr d = determinant(a);
    if (d.is_zero()) throw std::domain_error("singular matrix");
    Matrix adj = adjugate(a);
    std::vector<Expr> y;
    for (std::size_t i = 0; i < a.size(); ++i) {
        Expr s;
        for (std::size_t j = 0; j < a.size(); ++j) s = s + adj[i][j] * b[j];
        y.push_back(canonicalize(s / d));
    }
    return y;
}

} // namespace conslin
