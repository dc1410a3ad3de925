#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "random_expr.hpp"

#include "conslin/conslaw.hpp"
#include "conslin/linearize.hpp"
#include "conslin/probe.hpp"

using namespace conslin;
using conslin::testing::RandomExpr;

namespace {

// Canonical general expression; reciprocals of zero are redrawn.
Expr draw(RandomExpr& g, int depth)
{
    for (;;) {
        try {
            return canonicalize(g.general(depth));
        } catch (const DivisionByZero&) {
        }
    }
}

Interval range_of(const ProbeResult& r) { return r.exact ? Interval(r.value) : r.range; }

} // namespace

TEST_CASE("canonicalize is idempotent and round-trips through print")
{
    RandomExpr g(11);
    for (int i = 0; i < 1000; ++i) {
        Expr c = draw(g, 3);
        CAPTURE(to_string(c));
        REQUIRE(canonicalize(c) == c);
        CHECK(parse(to_string(c), g.decls()) == c);
    }
}

TEST_CASE("probe agrees before and after canonicalization")
{
    RandomExpr g(12);
    int compared = 0;
    for (int i = 0; i < 200; ++i) {
        Expr raw = g.general(3);
        Expr c;
        try {
            c = canonicalize(raw);
        } catch (const DivisionByZero&) {
            continue;
        }
        auto pt = random_assignment({raw, c}, 1000 + static_cast<std::uint64_t>(i));
        try {
            auto a = numeric_probe(raw, pt);
            auto b = numeric_probe(c, pt);
            ++compared;
            CAPTURE(to_string(c));
            if (a.exact && b.exact) CHECK(a.value == b.value);
            else CHECK((range_of(a) - range_of(b)).contains_zero());
        } catch (const ProbeDomainError&) {
        }
    }
    CHECK(compared >= 150);
}

TEST_CASE("Euler operator annihilates total divergences")
{
    RandomExpr g(13);
    for (int i = 0; i < 500; ++i) {
        Expr f1 = draw(g, 2), f2 = draw(g, 2);
        Expr div = total_derivative(f1, "x") + total_derivative(f2, "t");
        CAPTURE(to_string(f1));
        CAPTURE(to_string(f2));
        CHECK(euler_operator(div, 0).is_zero());
        CHECK(euler_operator(div, 1).is_zero());
    }
}

TEST_CASE("total derivatives commute and obey Leibniz")
{
    RandomExpr g(14);
    for (int i = 0; i < 500; ++i) {
        Expr e = draw(g, 3);
        CAPTURE(to_string(e));
        CHECK(total_derivative(total_derivative(e, "x"), "t") == total_derivative(total_derivative(e, "t"), "x"));
    }
    for (int i = 0; i < 200; ++i) {
        Expr a = draw(g, 2), b = draw(g, 2);
        Expr lhs = total_derivative(canonicalize(a * b), "x");
        Expr rhs = canonicalize(a * total_derivative(b, "x") + b * total_derivative(a, "x"));
        CHECK(canonicalize(lhs - rhs).is_zero());
    }
}

TEST_CASE("adjoint involution and bilinear identity")
{
    RandomExpr g(15);
    for (int i = 0; i < 100; ++i) {
        int rows = 1 + g.pick(2), cols = 1 + g.pick(2);
        LinearOperator l = g.linear_operator(rows, cols, 3);
        CHECK(adjoint(adjoint(l)) == l);

        std::vector<Expr> v, w;
        std::vector<Expr> args = {Expr::symbol("x"), Expr::symbol("t")};
        for (int r = 0; r < rows; ++r) v.push_back(Expr::func("P" + std::to_string(r), args));
        for (int c = 0; c < cols; ++c) w.push_back(Expr::func("Q" + std::to_string(c), args));
        auto lw = apply_operator(l, w);
        auto lsv = apply_operator(adjoint(l), v);
        auto y = bilinear_identity(l, v, w);
        Expr res;
        for (int r = 0; r < rows; ++r) res = res + v[static_cast<std::size_t>(r)] * lw[static_cast<std::size_t>(r)];
        for (int c = 0; c < cols; ++c) res = res - w[static_cast<std::size_t>(c)] * lsv[static_cast<std::size_t>(c)];
        res = res - total_derivative(y[0], "x") - total_derivative(y[1], "t");
        CHECK(canonicalize(res).is_zero());
    }
}

TEST_CASE("flux reconstruction round trip")
{
    RandomExpr g(16);
    Declarations d = g.decls();
    Expr u = d.dependent(0);
    int found = 0;
    for (int i = 0; i < 200; ++i) {
        Expr y1 = canonicalize(g.polynomial(3, 3, 2) + Expr(g.rational()) * Expr::exp(u / Expr(2)) * g.jet(1));
        Expr y2 = canonicalize(g.polynomial(3, 3, 2));
        Expr div = canonicalize(total_derivative(y1, "x") + total_derivative(y2, "t"));
        CAPTURE(to_string(div));
        std::vector<Expr> rec;
        try {
            rec = reconstruct_fluxes(div, d);
        } catch (const NotADivergence& e) {
            FAIL_CHECK(e.what());
            continue;
        }
        ++found;
        CHECK(canonicalize(total_derivative(rec[0], "x") + total_derivative(rec[1], "t") - div).is_zero());
    }
    CHECK(found == 200);
}

TEST_CASE("serial and parallel kernels agree")
{
    RandomExpr g(17);
    for (int i = 0; i < 20; ++i) {
        Expr e = draw(g, 3);
        std::vector<ProbeAssignment> pts;
        for (std::uint64_t s = 0; s < 16; ++s) pts.push_back(random_assignment({e}, 77 * s + static_cast<std::uint64_t>(i)));
        auto a = probe_batch(e, pts);
        auto b = probe_batch_serial(e, pts);
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            REQUIRE(a[k].has_value() == b[k].has_value());
            if (a[k]) CHECK(a[k]->str() == b[k]->str());
        }
    }
    for (int i = 0; i < 10; ++i) {
        PdeSystem sys;
        sys.decls = g.decls();
        sys.decls.dependents = {"U"};
        Declarations& d = sys.decls;
        Expr lead = d.dependent(0, {{"t", 1}});
        Expr u = d.dependent(0);
        sys.equations = {canonicalize(lead - g.coefficient() * d.dependent(0, {{"x", 2}}) - g.coefficient() * u * u)};
        MultiplierAnsatz a;
        auto par = determining_system(sys, a);
        auto ser = determining_system_serial(sys, a);
        REQUIRE(par.equations.size() == ser.equations.size());
        for (std::size_t k = 0; k < par.equations.size(); ++k) CHECK(par.equations[k].equation == ser.equations[k].equation);
    }
}

TEST_CASE("frame derivatives invert the coordinate Jacobian")
{
    RandomExpr g(18);
    Declarations d = g.decls();
    Expr x = d.independent("x"), t = d.independent("t");
    for (int i = 0; i < 50; ++i) {
        // Unit-Jacobian shear: X = x + a(t, U...), T = t.
        Expr a = canonicalize(g.polynomial(2, 2, 0));
        a = substitute(a, {{x, t}});
        std::vector<Expr> X = {canonicalize(x + a), t};
        FrameDerivative dx(X, d.independents);
        CHECK(dx.d(X[0], 0) == Expr(1));
        CHECK(dx.d(X[1], 1) == Expr(1));
        CHECK(dx.d(X[0], 1).is_zero());
        CHECK(dx.d(X[1], 0).is_zero());
        // Chain rule: D_X of a function of (X, T) is its first partial.
        Expr f = Expr::func("F", X);
        CHECK(dx.d(f, 0) == Expr::func("F", X, {1, 0}));
        CHECK(dx.d(f, 1) == Expr::func("F", X, {0, 1}));
    }
}
