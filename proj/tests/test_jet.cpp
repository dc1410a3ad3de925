#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "conslin/jet.hpp"
#include "conslin/probe.hpp"

using namespace conslin;

namespace {

Declarations xt(std::vector<std::string> deps, std::vector<std::string> funcs = {})
{
    Declarations d;
    d.independents = {"x", "t"};
    d.dependents = std::move(deps);
    d.parameters = {"p"};
    d.functions = std::move(funcs);
    return d;
}

PdeSystem system_of(const Declarations& d, std::vector<std::string> eqs)
{
    PdeSystem s;
    s.decls = d;
    for (const auto& e : eqs) s.equations.push_back(parse(e, d));
    return s;
}

FunctionConstraint constraint_of(std::vector<std::string> fns, std::vector<std::string> frame,
                                 std::vector<std::string> eqs, const Declarations& base)
{
    FunctionConstraint c;
    c.functions = std::move(fns);
    c.frame = std::move(frame);
    Declarations fd = c.frame_decls(base);
    for (const auto& e : eqs) c.equations.push_back(parse(e, fd));
    return c;
}

} // namespace

TEST_CASE("total derivative examples")
{
    auto d = xt({"U"});
    CHECK(total_derivative(parse("x*U", d), "x") == parse("U + x*U_x", d));
    auto d2 = xt({"U1", "U2"}, {"f"});
    CHECK(total_derivative(parse("exp(-U2/4)", d2), "t") == parse("-1/4*U2_t*exp(-U2/4)", d2));
    Expr lhs = total_derivative(parse("f(x - U2, t - log(U1))", d2), "x");
    Expr rhs = parse("f_{1}(x - U2, t - log(U1))*(1 - U2_x) - f_{2}(x - U2, t - log(U1))*U1_x/U1", d2);
    CHECK(lhs == rhs);
    CHECK(probe_is_zero(lhs - rhs));
}

TEST_CASE("euler operator examples")
{
    auto d = xt({"U"});
    CHECK(euler_operator(parse("1/2*U_x^2", d), 0) == parse("-U_xx", d));
    CHECK(euler_operator(total_derivative(parse("U*U_t*exp(U_x) + x*U^3", d), "x"), 0).is_zero());
    CHECK(euler_operator(parse("U_x*U_t", d), 0) == parse("-2*U_xt", d));
}

TEST_CASE("prolongation")
{
    auto d = xt({"U"});
    auto rules = prolong_rules({{parse("U_t", d), parse("U_xx", d)}}, {"x", "t"}, {"U"}, 3);
    bool found = false;
    for (const auto& r : rules)
        if (r.jet == parse("U_xt", d)) {
            found = true;
            CHECK(r.rhs == parse("U_xxx", d));
        }
    CHECK(found);

    auto b = xt({"u1", "u2"});
    Reducer red({{parse("u2_x", b), parse("2*u1", b)}, {parse("u2_t", b), parse("2*u1_x - u1^2", b)}});
    Expr g1 = parse("u2_x - 2*u1", b), g2 = parse("u2_t - 2*u1_x + u1^2", b);
    Expr r = red.reduce(total_derivative(g1, "t") - total_derivative(g2, "x"));
    Expr burgers = parse("u1_xx - u1*u1_x - u1_t", b);
    CHECK((canonicalize(r - 2 * burgers).is_zero() || canonicalize(r + 2 * burgers).is_zero()));

    CHECK_THROWS_AS(Reducer({{parse("U_t", d), parse("U_x", d)}, {parse("U_x", d), parse("U_t", d)}})
                        .reduce(parse("U_t", d)),
                    CyclicRules);
}

TEST_CASE("automatic leading choice")
{
    auto b = xt({"u1", "u2"});
    auto sys = system_of(b, {"u2_x - 2*u1", "u2_t - 2*u1_x + u1^2"});
    auto rules = sys.leading_rules();
    CHECK(rules[0].jet == parse("u2_x", b));
    CHECK(rules[1].jet == parse("u1_x", b));
    CHECK(rules[1].rhs == parse("(u2_t + u1^2)/2", b));

    auto tele = system_of(b, {"u2_t - u1_x", "u1_t + u1*(u1 - 1) - u1^2*u2_x"});
    auto tr = tele.leading_rules();
    CHECK(tr[0].jet == parse("u1_x", b));
    CHECK(tr[1].jet == parse("u2_x", b));
    CHECK(tr[1].rhs == parse("(u1_t + u1^2 - u1)/u1^2", b));
}

TEST_CASE("symmetry verification")
{
    auto b = xt({"u1", "u2"}, {"g", "F1", "F2"});
    auto burgers = system_of(b, {"u2_x - 2*u1", "u2_t - 2*u1_x + u1^2"});

    SymmetryGenerator tr;
    tr.xi = {Expr(1), Expr(0)};
    tr.eta = {Expr(0), Expr(0)};
    CHECK(verify_point_symmetry(burgers, tr).ok);

    SymmetryGenerator hc;
    hc.xi = {Expr(0), Expr(0)};
    hc.eta = {parse("exp(u2/4)*(2*g_{1}(x, t) + g(x, t)*u1)", b), parse("4*exp(u2/4)*g(x, t)", b)};
    hc.constraints = {constraint_of({"g"}, {"x", "t"}, {"g_xx - g_t"}, b)};
    auto rep = verify_point_symmetry(burgers, hc);
    CHECK(rep.ok);

    SymmetryGenerator bad = hc;
    bad.eta[1] = parse("2*exp(u2/4)*g(x, t)", b);
    CHECK_FALSE(verify_point_symmetry(burgers, bad).ok);

    auto tele = system_of(b, {"u2_t - u1_x", "u1_t + u1*(u1 - 1) - u1^2*u2_x"});
    SymmetryGenerator t2;
    t2.xi = {parse("F1(x - u2, t - log(u1))", b), parse("exp(-t)*F2(x - u2, t - log(u1))", b)};
    t2.eta = {parse("exp(-t)*u1*F2(x - u2, t - log(u1))", b), parse("F1(x - u2, t - log(u1))", b)};
    t2.constraints = {constraint_of({"F1", "F2"}, {"X", "T"}, {"F2_T - exp(T)*F1_X", "F2_X - exp(T)*F1_T"}, b)};
    CHECK(verify_point_symmetry(tele, t2).ok);
    SymmetryGenerator t2bad = t2;
    t2bad.eta[1] = parse("-F1(x - u2, t - log(u1))", b);
    CHECK_FALSE(verify_point_symmetry(tele, t2bad).ok);

    auto pd = xt({"u"}, {"F"});
    auto pipe = system_of(pd, {"u_t*u_xx + pow(u_x, p)"});
    SymmetryGenerator c;
    c.xi = {parse("-F_{2}(t, u_x)", pd), Expr(0)};
    c.eta = {parse("F(t, u_x) - u_x*F_{2}(t, u_x)", pd)};
    c.constraints = {constraint_of({"F"}, {"t", "q"}, {"pow(q, p)*F_qq - F_t"}, pd)};
    CHECK(verify_point_symmetry(pipe, c).ok);
}
