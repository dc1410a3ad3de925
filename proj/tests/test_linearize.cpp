#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "conslin/linearize.hpp"

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

// L~ over `frame` acting on v1..vM, plus the v definitions as frame jets.
AdjointSystem adjoint_of(const FunctionConstraint& c, const Declarations& base, std::vector<std::string> defs,
                         std::vector<std::string> names, std::vector<std::string> eqs)
{
    AdjointSystem a;
    a.frame = c.frame;
    a.names = names;
    Declarations fd = c.frame_decls(base);
    for (const auto& e : defs) a.definitions.push_back(parse(e, fd));
    Declarations vd;
    vd.independents = c.frame;
    vd.dependents = names;
    vd.parameters = base.parameters;
    std::vector<Expr> rows;
    for (const auto& e : eqs) rows.push_back(parse(e, vd));
    a.op = operator_from_equations(rows, c.frame, static_cast<int>(names.size()));
    return a;
}

bool all_zero(const std::vector<Expr>& v)
{
    for (const auto& e : v)
        if (!e.is_zero()) return false;
    return true;
}

struct Case {
    PdeSystem sys;
    MultiplierFamily fam;
    AdjointSystem adj;
};

Case burgers()
{
    auto b = xt({"U1", "U2"}, {"f"});
    Case c;
    c.sys = system_of(b, {"U2_x - 2*U1", "U2_t - 2*U1_x + U1^2"});
    c.fam.components = {parse("1/2*U1*exp(-U2/4)*f(x, t) + exp(-U2/4)*f_{1}(x, t)", b),
                        parse("exp(-U2/4)*f(x, t)", b)};
    c.fam.constraints = {constraint_of({"f"}, {"x", "t"}, {"f_xx + f_t"}, b)};
    c.fam.coordinates = {parse("x", b), parse("t", b)};
    c.adj = adjoint_of(c.fam.constraints[0], b, {"f", "f_x"}, {"v1", "v2"}, {"v1_x - v2", "v2_x + v1_t"});
    return c;
}

Case pipeline()
{
    auto d = xt({"U"}, {"v"});
    Case c;
    c.sys = system_of(d, {"U_t*U_xx + pow(U_x, p)"});
    c.fam.components = {parse("v(U_x, t)", d)};
    std::string l = "v_T + pow(X, p)*v_XX + 2*p*pow(X, p - 1)*v_X + p*(p - 1)*pow(X, p - 2)*v";
    c.fam.constraints = {constraint_of({"v"}, {"X", "T"}, {l}, d)};
    c.fam.coordinates = {parse("U_x", d), parse("t", d)};
    c.adj = adjoint_of(c.fam.constraints[0], d, {"v"}, {"v"}, {l});
    return c;
}

Case telegraph()
{
    auto d = xt({"U1", "U2"}, {"f"});
    Case c;
    c.sys = system_of(d, {"U2_t - U1_x", "U1_t + U1*(U1 - 1) - U1^2*U2_x"});
    c.fam.components = {parse("-f_{1}(x - U2, t - log(U1))", d), parse("-f_{2}(x - U2, t - log(U1))/U1", d)};
    c.fam.constraints = {constraint_of({"f"}, {"X", "T"}, {"f_XX - f_TT + f_T"}, d)};
    c.fam.coordinates = {parse("x - U2", d), parse("t - log(U1)", d)};
    c.adj = adjoint_of(c.fam.constraints[0], d, {"-f_X", "-f_T"}, {"v1", "v2"}, {"v1_X - v2_T + v2", "v2_X - v1_T"});
    return c;
}

} // namespace

TEST_CASE("jacobians")
{
    auto d = xt({"U1", "U2"});
    auto sys = system_of(d, {"U1"});
    CHECK(jacobian({parse("x", d), parse("t", d)}, sys) == Expr(1));
    CHECK(jacobian({parse("U1_x", d), parse("t", d)}, sys) == parse("U1_xx", d));
    Expr j = jacobian({parse("x - U2", d), parse("t - log(U1)", d)}, sys);
    CHECK(canonicalize(j - parse("1/U1*((1 - U2_x)*(U1 - U1_t) - U2_t*U1_x)", d)).is_zero());
    CHECK(jacobian({parse("x + t", d), parse("2*x + 2*t", d)}, sys).is_zero());
}

TEST_CASE("burgers linearization")
{
    auto c = burgers();
    const auto& b = c.sys.decls;
    auto cand = match_multiplier_form(c.sys, c.fam, c.adj);
    CHECK(cand.J == Expr(1));
    CHECK_FALSE(cand.contact);
    CHECK(cand.QJ[0][0] == parse("1/2*U1*exp(-U2/4)", b));
    CHECK(cand.QJ[1][1].is_zero());
    augmented_identity(cand, c.sys);
    REQUIRE(cand.W.size() == 2);
    CHECK(cand.W[0] == parse("2*U1*exp(-U2/4)", b));
    CHECK(cand.W[1] == parse("4*exp(-U2/4)", b));
    CHECK(augmented_residual(cand, c.sys).is_zero());
    CHECK(all_zero(euler_extraction_residuals(cand, c.sys)));

    auto rep = verify_linearization(c.sys, cand);
    CHECK(rep.ok);
    CHECK(rep.mapping_checked);
    CHECK(rep.mapping_ok);

    auto tr = build_mapping(cand, c.sys);
    auto td = tr.target_decls();
    auto out = apply_transformation(c.sys, tr);
    // The familiar linear form after w1 -> -w1/2.
    auto linear_pair = system_of(td, {"w2_z1 + 1/2*w1", "-1/2*w1_z1 - w2_z2"});
    CHECK(equivalent_systems(out.system, linear_pair).equivalent);

    // Sign-flipped W is reported.
    auto bad = cand;
    bad.W[1] = canonicalize(-bad.W[1]);
    CHECK_FALSE(verify_linearization(c.sys, bad).ok);
    CHECK_FALSE(augmented_residual(bad, c.sys).is_zero());
}

TEST_CASE("pipeline contact linearization")
{
    auto c = pipeline();
    const auto& d = c.sys.decls;
    auto cand = match_multiplier_form(c.sys, c.fam, c.adj);
    CHECK(cand.J == parse("U_xx", d));
    CHECK(cand.contact);
    augmented_identity(cand, c.sys);
    REQUIRE(cand.W.size() == 1);
    Expr w = parse("x*U_x - U", d);
    CHECK((cand.W[0] == w || cand.W[0] == canonicalize(-w)));
    CHECK(augmented_residual(cand, c.sys).is_zero());
    CHECK(all_zero(euler_extraction_residuals(cand, c.sys)));

    auto tr = build_mapping(cand, c.sys);
    CHECK(tr.kind == TransformKind::Contact);
    CHECK(check_contact_condition(tr));
    auto out = apply_transformation(c.sys, tr);
    auto linear_pde = system_of(tr.target_decls(), {"pow(z1, p)*w1_z1z1 - w1_z2"});
    CHECK(equivalent_systems(out.system, linear_pde).equivalent);
    CHECK(verify_linearization(c.sys, cand).ok);

    // IntegratingFactor needs X = x.
    CHECK_THROWS_AS(match_multiplier_form(c.sys, c.fam, c.adj, AnsatzShape::IntegratingFactor), Rejection);
}

TEST_CASE("telegraph linearization")
{
    auto c = telegraph();
    const auto& d = c.sys.decls;
    auto cand = match_multiplier_form(c.sys, c.fam, c.adj);
    CHECK(cand.QJ[0][0] == Expr(1));
    CHECK(cand.QJ[1][1] == parse("1/U1", d));
    CHECK(cand.QJ[0][1].is_zero());
    augmented_identity(cand, c.sys);
    REQUIRE(cand.W.size() == 2);
    // The pair {U1, x}, in either slot order.
    std::vector<Expr> pair = {parse("U1", d), parse("x", d)};
    for (const auto& w : cand.W) {
        bool hit = false;
        for (const auto& p : pair) hit = hit || w == p || w == canonicalize(-p);
        CHECK(hit);
    }
    CHECK(augmented_residual(cand, c.sys).is_zero());
    CHECK(all_zero(euler_extraction_residuals(cand, c.sys)));
    auto rep = verify_linearization(c.sys, cand);
    CHECK(rep.ok);
    CHECK(rep.mapping_ok);

    // The target rescales to the constant-coefficient form with exp(T).
    auto tgt = target_system(cand, c.sys);
    auto tr = build_mapping(cand, c.sys);
    auto out = apply_transformation(c.sys, tr);
    CHECK(equivalent_systems(out.system, tgt).equivalent);
}

TEST_CASE("rejections")
{
    auto c = burgers();
    // Dependent coordinates.
    auto dep = c;
    dep.fam.coordinates = {parse("x + t", c.sys.decls), parse("2*x + 2*t", c.sys.decls)};
    CHECK_THROWS_AS(match_multiplier_form(dep.sys, dep.fam, dep.adj), Rejection);

    // v that does not solve L~ v = 0.
    auto wrong = c;
    wrong.fam.constraints = {constraint_of({"f"}, {"x", "t"}, {"f_xx - f_t"}, c.sys.decls)};
    CHECK_THROWS_AS(match_multiplier_form(wrong.sys, wrong.fam, wrong.adj), Rejection);

    // Multipliers not linear in v.
    auto quad = c;
    quad.fam.components[1] = parse("exp(-U2/4)*f(x, t)^2", c.sys.decls);
    CHECK_THROWS_AS(match_multiplier_form(quad.sys, quad.fam, quad.adj), Rejection);
}

TEST_CASE("integrating factor case")
{
    auto d = xt({"U"}, {"v"});
    auto sys = system_of(d, {"U_t - U_xx"});
    MultiplierFamily fam;
    fam.components = {parse("v(x, t)", d)};
    fam.constraints = {constraint_of({"v"}, {"x", "t"}, {"v_t + v_xx"}, d)};
    fam.coordinates = {parse("x", d), parse("t", d)};
    auto adj = adjoint_of(fam.constraints[0], d, {"v"}, {"v"}, {"v_t + v_xx"});
    auto cand = match_multiplier_form(sys, fam, adj, AnsatzShape::IntegratingFactor);
    augmented_identity(cand, sys);
    CHECK(cand.W[0] == parse("-U", d));
    CHECK(cand.W_normalized[0] == parse("U", d));
    CHECK(cand.w_scale[0] == Rational(-1));
    CHECK(augmented_residual(cand, sys).is_zero());
    CHECK(verify_linearization(sys, cand).ok);
}
