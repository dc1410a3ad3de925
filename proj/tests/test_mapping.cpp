#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "conslin/mapping.hpp"
#include "conslin/probe.hpp"

using namespace conslin;

namespace {

Declarations decls(std::vector<std::string> vars, std::vector<std::string> deps, std::vector<std::string> funcs = {})
{
    Declarations d;
    d.independents = std::move(vars);
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

Transformation point(const Declarations& src, std::vector<std::string> vars, std::vector<std::string> deps,
                     std::vector<std::string> phi, std::vector<std::string> psi)
{
    Transformation t;
    t.source = src;
    t.target_vars = std::move(vars);
    t.target_deps = std::move(deps);
    for (const auto& e : phi) t.phi.push_back(parse(e, src));
    for (const auto& e : psi) t.psi.push_back(parse(e, src));
    return t;
}

Transformation burgers_map()
{
    auto b = decls({"x", "t"}, {"u1", "u2"});
    return point(b, {"x", "t"}, {"w1", "w2"}, {"x", "t"}, {"1/2*u1*exp(-u2/4)", "-exp(-u2/4)"});
}

} // namespace

TEST_CASE("identity transformation")
{
    auto d = decls({"x", "t"}, {"U"});
    auto sys = system_of(d, {"U_t - U_xx"});
    auto tr = point(d, {"z1", "z2"}, {"w"}, {"x", "t"}, {"U"});
    auto out = apply_transformation(sys, tr);
    auto expect = system_of(tr.target_decls(), {"w_z2 - w_z1z1"});
    CHECK(equivalent_systems(out.system, expect).equivalent);
    CHECK(out.system.equations[0] == clear_factors(expect.equations[0]));
}

TEST_CASE("burgers point map")
{
    auto b = decls({"x", "t"}, {"u1", "u2"});
    auto sys = system_of(b, {"u2_x - 2*u1", "u2_t - 2*u1_x + u1^2"});
    auto tr = burgers_map();
    CHECK(!transformation_jacobian(tr).is_zero());
    auto inv = invert(tr);
    auto td = tr.target_decls();
    CHECK(inv.u[0] == parse("-2*w1/w2", td));
    CHECK(inv.u[1] == parse("-4*log(-w2)", td));
    auto out = apply_transformation(sys, tr);
    auto linear_pair = system_of(td, {"w2_x - w1", "w1_x - w2_t"});
    auto rep = equivalent_systems(out.system, linear_pair);
    CHECK(rep.equivalent);
    // G1 maps to a multiple of the first row; G2 to a combination of both.
    CHECK(out.factors[0] == parse("-4/w2", td));
    CHECK(equivalent_systems(linear_pair, out.system).equivalent);
    CHECK(equivalent_systems(linear_pair, linear_pair).equivalent);

    // Round trip through the closed-form inverse.
    auto back = apply_transformation(linear_pair, inverse_transformation(tr));
    CHECK(equivalent_systems(back.system, sys).equivalent);

    // A wrong target is rejected.
    auto wrong = system_of(td, {"w2_x + w1", "w1_x - w2_t"});
    CHECK_FALSE(equivalent_systems(out.system, wrong).equivalent);
}

TEST_CASE("telegraph point maps")
{
    auto d = decls({"x", "t"}, {"u1", "u2"});
    auto sys = system_of(d, {"u2_t - u1_x", "u1_t + u1*(u1 - 1) - u1^2*u2_x"});
    auto tr = point(d, {"X", "T"}, {"w1", "w2"}, {"x - u2", "t - log(u1)"}, {"x", "u1"});
    auto out = apply_transformation(sys, tr);
    auto td = tr.target_decls();
    auto linear_pair = system_of(td, {"w1_X - w2_T - w2", "w2_X - w1_T"});
    CHECK(equivalent_systems(out.system, linear_pair).equivalent);

    auto sc = point(td, {"X", "T"}, {"v1", "v2"}, {"X", "T"}, {"w1", "exp(T)*w2"});
    auto out6 = apply_transformation(linear_pair, sc);
    auto symmetric = system_of(sc.target_decls(), {"v2_T - exp(T)*v1_X", "v2_X - exp(T)*v1_T"});
    CHECK(equivalent_systems(out6.system, symmetric).equivalent);

    auto back = apply_transformation(linear_pair, inverse_transformation(tr));
    CHECK(equivalent_systems(back.system, sys).equivalent);
}

TEST_CASE("contact maps")
{
    auto d = decls({"x", "t"}, {"u"});
    auto sys = system_of(d, {"u_t*u_xx + pow(u_x, p)"});
    Transformation to_z = point(d, {"z1", "z2"}, {"w"}, {"t", "u_x"}, {"u - x*u_x"});
    to_z.kind = TransformKind::Contact;
    to_z.rho = {parse("u_t", d), parse("-x", d)};
    CHECK(check_contact_condition(to_z));
    Transformation bad = to_z;
    bad.rho[1] = parse("x", d);
    CHECK_FALSE(check_contact_condition(bad));
    CHECK_THROWS_AS(apply_transformation(sys, bad), ContactViolation);

    auto out = apply_transformation(sys, to_z);
    auto linear_z = system_of(to_z.target_decls(), {"pow(z2, p)*w_z2z2 - w_z1"});
    CHECK(equivalent_systems(out.system, linear_z).equivalent);

    Transformation to_x = point(d, {"X", "T"}, {"w"}, {"u_x", "t"}, {"x*u_x - u"});
    to_x.kind = TransformKind::Contact;
    to_x.rho = {parse("x", d), parse("-u_t", d)};
    CHECK(check_contact_condition(to_x));
    auto inv = invert(to_x);
    auto td = to_x.target_decls();
    CHECK(inv.x[0] == parse("w_X", td));
    CHECK(inv.u[0] == parse("X*w_X - w", td));
    auto out_x = apply_transformation(sys, to_x);
    auto linear_x = system_of(td, {"pow(X, p)*w_XX - w_T"});
    CHECK(equivalent_systems(out_x.system, linear_x).equivalent);
}

TEST_CASE("singular maps")
{
    auto d = decls({"x", "t"}, {"u"});
    auto sys = system_of(d, {"u_t - u_xx"});
    auto tr = point(d, {"z1", "z2"}, {"w"}, {"x + t", "2*x + 2*t"}, {"u"});
    CHECK(transformation_jacobian(tr).is_zero());
    CHECK_THROWS_AS(apply_transformation(sys, tr), SingularJacobian);
}

TEST_CASE("solutions")
{
    // Hopf-Cole: u1 = -2 W_x / W solves Burgers whenever W_t = W_xx.
    auto d = decls({"x", "t"}, {"u1"}, {"W"});
    Expr u = parse("-2*W_{1}(x, t)/W(x, t)", d);
    Expr res = total_derivative(u, MultiIndex{{"x", 2}}) - u * total_derivative(u, "x") - total_derivative(u, "t");
    FunctionConstraint heat;
    heat.functions = {"W"};
    heat.frame = {"x", "t"};
    heat.equations = {parse("W_t - W_xx", heat.frame_decls(d))};
    CHECK_FALSE(canonicalize(res).is_zero());
    CHECK(ConstraintReducer({heat}).reduce(res).is_zero());

    auto tr = burgers_map();
    auto pushed = push_solution(tr, {parse("-exp(x + t)", tr.target_decls()), parse("-exp(x + t)", tr.target_decls())});
    CHECK(pushed.explicit_form);
    CHECK(pushed.u[0] == Expr(-2));
    CHECK(pushed.u[1] == parse("-4*x - 4*t", tr.source));
    auto b = tr.source;
    auto sys = system_of(b, {"u2_x - 2*u1", "u2_t - 2*u1_x + u1^2"});
    for (const auto& g : sys.equations) {
        Expr r = substitute(g, {{parse("u1", b), pushed.u[0]},
                                {parse("u2", b), pushed.u[1]},
                                {parse("u2_x", b), total_derivative(pushed.u[1], "x")},
                                {parse("u2_t", b), total_derivative(pushed.u[1], "t")},
                                {parse("u1_x", b), total_derivative(pushed.u[0], "x")}});
        CHECK(r.is_zero());
    }

    auto d1 = decls({"x", "t"}, {"U"});
    auto id = point(d1, {"x", "t"}, {"w"}, {"x", "t"}, {"U"});
    auto c = push_solution(id, {Expr(3)});
    CHECK(c.u[0] == Expr(3));
}
