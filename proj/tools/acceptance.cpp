// One PASS/FAIL line per acceptance criterion; failed sub-checks go to stderr.

#include "random_expr.hpp"

#include "conslin/commands.hpp"
#include "conslin/probe.hpp"

#include <chrono>
#include <iostream>

using namespace conslin;

namespace {

std::string src(const std::string& rel) { return std::string(CONSLIN_SOURCE_DIR) + "/" + rel; }

class Criterion {
public:
    Criterion(int id, std::string title) : id_(id), title_(std::move(title)) {}

    void check(const std::string& what, bool ok)
    {
        ++total_;
        if (!ok) failed_.push_back(what);
    }

    template <class F>
    void guarded(const std::string& what, F f)
    {
        try {
            check(what, f());
        } catch (const std::exception& e) {
            check(what + " (threw: " + e.what() + ")", false);
        }
    }

    bool report() const
    {
        bool ok = failed_.empty();
        std::cout << "criterion " << id_ << " [" << title_ << "]: " << (ok ? "PASS" : "FAIL") << " ("
                  << total_ - failed_.size() << "/" << total_ << " checks)\n";
        for (const auto& f : failed_) std::cerr << "  criterion " << id_ << " failed: " << f << "\n";
        return ok;
    }

private:
    int id_;
    std::string title_;
    int total_ = 0;
    std::vector<std::string> failed_;
};

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

Transformation point(const Declarations& src_decls, std::vector<std::string> vars, std::vector<std::string> deps,
                     std::vector<std::string> phi, std::vector<std::string> psi)
{
    Transformation t;
    t.source = src_decls;
    t.target_vars = std::move(vars);
    t.target_deps = std::move(deps);
    for (const auto& e : phi) t.phi.push_back(parse(e, src_decls));
    for (const auto& e : psi) t.psi.push_back(parse(e, src_decls));
    return t;
}

bool all_zero(const std::vector<Expr>& v)
{
    for (const auto& e : v)
        if (!e.is_zero()) return false;
    return true;
}

// Q^T G = L~*[X] W, exactly and at 20 random points on the unsimplified difference.
bool identity_holds(const LinearizationCandidate& cand, const PdeSystem& sys)
{
    auto action = adjoint_action(cand, cand.W, sys.decls.independents);
    for (std::size_t mu = 0; mu < action.size(); ++mu) {
        Expr lhs;
        for (std::size_t nu = 0; nu < sys.size(); ++nu) lhs = lhs + cand.Q[nu][mu] * sys.equations[nu];
        Expr diff = lhs - action[mu];
        if (!canonicalize(diff).is_zero() || !probe_is_zero(diff, 20, 7 + mu)) return false;
    }
    return augmented_residual(cand, sys).is_zero();
}

LinearizationCandidate candidate(const Workspace& ws)
{
    auto cand = match_multiplier_form(ws.system, ws.multipliers->family, *ws.adjoint);
    augmented_identity(cand, ws.system);
    return cand;
}

bool constant_ratio(const Expr& a, const Expr& b)
{
    Expr r = canonicalize(a / b);
    return r.is_number() && !r.is_zero();
}

bool burgers(Criterion& c)
{
    auto ws = load_workspace(src("corpus/burgers.ws"));
    const auto& d = ws.decls;
    c.guarded("multipliers verify modulo f_xx + f_t", [&] { return verify_multipliers(ws.system, ws.multipliers->family).ok; });
    LinearizationCandidate cand;
    c.guarded("multiplier form matched, W extracted", [&] {
        cand = candidate(ws);
        return cand.J == Expr(1);
    });
    c.guarded("augmented identity residual is 0", [&] { return identity_holds(cand, ws.system); });
    c.guarded("fluxes equal the displayed ones", [&] {
        Declarations fd = d;
        fd.allow_undeclared_functions = true;
        return cand.fluxes.size() == 2 &&
               cand.fluxes[0] == parse("-exp(-U2/4)*(4*V2(x, t) + 2*U1*V1(x, t))", fd) &&
               cand.fluxes[1] == parse("-4*V1(x, t)*exp(-U2/4)", fd);
    });
    c.guarded("W proportional to the mapping components", [&] {
        return constant_ratio(cand.W[0], parse("1/2*U1*exp(-U2/4)", d)) &&
               constant_ratio(cand.W[1], parse("-exp(-U2/4)", d));
    });
    c.guarded("point map carries the system to the linear pair", [&] {
        auto tr = point(d, {"x", "t"}, {"w1", "w2"}, {"x", "t"}, {"1/2*U1*exp(-U2/4)", "-exp(-U2/4)"});
        auto out = apply_transformation(ws.system, tr);
        auto linear_pair = system_of(tr.target_decls(), {"w2_x - w1", "w1_x - w2_t"});
        auto wrong = system_of(tr.target_decls(), {"w2_x + w1", "w1_x - w2_t"});
        return equivalent_systems(out.system, linear_pair).equivalent && !equivalent_systems(out.system, wrong).equivalent;
    });
    c.guarded("Hopf-Cole substitution vanishes on heat solutions", [&] {
        Declarations hd;
        hd.independents = {"x", "t"};
        hd.dependents = {"u1"};
        hd.functions = {"W"};
        Expr u = parse("-2*W_{1}(x, t)/W(x, t)", hd);
        Expr res = total_derivative(u, MultiIndex{{"x", 2}}) - u * total_derivative(u, "x") - total_derivative(u, "t");
        FunctionConstraint heat = constraint_of({"W"}, {"x", "t"}, {"W_t - W_xx"}, hd);
        return !canonicalize(res).is_zero() && ConstraintReducer({heat}).reduce(res).is_zero();
    });
    return true;
}

bool pipeline(Criterion& c)
{
    auto ws = load_workspace(src("corpus/pipeline.ws"));
    Declarations d = ws.decls;
    c.guarded("v(U_x, t) verifies modulo the adjoint linear PDE", [&] { return verify_multipliers(ws.system, ws.multipliers->family).ok; });
    LinearizationCandidate cand;
    c.guarded("J = U_xx", [&] {
        cand = candidate(ws);
        return cand.J == parse("U_xx", d) && cand.contact;
    });
    c.guarded("augmented identity residual is 0", [&] { return identity_holds(cand, ws.system); });
    c.guarded("displayed flux identity holds", [&] {
        Declarations fd = d;
        fd.functions = {"V1"}; // our name for the adjoint unknown
        Expr lv = parse("V1_{2}(U_x, t) + pow(U_x, p)*V1_{1,1}(U_x, t) + 2*p*pow(U_x, p - 1)*V1_{1}(U_x, t)"
                        " + p*(p - 1)*pow(U_x, p - 2)*V1(U_x, t)", fd);
        // The V_X term carries a minus sign; with a plus the residual is D_x(2 U_x^p (U - x U_x) V_X).
        Expr phx = parse("(x*U_x - U)*(U_tx*V1(U_x, t) - pow(U_x, p)*V1_{1}(U_x, t))"
                         " + ((1 - p)*x*U_x + p*U)*pow(U_x, p - 1)*V1(U_x, t)", fd);
        Expr slip = parse("2*pow(U_x, p)*(U - x*U_x)*V1_{1}(U_x, t)", fd);
        Expr pht = parse("U_xx*(U - x*U_x)*V1(U_x, t)", fd);
        Expr raw = parse("V1(U_x, t)", fd) * ws.system.equations[0] - parse("(x*U_x - U)*U_xx", fd) * lv -
                   total_derivative(phx, "x") - total_derivative(pht, "t");
        Expr raw_plus = raw - total_derivative(slip, "x");
        // Ours may differ by a divergence-free pair.
        Expr diff = total_derivative(cand.fluxes[0] - phx, "x") + total_derivative(cand.fluxes[1] - pht, "t");
        return canonicalize(raw).is_zero() && probe_is_zero(raw, 20, 11) && !canonicalize(raw_plus).is_zero() &&
               canonicalize(diff).is_zero();
    });
    c.guarded("contact conditions hold for both contact maps", [&] {
        Transformation to_z = point(d, {"z1", "z2"}, {"w"}, {"t", "U_x"}, {"U - x*U_x"});
        to_z.kind = TransformKind::Contact;
        to_z.rho = {parse("U_t", d), parse("-x", d)};
        Transformation to_x = point(d, {"X", "T"}, {"w"}, {"U_x", "t"}, {"x*U_x - U"});
        to_x.kind = TransformKind::Contact;
        to_x.rho = {parse("x", d), parse("-U_t", d)};
        return check_contact_condition(to_z) && check_contact_condition(to_x);
    });
    c.guarded("contact map yields the linear PDE up to a nonzero factor", [&] {
        Transformation to_x = point(d, {"X", "T"}, {"w"}, {"U_x", "t"}, {"x*U_x - U"});
        to_x.kind = TransformKind::Contact;
        to_x.rho = {parse("x", d), parse("-U_t", d)};
        auto out = apply_transformation(ws.system, to_x);
        auto linear_pde = system_of(to_x.target_decls(), {"pow(X, p)*w_XX - w_T"});
        // The transformed equation is the linear PDE divided by w_XX.
        Expr scaled = canonicalize(out.system.equations[0] * parse("w_XX", linear_pde.decls) - linear_pde.equations[0]);
        return equivalent_systems(out.system, linear_pde).equivalent && scaled.is_zero();
    });
    return true;
}

bool telegraph(Criterion& c)
{
    auto ws = load_workspace(src("corpus/telegraph.ws"));
    const auto& d = ws.decls;
    c.guarded("characteristics give X = x - U2, T = t - log(U1)", [&] {
        const auto& raw = *ws.multipliers->raw;
        Declarations fd = raw.constraints[0].frame_decls(d);
        return ws.multipliers->invariants.size() == 2 && ws.multipliers->invariants[0] == parse("x - U2", fd) &&
               ws.multipliers->invariants[1] == parse("t - log(U1)", fd);
    });
    c.guarded("reduced multipliers verify modulo f_XX - f_TT + f_T", [&] {
        const auto& fam = ws.multipliers->family;
        Declarations rd = fam.constraints[0].frame_decls(d);
        Expr target = parse("f_XX - f_TT + f_T", rd), got = fam.constraints[0].equations[0];
        bool same = canonicalize(got - target).is_zero() || canonicalize(got + target).is_zero();
        return same && verify_multipliers(ws.system, fam).ok;
    });
    LinearizationCandidate cand;
    c.guarded("Jacobian matches the display", [&] {
        cand = candidate(ws);
        return canonicalize(cand.J - parse("1/U1*((1 - U2_x)*(U1 - U1_t) - U2_t*U1_x)", d)).is_zero();
    });
    c.guarded("augmented identity residual is 0", [&] { return identity_holds(cand, ws.system); });
    auto tr = point(d, {"X", "T"}, {"w1", "w2"}, {"x - U2", "t - log(U1)"}, {"x", "U1"});
    c.guarded("invariant map carries the system to the linear pair", [&] {
        auto out = apply_transformation(ws.system, tr);
        auto linear_pair = system_of(tr.target_decls(), {"w1_X - w2_T - w2", "w2_X - w1_T"});
        return equivalent_systems(out.system, linear_pair).equivalent;
    });
    c.guarded("rescaling w2 by exp(T) gives the symmetric pair", [&] {
        auto td = tr.target_decls();
        auto linear_pair = system_of(td, {"w1_X - w2_T - w2", "w2_X - w1_T"});
        auto sc = point(td, {"X", "T"}, {"v1", "v2"}, {"X", "T"}, {"w1", "exp(T)*w2"});
        auto out = apply_transformation(linear_pair, sc);
        auto symmetric = system_of(sc.target_decls(), {"v2_T - exp(T)*v1_X", "v2_X - exp(T)*v1_T"});
        return equivalent_systems(out.system, symmetric).equivalent;
    });
    return true;
}

void symmetries(Criterion& c)
{
    Declarations b;
    b.independents = {"x", "t"};
    b.dependents = {"u1", "u2"};
    b.parameters = {"p"};
    b.functions = {"g", "F1", "F2"};
    auto burgers = system_of(b, {"u2_x - 2*u1", "u2_t - 2*u1_x + u1^2"});
    SymmetryGenerator hc;
    hc.xi = {Expr(0), Expr(0)};
    hc.eta = {parse("exp(u2/4)*(2*g_{1}(x, t) + g(x, t)*u1)", b), parse("4*exp(u2/4)*g(x, t)", b)};
    hc.constraints = {constraint_of({"g"}, {"x", "t"}, {"g_xx - g_t"}, b)};
    c.guarded("Hopf-Cole generator modulo the heat equation", [&] { return verify_point_symmetry(burgers, hc).ok; });
    SymmetryGenerator bad = hc;
    bad.eta[1] = parse("2*exp(u2/4)*g(x, t)", b);
    c.guarded("corrupted Hopf-Cole generator rejected", [&] {
        auto r = verify_point_symmetry(burgers, bad);
        return !r.ok && !all_zero(r.residuals);
    });

    Declarations pd;
    pd.independents = {"x", "t"};
    pd.dependents = {"u"};
    pd.parameters = {"p"};
    pd.functions = {"F"};
    auto pipe = system_of(pd, {"u_t*u_xx + pow(u_x, p)"});
    SymmetryGenerator ct;
    ct.xi = {parse("-F_{2}(t, u_x)", pd), Expr(0)};
    ct.eta = {parse("F(t, u_x) - u_x*F_{2}(t, u_x)", pd)};
    ct.constraints = {constraint_of({"F"}, {"t", "q"}, {"pow(q, p)*F_qq - F_t"}, pd)};
    c.guarded("contact generator modulo its linear PDE", [&] { return verify_point_symmetry(pipe, ct).ok; });

    auto tele = system_of(b, {"u2_t - u1_x", "u1_t + u1*(u1 - 1) - u1^2*u2_x"});
    SymmetryGenerator t2;
    t2.xi = {parse("F1(x - u2, t - log(u1))", b), parse("exp(-t)*F2(x - u2, t - log(u1))", b)};
    t2.eta = {parse("exp(-t)*u1*F2(x - u2, t - log(u1))", b), parse("F1(x - u2, t - log(u1))", b)};
    t2.constraints = {constraint_of({"F1", "F2"}, {"X", "T"}, {"F2_T - exp(T)*F1_X", "F2_X - exp(T)*F1_T"}, b)};
    c.guarded("telegraph generator modulo its linear system", [&] { return verify_point_symmetry(tele, t2).ok; });
    SymmetryGenerator t2bad = t2;
    t2bad.eta[1] = parse("-F1(x - u2, t - log(u1))", b);
    c.guarded("corrupted telegraph generator rejected", [&] { return !verify_point_symmetry(tele, t2bad).ok; });
}

Expr draw(testing::RandomExpr& g, int depth)
{
    for (;;) {
        try {
            return canonicalize(g.general(depth));
        } catch (const DivisionByZero&) {
        }
    }
}

void properties(Criterion& c)
{
    c.guarded("Euler operator annihilates 500 random divergences", [&] {
        testing::RandomExpr g(501);
        for (int i = 0; i < 500; ++i) {
            Expr div = total_derivative(draw(g, 2), "x") + total_derivative(draw(g, 2), "t");
            if (!euler_operator(div, 0).is_zero() || !euler_operator(div, 1).is_zero()) return false;
        }
        return true;
    });
    c.guarded("adjoint involution and bilinear identity on 100 operators", [&] {
        testing::RandomExpr g(502);
        std::vector<Expr> args = {Expr::symbol("x"), Expr::symbol("t")};
        for (int i = 0; i < 100; ++i) {
            int rows = 1 + g.pick(2), cols = 1 + g.pick(2);
            LinearOperator l = g.linear_operator(rows, cols, 3);
            if (!(adjoint(adjoint(l)) == l)) return false;
            std::vector<Expr> v, w;
            for (int r = 0; r < rows; ++r) v.push_back(Expr::func("P" + std::to_string(r), args));
            for (int k = 0; k < cols; ++k) w.push_back(Expr::func("Q" + std::to_string(k), args));
            auto lw = apply_operator(l, w);
            auto lsv = apply_operator(adjoint(l), v);
            auto y = bilinear_identity(l, v, w);
            Expr res = -total_derivative(y[0], "x") - total_derivative(y[1], "t");
            for (std::size_t r = 0; r < v.size(); ++r) res = res + v[r] * lw[r];
            for (std::size_t k = 0; k < w.size(); ++k) res = res - w[k] * lsv[k];
            if (!canonicalize(res).is_zero()) return false;
        }
        return true;
    });
    c.guarded("flux round trip on 200 divergences", [&] {
        testing::RandomExpr g(503);
        Declarations d = g.decls();
        Expr u = d.dependent(0);
        for (int i = 0; i < 200; ++i) {
            Expr y1 = g.polynomial(3, 3, 2) + Expr(g.rational()) * Expr::exp(u / Expr(2)) * g.jet(1);
            Expr y2 = g.polynomial(3, 3, 2);
            Expr div = canonicalize(total_derivative(y1, "x") + total_derivative(y2, "t"));
            auto rec = reconstruct_fluxes(div, d);
            if (!canonicalize(total_derivative(rec[0], "x") + total_derivative(rec[1], "t") - div).is_zero()) return false;
        }
        return true;
    });
    c.guarded("canonicalize idempotent on 1000 expressions", [&] {
        testing::RandomExpr g(504);
        for (int i = 0; i < 1000; ++i) {
            Expr e = draw(g, 3);
            if (!(canonicalize(e) == e)) return false;
        }
        return true;
    });
    for (const char* f : {"corpus/burgers.ws", "corpus/pipeline.ws", "corpus/telegraph.ws"}) {
        c.guarded(std::string("Euler-extraction equivalence on ") + f, [&] {
            auto ws = load_workspace(src(f));
            auto cand = candidate(ws);
            return all_zero(euler_extraction_residuals(cand, ws.system));
        });
    }
}

void negative_controls(Criterion& c)
{
    auto code = [](const char* cmd, const char* f) { return run_command(cmd, src(f), {}).exit_code; };
    c.guarded("sign-corrupted W exits 4", [&] { return code("verify", "tests/data/burgers_bad_w.ws") == kResidualFailure; });
    c.guarded("corrupted rho exits 4", [&] { return code("verify", "tests/data/pipeline_bad_rho.ws") == kResidualFailure; });
    c.guarded("family without arbitrary functions exits 2", [&] {
        return code("linearize", "tests/data/toy_family.ws") == kRejected;
    });
    c.guarded("sign-corrupted W fails the library identity check", [&] {
        auto ws = load_workspace(src("corpus/burgers.ws"));
        auto cand = candidate(ws);
        cand.W[1] = canonicalize(-cand.W[1]);
        return !verify_linearization(ws.system, cand).ok && !augmented_residual(cand, ws.system).is_zero();
    });
    c.guarded("uncorrupted controls succeed", [&] {
        return code("verify", "tests/data/burgers_w.ws") == kOk && code("verify", "tests/data/pipeline_contact.ws") == kOk;
    });
}

} // namespace

int main()
{
    auto start = std::chrono::steady_clock::now();
    bool ok = true;
    Criterion c1(1, "burgers corpus"), c2(2, "pipeline corpus"), c3(3, "telegraph corpus"), c4(4, "symmetry verifications"),
        c5(5, "property suites"), c6(6, "negative controls");
    burgers(c1);
    pipeline(c2);
    telegraph(c3);
    symmetries(c4);
    properties(c5);
    negative_controls(c6);
    for (const auto* c : {&c1, &c2, &c3, &c4, &c5, &c6}) ok = c->report() && ok;
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "acceptance: " << (ok ? "PASS" : "FAIL") << " in " << secs << " s\n";
    return ok ? 0 : 1;
}
