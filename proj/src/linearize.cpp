#include "conslin/linearize.hpp"

#include <algorithm>
#include <set>

namespace conslin {

namespace {

bool has_derivative_jets(const Expr& e)
{
    for (const auto& j : jets_of(e))
        if (!j.multi_index().empty()) return true;
    return false;
}

Matrix jacobian_matrix(const std::vector<Expr>& X, const std::vector<std::string>& vars)
{
    Matrix a;
    for (const auto& xi : X) {
        std::vector<Expr> row;
        for (const auto& v : vars) row.push_back(total_derivative(xi, v));
        a.push_back(std::move(row));
    }
    return a;
}

// Frame symbols (and function arguments built from them) mapped to X.
Expr frame_to_x(const Expr& e, const std::vector<std::string>& frame, const std::vector<Expr>& X)
{
    return map_atoms(e, [&](const Expr& a) -> std::optional<Expr> {
        if (a.kind() != Kind::Symbol || a.symbol_kind() != SymbolKind::Independent) return std::nullopt;
        auto it = std::find(frame.begin(), frame.end(), a.name());
        if (it == frame.end()) return std::nullopt;
        return X[static_cast<std::size_t>(it - frame.begin())];
    });
}

std::vector<Expr> frame_symbols(const std::vector<std::string>& frame)
{
    std::vector<Expr> out;
    for (const auto& f : frame) out.push_back(Expr::symbol(f));
    return out;
}

std::string w_func(std::size_t a) { return "$W" + std::to_string(a + 1); }
std::string v_func(std::size_t l) { return "V" + std::to_string(l + 1); }

// Replaces $W_alpha function terms (frame arguments) by D_X^K W_alpha, and the
// remaining frame symbols by X.
Expr realize(const Expr& e, const LinearizationCandidate& cand, const FrameDerivative& dx, const std::vector<Expr>& W)
{
    return map_atoms(e, [&](const Expr& a) -> std::optional<Expr> {
        if (a.kind() == Kind::Func && a.name().rfind("$W", 0) == 0) {
            std::size_t alpha = std::stoul(a.name().substr(2)) - 1;
            std::vector<int> orders = a.orders();
            orders.resize(cand.frame.size(), 0);
            return dx.d(W[alpha], orders);
        }
        if (a.kind() == Kind::Symbol && a.symbol_kind() == SymbolKind::Independent) {
            auto it = std::find(cand.frame.begin(), cand.frame.end(), a.name());
            if (it != cand.frame.end()) return cand.X[static_cast<std::size_t>(it - cand.frame.begin())];
        }
        return std::nullopt;
    });
}

std::vector<Expr> rhs_rows(const LinearizationCandidate& cand, const PdeSystem& sys)
{
    std::vector<Expr> out;
    for (std::size_t mu = 0; mu < cand.Q.front().size(); ++mu) {
        Expr s;
        for (std::size_t nu = 0; nu < sys.size(); ++nu) s = s + cand.Q[nu][mu] * sys.equations[nu];
        out.push_back(canonicalize(s));
    }
    return out;
}

void monomials_up_to(const std::vector<Expr>& vars, std::size_t start, int left, const Expr& cur, std::vector<Expr>& out)
{
    out.push_back(cur);
    if (left == 0) return;
    for (std::size_t i = start; i < vars.size(); ++i) monomials_up_to(vars, i, left - 1, cur * vars[i], out);
}

// Gauss-Jordan over Q; returns nullopt when inconsistent. Free unknowns are 0.
std::optional<std::vector<Rational>> solve_linear(std::vector<std::vector<Rational>> rows, std::vector<Rational> rhs,
                                                  std::size_t cols)
{
    std::vector<int> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
        std::size_t p = r;
        while (p < rows.size() && rows[p][c] == 0) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[p], rows[r]);
        std::swap(rhs[p], rhs[r]);
        Rational inv = 1 / rows[r][c];
        for (auto& x : rows[r]) x *= inv;
        rhs[r] *= inv;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (k == r || rows[k][c] == 0) continue;
            Rational f = rows[k][c];
            for (std::size_t j = 0; j < cols; ++j) rows[k][j] -= f * rows[r][j];
            rhs[k] -= f * rhs[r];
        }
        pivot_col.push_back(static_cast<int>(c));
        ++r;
    }
    for (std::size_t k = r; k < rows.size(); ++k)
        if (rhs[k] != 0) return std::nullopt;
    std::vector<Rational> sol(cols, 0);
    for (std::size_t k = 0; k < r; ++k) sol[static_cast<std::size_t>(pivot_col[k])] = rhs[k];
    return sol;
}

} // namespace

Expr jacobian(const std::vector<Expr>& X, const PdeSystem& sys)
{
    return determinant(jacobian_matrix(X, sys.decls.independents));
}

FrameDerivative::FrameDerivative(const std::vector<Expr>& X, const std::vector<std::string>& vars) : vars_(vars)
{
    Matrix a = jacobian_matrix(X, vars);
    Expr det = determinant(a);
    if (det.is_zero()) throw SingularJacobian("coordinates are functionally dependent");
    Matrix adj = adjugate(a);
    const std::size_t n = X.size();
    coef_.assign(n, std::vector<Expr>(vars.size()));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < vars.size(); ++j) coef_[i][j] = canonicalize(adj[j][i] / det);
}

Expr FrameDerivative::d(const Expr& e, std::size_t i) const
{
    Expr s;
    for (std::size_t j = 0; j < vars_.size(); ++j)
        if (!coef_[i][j].is_zero()) s = s + coef_[i][j] * total_derivative(e, vars_[j]);
    return canonicalize(s);
}

Expr FrameDerivative::d(const Expr& e, const std::vector<int>& orders) const
{
    Expr r = e;
    for (std::size_t i = 0; i < orders.size(); ++i)
        for (int k = 0; k < orders[i]; ++k) r = d(r, i);
    return canonicalize(r);
}

LinearizationCandidate match_multiplier_form(const PdeSystem& sys, const MultiplierFamily& fam, const AdjointSystem& adj,
                                             AnsatzShape shape)
{
    const auto& vars = sys.decls.independents;
    const std::size_t n = vars.size();
    if (fam.coordinates.size() != n || adj.frame.size() != n)
        throw Rejection("the arbitrary functions depend on " + std::to_string(fam.coordinates.size()) +
                        " variables but the system has " + std::to_string(n) +
                        " independents: no invertible point or contact map (Case I)");
    for (std::size_t i = 0; i < n; ++i) {
        const auto& f = adj.frame[i];
        if (std::find(vars.begin(), vars.end(), f) != vars.end() && fam.coordinates[i] != Expr::symbol(f))
            throw Rejection("frame variable '" + f + "' clashes with a system independent of a different meaning");
    }
    LinearizationCandidate cand;
    cand.frame = adj.frame;
    cand.X = fam.coordinates;
    cand.A = jacobian_matrix(cand.X, vars);
    cand.J = determinant(cand.A);
    if (cand.J.is_zero()) throw Rejection("coordinates X are functionally dependent (J = 0)");
    const std::size_t M = adj.definitions.size();
    if (sys.size() != M)
        throw Rejection("Q would be " + std::to_string(sys.size()) + "x" + std::to_string(M) +
                        "; only square Q is supported");
    if (adj.op.cols != static_cast<int>(M)) throw Rejection("the linear system does not act on all v components");
    cand.ltilde = adj.op;

    auto functions = fam.functions();
    if (functions.empty()) throw Rejection("multipliers involve no arbitrary function (Case I)");
    std::vector<std::pair<Expr, Rational>> vf;
    for (const auto& def : adj.definitions) {
        Poly p = finalize(to_poly(from_frame(def, functions, adj.frame, cand.X)));
        if (p.size() != 1 || p.begin()->first.size() != 1 || p.begin()->first[0].exp != 1 ||
            p.begin()->first[0].kernel.kind() != Kind::Func)
            throw Rejection("each v component must be a constant multiple of one derivative of the arbitrary function");
        vf.emplace_back(p.begin()->first[0].kernel, p.begin()->second);
    }
    auto mentions_family = [&](const Expr& e) {
        for (const auto& f : funcs_of(e))
            if (std::find(functions.begin(), functions.end(), f.name()) != functions.end()) return true;
        return false;
    };
    for (std::size_t nu = 0; nu < M; ++nu) {
        Expr lam = canonicalize(fam.components[nu]);
        std::vector<Expr> row;
        Expr rest = lam;
        for (const auto& [func, c] : vf) {
            Expr coef = canonicalize(partial(lam, func) / Expr(c));
            if (mentions_family(coef)) throw Rejection("multiplier component " + std::to_string(nu + 1) + " is not linear in v");
            row.push_back(coef);
            rest = rest - coef * Expr(c) * func;
        }
        if (!canonicalize(rest).is_zero())
            throw Rejection("multiplier component " + std::to_string(nu + 1) + " is not of the form v(X) Q J");
        cand.QJ.push_back(std::move(row));
    }
    cand.Q = cand.QJ;
    for (auto& row : cand.Q)
        for (auto& q : row) q = canonicalize(q / cand.J);
    if (determinant(cand.QJ).is_zero()) throw Rejection("det Q vanishes identically (degenerate multipliers)");

    // v must actually satisfy L~ v = 0 modulo the family's constraints.
    auto lv = apply_operator(adj.op, adj.definitions);
    for (const auto& c : fam.constraints) {
        Reducer red(c.leading_rules());
        for (auto& e : lv) e = red.reduce(e);
    }
    for (const auto& e : lv)
        if (!e.is_zero()) throw Rejection("the linear system is not satisfied by v modulo the constraints");

    cand.contact = false;
    for (const auto& x : cand.X) cand.contact = cand.contact || has_derivative_jets(x);
    if (shape != AnsatzShape::General) {
        for (std::size_t i = 0; i < n; ++i)
            if (cand.X[i] != Expr::symbol(vars[i])) throw Rejection("preset requires X = x");
    }
    if (shape == AnsatzShape::IntegratingFactor)
        for (const auto& row : cand.Q)
            for (const auto& q : row)
                if (has_derivative_jets(q)) throw Rejection("integrating-factor preset requires Q(x, U)");
    return cand;
}

std::vector<Expr> adjoint_action(const LinearizationCandidate& cand, const std::vector<Expr>& W,
                                 const std::vector<std::string>& vars)
{
    FrameDerivative dx(cand.X, vars);
    LinearOperator star = adjoint(cand.ltilde);
    std::vector<Expr> out(static_cast<std::size_t>(star.rows), Expr(0));
    for (const auto& [key, b] : star.coeffs) {
        auto [mu, alpha, k] = key;
        std::vector<int> orders(cand.frame.size(), 0);
        for (std::size_t i = 0; i < cand.frame.size(); ++i) orders[i] = order_in(k, cand.frame[i]);
        auto& row = out[static_cast<std::size_t>(mu)];
        row = row + frame_to_x(b, cand.frame, cand.X) * dx.d(W[static_cast<std::size_t>(alpha)], orders);
    }
    for (auto& e : out) e = canonicalize(e);
    return out;
}

void normalize_w(LinearizationCandidate& cand)
{
    cand.W_normalized.clear();
    cand.w_scale.clear();
    for (const auto& w : cand.W) {
        Poly p = finalize(to_poly(w));
        Rational s = p.empty() ? Rational(1) : Rational(1) / Rational(p.rbegin()->second.get_num());
        cand.w_scale.push_back(s);
        cand.W_normalized.push_back(canonicalize(Expr(s) * w));
    }
}

void augmented_identity(LinearizationCandidate& cand, const PdeSystem& sys)
{
    const auto& vars = sys.decls.independents;
    const std::size_t mw = static_cast<std::size_t>(cand.ltilde.rows);
    auto rhs = rhs_rows(cand, sys);

    std::vector<Expr> basis_vars = sys.decls.independent_symbols();
    for (std::size_t a = 0; a < sys.decls.dependents.size(); ++a) basis_vars.push_back(sys.decls.dependent(static_cast<int>(a)));
    if (cand.contact)
        for (std::size_t a = 0; a < sys.decls.dependents.size(); ++a)
            for (const auto& v : vars) basis_vars.push_back(sys.decls.dependent(static_cast<int>(a), {{v, 1}}));
    std::vector<Expr> kernels = {Expr(1)};
    for (const auto& row : cand.QJ)
        for (const auto& q : row)
            for (const auto& [m, c] : finalize(to_poly(q)))
                for (const auto& f : m)
                    if (f.exp < 0 || f.kernel.kind() == Kind::Exp || f.kernel.kind() == Kind::SymPow) {
                        Expr k = canonicalize(Expr::pow(f.kernel, f.exp));
                        if (std::find(kernels.begin(), kernels.end(), k) == kernels.end()) kernels.push_back(k);
                    }

    for (int degree = 0; degree <= 2; ++degree) {
        std::vector<Expr> monos;
        monomials_up_to(basis_vars, 0, degree, Expr(1), monos);
        std::vector<Expr> basis;
        for (const auto& k : kernels)
            for (const auto& m : monos) {
                Expr b = canonicalize(k * m);
                if (std::find(basis.begin(), basis.end(), b) == basis.end()) basis.push_back(b);
            }
        std::vector<Expr> unknowns;
        std::vector<Expr> W(mw, Expr(0));
        for (std::size_t a = 0; a < mw; ++a)
            for (const auto& b : basis) {
                Expr c = Expr::symbol("$c" + std::to_string(unknowns.size()), SymbolKind::Parameter);
                unknowns.push_back(c);
                W[a] = W[a] + c * b;
            }
        for (auto& w : W) w = canonicalize(w);
        std::map<Expr, std::size_t, ExprLess> col;
        for (std::size_t k = 0; k < unknowns.size(); ++k) col[unknowns[k]] = k;
        auto action = adjoint_action(cand, W, vars);
        std::vector<std::vector<Rational>> rows;
        std::vector<Rational> rvec;
        for (std::size_t mu = 0; mu < action.size(); ++mu) {
            Poly num = together(finalize(to_poly(canonicalize(action[mu] - rhs[mu])))).numerator;
            auto groups = split_by(num, [&](const Expr& k) { return !col.count(k); });
            for (const auto& [mono, coef] : groups) {
                std::vector<Rational> row(unknowns.size(), 0);
                Rational constant = 0;
                bool linear = true;
                for (const auto& [m, q] : coef) {
                    if (m.empty()) {
                        constant += q;
                    } else if (m.size() == 1 && m[0].exp == 1 && col.count(m[0].kernel)) {
                        row[col[m[0].kernel]] += q;
                    } else {
                        linear = false;
                    }
                }
                if (!linear) throw ExtractionFailure("undetermined-coefficient system is not linear");
                rows.push_back(std::move(row));
                rvec.push_back(-constant);
            }
        }
        auto sol = solve_linear(rows, rvec, unknowns.size());
        if (!sol) continue;
        std::vector<std::pair<Expr, Expr>> fix;
        for (std::size_t k = 0; k < unknowns.size(); ++k) fix.emplace_back(unknowns[k], Expr((*sol)[k]));
        for (auto& w : W) w = substitute(w, fix);
        auto check = adjoint_action(cand, W, vars);
        bool ok = true;
        for (std::size_t mu = 0; mu < check.size(); ++mu) ok = ok && canonicalize(check[mu] - rhs[mu]).is_zero();
        if (!ok) continue;
        cand.W = W;
        break;
    }
    if (cand.W.empty()) throw ExtractionFailure("no W of degree <= 2 in x, U (times the kernels of Q J) solves Q G = L~* W");

    normalize_w(cand);

    // Fluxes: W.(L~V) - V.(L~*W) = Div_X Psi in the frame, pulled back with the adjugate.
    FrameDerivative dx(cand.X, vars);
    std::vector<Expr> wf, vf;
    for (std::size_t a = 0; a < mw; ++a) wf.push_back(Expr::func(w_func(a), frame_symbols(cand.frame)));
    for (int l = 0; l < cand.ltilde.cols; ++l)
        vf.push_back(Expr::func(v_func(static_cast<std::size_t>(l)), frame_symbols(cand.frame)));
    auto psi = bilinear_identity(cand.ltilde, wf, vf);
    for (auto& p : psi) p = realize(p, cand, dx, cand.W);
    Matrix adjA = adjugate(cand.A);
    cand.fluxes.clear();
    for (std::size_t j = 0; j < vars.size(); ++j) {
        Expr g;
        for (std::size_t i = 0; i < psi.size(); ++i) g = g - adjA[j][i] * psi[i];
        cand.fluxes.push_back(canonicalize(g));
    }
}

Expr augmented_residual(const LinearizationCandidate& cand, const PdeSystem& sys)
{
    const auto& vars = sys.decls.independents;
    std::vector<Expr> vf, vx;
    for (int l = 0; l < cand.ltilde.cols; ++l) {
        vf.push_back(Expr::func(v_func(static_cast<std::size_t>(l)), frame_symbols(cand.frame)));
        vx.push_back(Expr::func(v_func(static_cast<std::size_t>(l)), cand.X));
    }
    auto lv = apply_operator(cand.ltilde, vf);
    Expr r;
    for (std::size_t nu = 0; nu < sys.size(); ++nu)
        for (std::size_t l = 0; l < vx.size(); ++l) r = r + vx[l] * cand.QJ[nu][l] * sys.equations[nu];
    for (std::size_t a = 0; a < cand.W.size(); ++a) r = r - cand.W[a] * frame_to_x(lv[a], cand.frame, cand.X) * cand.J;
    for (std::size_t j = 0; j < vars.size(); ++j) r = r - total_derivative(cand.fluxes[j], vars[j]);
    return canonicalize(r);
}

std::vector<Expr> euler_extraction_residuals(const LinearizationCandidate& cand, const PdeSystem& sys)
{
    Declarations fd;
    fd.independents = cand.frame;
    std::vector<std::string> vnames;
    for (int l = 0; l < cand.ltilde.cols; ++l) vnames.push_back("$V" + std::to_string(l + 1));
    fd.dependents = vnames;
    auto lv = cand.ltilde.equations(vnames);
    Expr s;
    for (std::size_t a = 0; a < lv.size(); ++a) s = s + Expr::func(w_func(a), frame_symbols(cand.frame)) * lv[a];
    FrameDerivative dx(cand.X, sys.decls.independents);
    auto rhs = rhs_rows(cand, sys);
    std::vector<Expr> out;
    for (std::size_t mu = 0; mu < vnames.size(); ++mu) {
        Expr e = realize(euler_operator(s, static_cast<int>(mu)), cand, dx, cand.W);
        out.push_back(canonicalize(rhs[mu] - e));
    }
    return out;
}

std::vector<std::string> target_variables(std::size_t n)
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back("z" + std::to_string(i + 1));
    return out;
}

std::vector<std::string> target_dependents(std::size_t m)
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i < m; ++i) out.push_back("w" + std::to_string(i + 1));
    return out;
}

Transformation build_mapping(const LinearizationCandidate& cand, const PdeSystem& sys)
{
    if (cand.W_normalized.empty()) throw std::logic_error("W has not been extracted");
    if (cand.J.is_zero()) throw SingularJacobian("det(D X / D x) vanishes");
    if (determinant(cand.Q).is_zero()) throw Rejection("det Q vanishes identically");
    Transformation tr;
    tr.source = sys.decls;
    tr.target_vars = target_variables(cand.X.size());
    tr.target_deps = target_dependents(cand.W_normalized.size());
    tr.phi = cand.X;
    tr.psi = cand.W_normalized;
    bool contact = cand.contact;
    for (const auto& w : tr.psi) contact = contact || has_derivative_jets(w);
    if (contact) {
        if (sys.decls.dependents.size() != 1 || tr.psi.size() != 1)
            throw Rejection("contact linearization needs a scalar equation");
        tr.kind = TransformKind::Contact;
        Matrix at(cand.X.size(), std::vector<Expr>(cand.X.size()));
        for (std::size_t i = 0; i < cand.X.size(); ++i)
            for (std::size_t j = 0; j < cand.X.size(); ++j) at[j][i] = cand.A[i][j];
        std::vector<Expr> b;
        for (const auto& v : sys.decls.independents) b.push_back(total_derivative(tr.psi[0], v));
        tr.rho = cramer(at, b);
    } else if (tr.psi.size() != sys.decls.dependents.size()) {
        throw Rejection("target has " + std::to_string(tr.psi.size()) + " dependents, the system has " +
                        std::to_string(sys.decls.dependents.size()));
    }
    return tr;
}

PdeSystem target_system(const LinearizationCandidate& cand, const PdeSystem& sys)
{
    auto zs = target_variables(cand.frame.size());
    auto ws = target_dependents(static_cast<std::size_t>(cand.ltilde.rows));
    std::vector<Expr> zsym;
    for (const auto& z : zs) zsym.push_back(Expr::symbol(z));
    LinearOperator star = adjoint(cand.ltilde);
    LinearOperator renamed;
    renamed.variables = zs;
    renamed.rows = star.rows;
    renamed.cols = star.cols;
    for (const auto& [key, b] : star.coeffs) {
        auto [mu, alpha, k] = key;
        MultiIndex mi;
        for (const auto& [v, ord] : k) {
            auto it = std::find(cand.frame.begin(), cand.frame.end(), v);
            mi = raised(std::move(mi), zs[static_cast<std::size_t>(it - cand.frame.begin())], ord);
        }
        Rational s = cand.w_scale.empty() ? Rational(1) : cand.w_scale[static_cast<std::size_t>(alpha)];
        renamed.add(mu, alpha, mi, frame_to_x(b, cand.frame, zsym) / Expr(s));
    }
    PdeSystem out;
    out.decls.independents = zs;
    out.decls.dependents = ws;
    out.decls.parameters = sys.decls.parameters;
    out.equations = renamed.equations(ws);
    return out;
}

LinearizationReport verify_linearization(const PdeSystem& sys, const LinearizationCandidate& cand)
{
    LinearizationReport rep;
    auto rhs = rhs_rows(cand, sys);
    auto action = adjoint_action(cand, cand.W, sys.decls.independents);
    for (std::size_t mu = 0; mu < rhs.size(); ++mu) {
        Expr r = canonicalize(rhs[mu] - action[mu]);
        rep.identity_residuals.push_back(r);
        rep.ok = rep.ok && r.is_zero();
    }
    try {
        Transformation tr = build_mapping(cand, sys);
        auto out = apply_transformation(sys, tr);
        auto eq = equivalent_systems(out.system, target_system(cand, sys));
        rep.mapping_checked = true;
        rep.mapping_ok = eq.equivalent;
        rep.mapping_method = eq.method;
        rep.ok = rep.ok && eq.equivalent;
    } catch (const InverseUnavailable& e) {
        rep.note = std::string("mapping cross-check skipped: ") + e.what();
    }
    return rep;
}

} // namespace conslin
