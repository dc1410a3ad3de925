#include "conslin/mapping.hpp"

#include "conslin/matrix.hpp"

#include <algorithm>

namespace conslin {

namespace {

bool has_derivative_jets(const Expr& e)
{
    for (const auto& j : jets_of(e))
        if (!j.multi_index().empty()) return true;
    return false;
}

// Solves e = 0 for the atom y by peeling affine, exp and log layers.
std::optional<Expr> isolate(const Expr& e, const Expr& y, int depth = 0)
{
    if (depth > 8) return std::nullopt;
    Expr c = partial(e, y);
    if (!c.is_zero() && !contains_atom(c, y)) {
        Expr rest = canonicalize(e - c * y);
        if (!contains_atom(rest, y)) return canonicalize(-rest / c);
    }
    Poly p = finalize(to_poly(canonicalize(e)));
    Poly with, without;
    for (const auto& [m, q] : p) {
        bool has = false;
        for (const auto& f : m) has = has || contains_atom(f.kernel, y);
        (has ? with : without)[m] = q;
    }
    if (with.size() != 1) return std::nullopt;
    const auto& [mono, q] = *with.begin();
    std::optional<Factor> k;
    Expr a(q);
    for (const auto& f : mono) {
        if (contains_atom(f.kernel, y)) {
            if (k) return std::nullopt;
            k = f;
        } else {
            a = a * Expr::pow(f.kernel, f.exp);
        }
    }
    Expr b = from_poly(without);
    Expr r;
    if (k->exp == 1) {
        r = canonicalize(-b / a);
    } else if (k->exp == -1 && !b.is_zero()) {
        r = canonicalize(-a / b);
    } else {
        return std::nullopt;
    }
    const Expr& kernel = k->kernel;
    if (kernel == y) return r;
    switch (kernel.kind()) {
    case Kind::Exp: return isolate(kernel.children()[0] - Expr::log(r), y, depth + 1);
    case Kind::Log: return isolate(kernel.children()[0] - Expr::exp(r), y, depth + 1);
    case Kind::Add: return isolate(kernel - r, y, depth + 1);
    default: return std::nullopt;
    }
}

std::size_t position(const std::vector<std::string>& v, const std::string& s)
{
    return static_cast<std::size_t>(std::find(v.begin(), v.end(), s) - v.begin());
}

} // namespace

Declarations Transformation::target_decls() const
{
    Declarations d;
    d.independents = target_vars;
    d.dependents = target_deps;
    d.parameters = source.parameters;
    d.functions = source.functions;
    return d;
}

Expr transformation_jacobian(const Transformation& tr)
{
    const auto& vars = tr.source.independents;
    Matrix a;
    for (const auto& phi : tr.phi) {
        std::vector<Expr> row;
        for (const auto& v : vars) row.push_back(total_derivative(phi, v));
        a.push_back(std::move(row));
    }
    return determinant(a);
}

bool check_contact_condition(const Transformation& tr)
{
    if (tr.kind != TransformKind::Contact || tr.psi.size() != 1 || tr.rho.size() != tr.phi.size()) return false;
    for (const auto& v : tr.source.independents) {
        Expr c = total_derivative(tr.psi[0], v);
        for (std::size_t i = 0; i < tr.phi.size(); ++i) c = c - tr.rho[i] * total_derivative(tr.phi[i], v);
        if (!canonicalize(c).is_zero()) return false;
    }
    return true;
}

InverseMap invert(const Transformation& tr)
{
    const auto& src = tr.source;
    const std::size_t n = src.independents.size(), m = src.dependents.size();
    const bool contact = tr.kind == TransformKind::Contact;
    if (tr.phi.size() != n || tr.psi.size() != tr.target_deps.size() || tr.target_vars.size() != n)
        throw std::invalid_argument("transformation component counts do not match");
    if (tr.target_deps.size() != m) throw InverseUnavailable("source and target dependent counts differ");
    if (contact && (m != 1 || tr.rho.size() != n)) throw std::invalid_argument("contact map needs m = 1 and n rho");

    std::vector<Expr> fx, fu;
    std::vector<std::vector<Expr>> fux(m);
    for (const auto& x : src.independents) fx.push_back(Expr::symbol("$" + x));
    for (std::size_t a = 0; a < m; ++a) {
        fu.push_back(Expr::symbol("$" + src.dependents[a]));
        if (contact)
            for (const auto& x : src.independents) fux[a].push_back(Expr::symbol("$" + src.dependents[a] + "_" + x));
    }
    auto freshen = [&](const Expr& e) {
        return map_atoms(e, [&](const Expr& atom) -> std::optional<Expr> {
            if (atom.kind() == Kind::Symbol && atom.symbol_kind() == SymbolKind::Independent) {
                std::size_t j = position(src.independents, atom.name());
                if (j < n) return fx[j];
            }
            if (atom.kind() == Kind::Jet) {
                std::size_t a = position(src.dependents, atom.name());
                if (a >= m) return std::nullopt;
                const auto& mi = atom.multi_index();
                if (mi.empty()) return fu[a];
                if (contact && total_order(mi) == 1) return fux[a][position(src.independents, mi.front().first)];
                throw InverseUnavailable("map depends on jets of order " + std::to_string(total_order(mi)));
            }
            return std::nullopt;
        });
    };
    Declarations tgt = tr.target_decls();
    std::vector<Expr> pending;
    for (std::size_t i = 0; i < n; ++i) pending.push_back(canonicalize(tgt.independent(tr.target_vars[i]) - freshen(tr.phi[i])));
    for (std::size_t s = 0; s < m; ++s) pending.push_back(canonicalize(tgt.dependent(static_cast<int>(s)) - freshen(tr.psi[s])));
    if (contact)
        for (std::size_t i = 0; i < n; ++i)
            pending.push_back(canonicalize(tgt.dependent(0, {{tr.target_vars[i], 1}}) - freshen(tr.rho[i])));

    std::vector<Expr> unknowns = fx;
    unknowns.insert(unknowns.end(), fu.begin(), fu.end());
    for (const auto& r : fux) unknowns.insert(unknowns.end(), r.begin(), r.end());
    std::vector<std::pair<Expr, Expr>> solved;
    for (bool progress = true; progress && !pending.empty();) {
        progress = false;
        for (std::size_t k = 0; k < pending.size(); ++k) {
            Expr e = substitute(pending[k], solved);
            std::vector<Expr> present;
            for (const auto& u : unknowns)
                if (contains_atom(e, u)) present.push_back(u);
            if (present.empty()) {
                if (!e.is_zero()) throw InverseUnavailable("inconsistent transformation equations");
                pending.erase(pending.begin() + static_cast<long>(k));
                progress = true;
                break;
            }
            if (present.size() != 1) continue;
            auto r = isolate(e, present[0]);
            if (!r) continue;
            for (auto& [u, v] : solved) v = substitute(v, {{present[0], *r}});
            solved.emplace_back(present[0], *r);
            pending.erase(pending.begin() + static_cast<long>(k));
            progress = true;
            break;
        }
    }
    if (solved.size() != unknowns.size()) throw InverseUnavailable("no closed-form inverse found");
    auto value = [&](const Expr& u) {
        for (const auto& [k, v] : solved)
            if (k == u) return v;
        throw InverseUnavailable("unsolved unknown");
    };
    InverseMap inv;
    for (const auto& x : fx) inv.x.push_back(value(x));
    for (const auto& u : fu) inv.u.push_back(value(u));
    for (const auto& r : fux) {
        std::vector<Expr> row;
        for (const auto& u : r) row.push_back(value(u));
        inv.u_first.push_back(std::move(row));
    }
    return inv;
}

Transformation inverse_transformation(const Transformation& tr)
{
    if (tr.kind != TransformKind::Point) throw InverseUnavailable("inverse transformation of a contact map");
    InverseMap inv = invert(tr);
    Transformation out;
    out.kind = TransformKind::Point;
    out.source = tr.target_decls();
    out.target_vars = tr.source.independents;
    out.target_deps = tr.source.dependents;
    out.phi = inv.x;
    out.psi = inv.u;
    return out;
}

ChangeOfVariables::ChangeOfVariables(const Transformation& tr) : tr_(tr), target_(tr.target_decls()), inv_(invert(tr))
{
    const std::size_t n = tr.target_vars.size();
    Matrix mz(n, std::vector<Expr>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) mz[i][j] = total_derivative(inv_.x[j], tr.target_vars[i]);
    Expr det = determinant(mz);
    if (det.is_zero()) throw SingularJacobian("inverse map has a singular Jacobian");
    Matrix adj = adjugate(mz);
    minv_.assign(n, std::vector<Expr>(n));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) minv_[j][i] = canonicalize(adj[j][i] / det);
}

Expr ChangeOfVariables::d_source(const Expr& e, std::size_t j)
{
    Expr s;
    for (std::size_t i = 0; i < tr_.target_vars.size(); ++i)
        if (!minv_[j][i].is_zero()) s = s + minv_[j][i] * total_derivative(e, tr_.target_vars[i]);
    return canonicalize(s);
}

Expr ChangeOfVariables::source_jet(int alpha, const MultiIndex& mi)
{
    auto key = std::make_pair(alpha, mi);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const auto& vars = tr_.source.independents;
    Expr r;
    if (mi.empty()) {
        r = inv_.u[static_cast<std::size_t>(alpha)];
    } else if (tr_.kind == TransformKind::Contact && total_order(mi) == 1) {
        r = inv_.u_first[static_cast<std::size_t>(alpha)][position(vars, mi.front().first)];
    } else {
        const std::string& v = mi.front().first;
        r = d_source(source_jet(alpha, raised(mi, v, -1)), position(vars, v));
    }
    return memo_[key] = r;
}

Expr ChangeOfVariables::operator()(const Expr& e)
{
    const auto& src = tr_.source;
    return map_atoms(e, [&](const Expr& a) -> std::optional<Expr> {
        if (a.kind() == Kind::Symbol && a.symbol_kind() == SymbolKind::Independent) {
            std::size_t j = position(src.independents, a.name());
            if (j < src.independents.size()) return inv_.x[j];
        }
        if (a.kind() == Kind::Jet) {
            std::size_t k = position(src.dependents, a.name());
            if (k < src.dependents.size()) return source_jet(static_cast<int>(k), a.multi_index());
        }
        return std::nullopt;
    });
}

Expr clear_factors(const Expr& e, Expr* factor)
{
    Expr ce = canonicalize(e);
    Poly num = together(finalize(to_poly(ce))).numerator;
    if (num.empty()) {
        if (factor) *factor = Expr(1);
        return Expr(0);
    }
    // Laurent content over kernels free of derivative jets.
    std::map<Expr, long, ExprLess> low;
    bool first = true;
    for (const auto& [m, q] : num) {
        std::map<Expr, long, ExprLess> here;
        for (const auto& f : m)
            if (!has_derivative_jets(f.kernel)) here[f.kernel] = f.exp;
        if (first) {
            low = here;
            first = false;
            continue;
        }
        for (auto& [k, v] : low) {
            auto it = here.find(k);
            v = std::min(v, it == here.end() ? 0L : it->second);
        }
        for (const auto& [k, v] : here)
            if (!low.count(k)) low[k] = std::min(0L, v);
    }
    Expr content(num.rbegin()->second);
    for (const auto& [k, v] : low)
        if (v) content = content * Expr::pow(k, v);
    Expr out = canonicalize(from_poly(num) / content);
    if (factor) *factor = canonicalize(ce / out);
    return out;
}

TransformedSystem apply_transformation(const PdeSystem& sys, const Transformation& tr)
{
    if (tr.kind == TransformKind::Contact && !check_contact_condition(tr))
        throw ContactViolation("contact condition D psi = rho D phi fails");
    if (transformation_jacobian(tr).is_zero()) throw SingularJacobian("det(D phi / D x) vanishes identically");
    Transformation t = tr;
    t.source.parameters = sys.decls.parameters;
    ChangeOfVariables cv(t);
    TransformedSystem out;
    out.system.decls = t.target_decls();
    out.system.names = sys.names;
    for (const auto& g : sys.equations) {
        Expr f;
        out.system.equations.push_back(clear_factors(cv(g), &f));
        out.factors.push_back(f);
    }
    return out;
}

EquivalenceReport equivalent_systems(const PdeSystem& a, const PdeSystem& b)
{
    EquivalenceReport rep;
    if (a.size() == b.size()) {
        std::vector<bool> used(b.size(), false);
        bool all = true;
        for (const auto& ea : a.equations) {
            Expr na = clear_factors(ea);
            bool hit = false;
            for (std::size_t j = 0; j < b.size() && !hit; ++j) {
                if (used[j]) continue;
                Expr nb = clear_factors(b.equations[j]);
                if (nb.is_zero() || na.is_zero()) continue;
                auto q = poly_exact_divide(finalize(to_poly(na)), finalize(to_poly(nb)));
                if (!q || q->empty()) continue;
                Expr qe = from_poly(*q);
                if (has_derivative_jets(qe)) continue;
                used[j] = true;
                hit = true;
                Expr fa, fb;
                clear_factors(ea, &fa);
                clear_factors(b.equations[j], &fb);
                rep.factors.push_back(canonicalize(fa * qe / fb));
            }
            all = all && hit;
        }
        if (all) {
            rep.equivalent = true;
            rep.method = "factor";
            return rep;
        }
        rep.factors.clear();
    }
    try {
        Reducer ra = a.reducer(), rb = b.reducer();
        bool ok = true;
        for (const auto& e : a.equations) ok = ok && rb.reduce(e).is_zero();
        for (const auto& e : b.equations) ok = ok && ra.reduce(e).is_zero();
        rep.equivalent = ok;
        rep.method = "reduction";
    } catch (const std::exception&) {
        rep.equivalent = false;
    }
    return rep;
}

PushedSolution push_solution(const Transformation& tr, const std::vector<Expr>& target_solution)
{
    if (tr.kind != TransformKind::Point) throw InverseUnavailable("solution push-forward for contact maps");
    if (target_solution.size() != tr.target_deps.size())
        throw std::invalid_argument("solution needs one expression per target dependent");
    InverseMap inv = invert(tr);
    auto plug = [&](const Expr& e) {
        return map_atoms(e, [&](const Expr& a) -> std::optional<Expr> {
            if (a.kind() != Kind::Jet) return std::nullopt;
            std::size_t s = position(tr.target_deps, a.name());
            if (s >= tr.target_deps.size()) return std::nullopt;
            return total_derivative(target_solution[s], a.multi_index());
        });
    };
    PushedSolution out;
    for (const auto& x : inv.x) out.x.push_back(plug(x));
    for (const auto& u : inv.u) out.u.push_back(plug(u));
    out.explicit_form = true;
    for (std::size_t j = 0; j < out.x.size(); ++j)
        out.explicit_form = out.explicit_form && out.x[j] == Expr::symbol(tr.target_vars[j]);
    if (out.explicit_form) {
        std::vector<std::pair<Expr, Expr>> rename;
        for (std::size_t j = 0; j < out.x.size(); ++j)
            rename.emplace_back(Expr::symbol(tr.target_vars[j]), Expr::symbol(tr.source.independents[j]));
        for (auto& u : out.u) u = substitute(u, rename);
    }
    return out;
}

} // namespace conslin
