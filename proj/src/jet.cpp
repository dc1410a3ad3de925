#include "conslin/jet.hpp"

#include <algorithm>

namespace conslin {

namespace {

KernelDerivative total_rule(const std::string& var)
{
    return [var](const Expr& k) -> std::optional<Poly> {
        if (k.kind() == Kind::Symbol) return k.name() == var ? poly_const(1) : Poly{};
        if (k.kind() == Kind::Jet) return poly_kernel(Expr::jet(k.name(), k.dep_index(), raised(k.multi_index(), var)));
        return std::nullopt;
    };
}

KernelDerivative partial_rule(const Expr& atom)
{
    return [atom](const Expr& k) -> std::optional<Poly> {
        if (k == atom) return poly_const(1);
        if (k.kind() == Kind::Symbol || k.kind() == Kind::Jet) return Poly{};
        return std::nullopt;
    };
}

// Ranking used for automatic leading-jet choice: true when a outranks b.
bool outranks(const Expr& a, const Expr& b, const std::vector<std::string>& independents)
{
    int oa = total_order(a.multi_index()), ob = total_order(b.multi_index());
    if (oa != ob) return oa > ob;
    for (const auto& v : independents) {
        int ka = order_in(a.multi_index(), v), kb = order_in(b.multi_index(), v);
        if (ka != kb) return ka > kb;
    }
    return a.dep_index() < b.dep_index();
}

std::vector<LeadingRule> choose_all(const std::vector<Expr>& equations,
                                    const std::vector<std::optional<LeadingRule>>& overrides,
                                    const std::vector<std::string>& independents)
{
    std::vector<LeadingRule> out;
    std::vector<Expr> taken;
    for (std::size_t i = 0; i < equations.size(); ++i) {
        if (i < overrides.size() && overrides[i]) {
            out.push_back(*overrides[i]);
            taken.push_back(overrides[i]->jet);
        }
    }
    for (std::size_t i = 0; i < equations.size(); ++i) {
        if (i < overrides.size() && overrides[i]) continue;
        auto r = choose_leading(equations[i], independents, taken);
        if (!r) throw NotSolvable("equation " + std::to_string(i + 1) + " (" + to_string(equations[i]) +
                                  ") is not affine in any admissible leading jet");
        taken.push_back(r->jet);
        out.push_back(*r);
    }
    return out;
}

void enumerate_indices(const std::vector<std::string>& vars, std::size_t pos, int left, MultiIndex cur,
                       std::vector<MultiIndex>& out)
{
    if (pos == vars.size()) {
        out.push_back(cur);
        return;
    }
    for (int k = 0; k <= left; ++k) {
        MultiIndex next = k ? raised(cur, vars[pos], k) : cur;
        enumerate_indices(vars, pos + 1, left - k, next, out);
    }
}

} // namespace

Poly total_derivative(const Poly& p, const std::string& var) { return differentiate(p, total_rule(var)); }

Expr total_derivative(const Expr& e, const std::string& var) { return differentiate(e, total_rule(var)); }

Expr total_derivative(const Expr& e, const MultiIndex& mi)
{
    Poly p = finalize(to_poly(e));
    for (const auto& [v, k] : mi)
        for (int i = 0; i < k; ++i) p = total_derivative(p, v);
    return from_poly(p);
}

Expr partial(const Expr& e, const Expr& atom) { return differentiate(e, partial_rule(atom)); }

Expr euler_operator(const Expr& e, int sigma)
{
    Expr ce = canonicalize(e);
    Poly p = finalize(to_poly(ce));
    Poly sum;
    for (const auto& j : jets_of(ce)) {
        if (j.dep_index() != sigma) continue;
        Poly d = differentiate(p, partial_rule(j));
        for (const auto& [v, k] : j.multi_index())
            for (int i = 0; i < k; ++i) d = total_derivative(d, v);
        if (total_order(j.multi_index()) % 2) d = poly_scale(std::move(d), -1);
        sum = poly_add(std::move(sum), d);
    }
    return from_poly(finalize(sum));
}

LeadingRule solve_for(const Expr& equation, const Expr& jet)
{
    Expr coef = partial(equation, jet);
    if (coef.is_zero() || contains_atom(coef, jet))
        throw NotSolvable("equation is not affine in " + to_string(jet));
    Expr rest = substitute(equation, {{jet, Expr(0)}});
    if (contains_atom(rest, jet)) throw NotSolvable("equation is not affine in " + to_string(jet));
    return {jet, canonicalize(-rest / coef)};
}

std::optional<LeadingRule> choose_leading(const Expr& equation, const std::vector<std::string>& independents,
                                          const std::vector<Expr>& taken)
{
    auto jets = jets_of(equation);
    std::sort(jets.begin(), jets.end(),
              [&](const Expr& a, const Expr& b) { return outranks(a, b, independents); });
    for (const auto& j : jets) {
        if (std::find(taken.begin(), taken.end(), j) != taken.end()) continue;
        try {
            return solve_for(equation, j);
        } catch (const NotSolvable&) {
        }
    }
    return std::nullopt;
}

Reducer::Reducer(std::vector<LeadingRule> rules) : rules_(std::move(rules)) {}

std::optional<Expr> Reducer::rhs_for(const Expr& jet)
{
    auto it = memo_.find(jet);
    if (it != memo_.end()) return it->second;
    const LeadingRule* rule = nullptr;
    for (const auto& r : rules_)
        if (r.jet.name() == jet.name() && r.jet.dep_index() == jet.dep_index() &&
            index_divides(r.jet.multi_index(), jet.multi_index())) {
            rule = &r;
            break;
        }
    if (!rule) {
        memo_.emplace(jet, std::nullopt);
        return std::nullopt;
    }
    if (!active_.insert(jet).second) throw CyclicRules("leading rules are cyclic at " + to_string(jet));
    Expr value;
    if (rule->jet == jet) {
        value = reduce(rule->rhs);
    } else {
        MultiIndex extra = index_difference(jet.multi_index(), rule->jet.multi_index());
        const std::string& var = extra.front().first;
        Expr parent = Expr::jet(jet.name(), jet.dep_index(), raised(jet.multi_index(), var, -1));
        Expr base = *rhs_for(parent);
        value = reduce(total_derivative(base, var));
    }
    active_.erase(jet);
    memo_.emplace(jet, value);
    return value;
}

Expr Reducer::reduce(const Expr& e)
{
    if (rules_.empty()) return canonicalize(e);
    return map_atoms(e, [this](const Expr& a) -> std::optional<Expr> {
        if (a.kind() != Kind::Jet) return std::nullopt;
        return rhs_for(a);
    });
}

std::vector<LeadingRule> prolong_rules(const std::vector<LeadingRule>& rules,
                                       const std::vector<std::string>& independents,
                                       const std::vector<std::string>& dependents, int order)
{
    Reducer r(rules);
    std::vector<MultiIndex> indices;
    enumerate_indices(independents, 0, order, {}, indices);
    std::sort(indices.begin(), indices.end(), [](const MultiIndex& a, const MultiIndex& b) {
        int oa = total_order(a), ob = total_order(b);
        return oa != ob ? oa < ob : a < b;
    });
    std::vector<LeadingRule> out;
    for (std::size_t s = 0; s < dependents.size(); ++s)
        for (const auto& mi : indices) {
            Expr j = Expr::jet(dependents[s], static_cast<int>(s), mi);
            if (auto v = r.rhs_for(j)) out.push_back({j, *v});
        }
    return out;
}

int PdeSystem::order() const
{
    int k = 0;
    for (const auto& e : equations)
        for (const auto& j : jets_of(e)) k = std::max(k, total_order(j.multi_index()));
    return k;
}

std::vector<LeadingRule> PdeSystem::leading_rules() const
{
    return choose_all(equations, overrides, decls.independents);
}

Declarations FunctionConstraint::frame_decls(const Declarations& base) const
{
    Declarations d;
    d.independents = frame;
    d.dependents = functions;
    d.parameters = base.parameters;
    return d;
}

std::vector<LeadingRule> FunctionConstraint::leading_rules() const
{
    return choose_all(equations, overrides, frame);
}

int FunctionConstraint::index_of(const std::string& function) const
{
    auto it = std::find(functions.begin(), functions.end(), function);
    return it == functions.end() ? -1 : static_cast<int>(it - functions.begin());
}

Expr frame_jet(const std::string& function, int index, const std::vector<std::string>& frame,
               const std::vector<int>& orders)
{
    MultiIndex mi;
    for (std::size_t i = 0; i < frame.size() && i < orders.size(); ++i)
        if (orders[i]) mi = raised(std::move(mi), frame[i], orders[i]);
    return Expr::jet(function, index, std::move(mi));
}

Expr from_frame(const Expr& e, const std::vector<std::string>& functions, const std::vector<std::string>& frame,
                const std::vector<Expr>& args)
{
    return map_atoms(e, [&](const Expr& a) -> std::optional<Expr> {
        if (a.kind() == Kind::Jet && std::find(functions.begin(), functions.end(), a.name()) != functions.end()) {
            std::vector<int> orders(frame.size(), 0);
            for (std::size_t i = 0; i < frame.size(); ++i) orders[i] = order_in(a.multi_index(), frame[i]);
            return Expr::func(a.name(), args, std::move(orders));
        }
        if (a.kind() == Kind::Symbol) {
            auto it = std::find(frame.begin(), frame.end(), a.name());
            if (it != frame.end()) return args[static_cast<std::size_t>(it - frame.begin())];
        }
        return std::nullopt;
    });
}

ConstraintReducer::ConstraintReducer(const std::vector<FunctionConstraint>& constraints)
{
    for (const auto& c : constraints) entries_.push_back({c, Reducer(c.leading_rules())});
}

Expr ConstraintReducer::reduce(const Expr& e)
{
    if (entries_.empty()) return canonicalize(e);
    return map_atoms(e, [this](const Expr& a) -> std::optional<Expr> {
        if (a.kind() != Kind::Func) return std::nullopt;
        for (auto& entry : entries_) {
            const auto& c = entry.constraint;
            int k = c.index_of(a.name());
            if (k < 0 || a.children().size() != c.frame.size()) continue;
            auto r = entry.reducer.rhs_for(frame_jet(a.name(), k, c.frame, a.orders()));
            if (!r) return std::nullopt;
            return from_frame(*r, c.functions, c.frame, a.children());
        }
        return std::nullopt;
    });
}

SymmetryReport verify_point_symmetry(const PdeSystem& sys, const SymmetryGenerator& gen)
{
    const auto& vars = sys.decls.independents;
    const std::size_t m = sys.decls.dependents.size();
    if (gen.xi.size() != vars.size() || gen.eta.size() != m)
        throw std::invalid_argument("generator component counts do not match the system");
    std::vector<Expr> q;
    for (std::size_t t = 0; t < m; ++t) {
        Expr c = gen.eta[t];
        for (std::size_t i = 0; i < vars.size(); ++i)
            c = c - gen.xi[i] * sys.decls.dependent(static_cast<int>(t), {{vars[i], 1}});
        q.push_back(canonicalize(c));
    }
    Reducer red = sys.reducer();
    ConstraintReducer cred(gen.constraints);
    SymmetryReport rep;
    for (const auto& g : sys.equations) {
        Expr sum;
        for (const auto& j : jets_of(g))
            sum = sum + total_derivative(q[static_cast<std::size_t>(j.dep_index())], j.multi_index()) * partial(g, j);
        Expr r = cred.reduce(red.reduce(sum));
        r = red.reduce(r);
        rep.ok = rep.ok && r.is_zero();
        rep.residuals.push_back(r);
    }
    return rep;
}

} // namespace conslin
