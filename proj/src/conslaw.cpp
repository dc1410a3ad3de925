#include "conslin/conslaw.hpp"

#include <algorithm>
#include <set>

namespace conslin {

namespace {

void indices_up_to(const std::vector<std::string>& vars, std::size_t pos, int left, MultiIndex cur,
                   std::vector<MultiIndex>& out)
{
    if (pos == vars.size()) {
        out.push_back(cur);
        return;
    }
    for (int k = 0; k <= left; ++k)
        indices_up_to(vars, pos + 1, left - k, k ? raised(cur, vars[pos], k) : cur, out);
}

bool outranks(const Expr& a, const Expr& b, const std::vector<std::string>& vars)
{
    int oa = total_order(a.multi_index()), ob = total_order(b.multi_index());
    if (oa != ob) return oa > ob;
    for (const auto& v : vars) {
        int ka = order_in(a.multi_index(), v), kb = order_in(b.multi_index(), v);
        if (ka != kb) return ka > kb;
    }
    return a.dep_index() < b.dep_index();
}

std::string unknown_name(std::size_t nu) { return "L" + std::to_string(nu + 1); }

Expr monic(const Expr& e)
{
    Poly p = finalize(to_poly(canonicalize(e)));
    if (p.empty()) return Expr(0);
    Rational lead = p.rbegin()->second;
    return from_poly(poly_scale(std::move(p), 1 / lead));
}

std::string monomial_str(const Monomial& m)
{
    Poly p;
    p[m] = 1;
    return to_string(from_poly(p));
}

Expr dependents_sum(const PdeSystem& sys, const std::vector<Expr>& lambda)
{
    Expr s;
    for (std::size_t nu = 0; nu < sys.size(); ++nu) s = s + lambda[nu] * sys.equations[nu];
    return canonicalize(s);
}

std::vector<DeterminingEquation> split_sigma(const Expr& euler, int sigma, const std::vector<Expr>& args)
{
    std::set<Expr, ExprLess> keep(args.begin(), args.end());
    auto parametric = [&](const Expr& k) {
        if (k.kind() == Kind::Func) return false;
        if (k.kind() == Kind::Jet) return !keep.count(k);
        for (const auto& j : jets_of(k))
            if (!keep.count(j)) return true;
        return false;
    };
    std::vector<DeterminingEquation> out;
    for (auto& [mono, coef] : split_by(finalize(to_poly(euler)), parametric)) {
        Expr eq = monic(from_poly(finalize(coef)));
        if (eq.is_zero()) continue;
        out.push_back({sigma, monomial_str(mono), eq});
    }
    return out;
}

DeterminingSystem determining_impl(const PdeSystem& sys, const MultiplierAnsatz& a, bool parallel)
{
    DeterminingSystem ds;
    ds.args = ansatz_arguments(sys, a);
    for (std::size_t nu = 0; nu < sys.size(); ++nu) ds.unknowns.push_back(Expr::func(unknown_name(nu), ds.args));
    Expr s = dependents_sum(sys, ds.unknowns);
    const int m = static_cast<int>(sys.decls.dependents.size());
    std::vector<std::vector<DeterminingEquation>> parts(static_cast<std::size_t>(m));
    std::size_t limit = max_terms();
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int sigma = 0; sigma < m; ++sigma) {
            set_max_terms(limit);
            parts[static_cast<std::size_t>(sigma)] = split_sigma(euler_operator(s, sigma), sigma, ds.args);
        }
    } else {
        for (int sigma = 0; sigma < m; ++sigma)
            parts[static_cast<std::size_t>(sigma)] = split_sigma(euler_operator(s, sigma), sigma, ds.args);
    }
    for (auto& p : parts)
        for (auto& e : p) {
            bool dup = false;
            for (const auto& q : ds.equations) dup = dup || q.equation == e.equation;
            if (!dup) ds.equations.push_back(std::move(e));
        }
    return ds;
}

// Antiderivative of a single monomial term in `atom`; nullopt if unsupported.
std::optional<Expr> integrate_term(const Monomial& mono, const Rational& c, const Expr& atom)
{
    long k = 0;
    std::optional<Expr> sym;     // symbolic extra exponent on atom
    std::optional<Expr> exp_arg; // combined exponential argument
    Expr rest(c);
    for (const auto& f : mono) {
        if (f.kernel == atom) {
            k += f.exp;
            continue;
        }
        if (!contains_atom(f.kernel, atom)) {
            rest = rest * Expr::pow(f.kernel, f.exp);
            continue;
        }
        if (f.kernel.kind() == Kind::SymPow && f.kernel.children()[0] == atom &&
            !contains_atom(f.kernel.children()[1], atom)) {
            Expr s = f.kernel.children()[1] * Expr(f.exp);
            sym = sym ? *sym + s : s;
            continue;
        }
        if (f.kernel.kind() == Kind::Exp && !exp_arg) {
            exp_arg = f.kernel.children()[0] * Expr(f.exp);
            continue;
        }
        return std::nullopt;
    }
    if (exp_arg) {
        if (sym || k < 0) return std::nullopt;
        Expr a = partial(*exp_arg, atom);
        if (a.is_zero() || contains_atom(a, atom)) return std::nullopt;
        if (!canonicalize(partial(a, atom)).is_zero()) return std::nullopt;
        // int u^k e^{a u} du = e^{a u} sum_j (-1)^j k!/(k-j)! u^{k-j} / a^{j+1}
        Expr sum;
        Rational fall = 1;
        for (long j = 0; j <= k; ++j) {
            if (j > 0) fall *= (k - j + 1);
            Rational coef = (j % 2 ? -1 : 1) * fall;
            sum = sum + Expr(coef) * Expr::pow(atom, k - j) * Expr::pow(a, -(j + 1));
        }
        return rest * Expr::exp(*exp_arg) * sum;
    }
    if (sym) {
        Expr e = *sym + Expr(k + 1);
        return rest * Expr::sympow(atom, e) / e;
    }
    if (k == -1) return rest * Expr::log(atom);
    return rest * Expr(Rational(1, k + 1)) * Expr::pow(atom, k + 1);
}

} // namespace

std::string shape_name(AnsatzShape s)
{
    switch (s) {
    case AnsatzShape::General: return "general";
    case AnsatzShape::FixedIndependents: return "fixed-independents";
    case AnsatzShape::IntegratingFactor: return "integrating-factor";
    }
    return "general";
}

AnsatzShape parse_shape(const std::string& s)
{
    if (s == "general") return AnsatzShape::General;
    if (s == "fixed-independents") return AnsatzShape::FixedIndependents;
    if (s == "integrating-factor") return AnsatzShape::IntegratingFactor;
    throw std::invalid_argument("unknown ansatz shape '" + s + "'");
}

std::vector<Expr> ansatz_arguments(const PdeSystem& sys, const MultiplierAnsatz& a)
{
    if (!a.args.empty()) return a.args;
    int order = a.shape == AnsatzShape::General ? a.order : 0;
    std::vector<Expr> out = sys.decls.independent_symbols();
    for (int k = 0; k <= order; ++k)
        for (std::size_t alpha = 0; alpha < sys.decls.dependents.size(); ++alpha) {
            std::vector<MultiIndex> mis;
            indices_up_to(sys.decls.independents, 0, k, {}, mis);
            std::vector<Expr> level;
            for (auto& mi : mis)
                if (total_order(mi) == k) level.push_back(sys.decls.dependent(static_cast<int>(alpha), mi));
            std::sort(level.begin(), level.end(),
                      [&](const Expr& x, const Expr& y) { return outranks(y, x, sys.decls.independents); });
            out.insert(out.end(), level.begin(), level.end());
        }
    return out;
}

DeterminingSystem determining_system(const PdeSystem& sys, const MultiplierAnsatz& a)
{
    return determining_impl(sys, a, true);
}

DeterminingSystem determining_system_serial(const PdeSystem& sys, const MultiplierAnsatz& a)
{
    return determining_impl(sys, a, false);
}

std::vector<std::string> MultiplierFamily::functions() const
{
    std::vector<std::string> out;
    for (const auto& c : constraints) out.insert(out.end(), c.functions.begin(), c.functions.end());
    return out;
}

std::vector<Expr> check_family(const DeterminingSystem& ds, const MultiplierFamily& fam)
{
    if (fam.components.size() != ds.unknowns.size())
        throw std::invalid_argument("family has " + std::to_string(fam.components.size()) + " components, system needs " +
                                    std::to_string(ds.unknowns.size()));
    std::map<std::pair<std::size_t, std::vector<int>>, Expr> cache;
    auto derivative = [&](std::size_t nu, const std::vector<int>& orders) {
        auto key = std::make_pair(nu, orders);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        Expr d = fam.components[nu];
        for (std::size_t i = 0; i < orders.size(); ++i)
            for (int r = 0; r < orders[i]; ++r) d = partial(d, ds.args[i]);
        return cache[key] = d;
    };
    ConstraintReducer cred(fam.constraints);
    std::vector<Expr> out;
    for (const auto& eq : ds.equations) {
        Expr r = map_atoms(eq.equation, [&](const Expr& a) -> std::optional<Expr> {
            if (a.kind() != Kind::Func) return std::nullopt;
            for (std::size_t nu = 0; nu < ds.unknowns.size(); ++nu)
                if (a.name() == unknown_name(nu) && a.children() == ds.args) {
                    std::vector<int> orders = a.orders();
                    orders.resize(ds.args.size(), 0);
                    return derivative(nu, orders);
                }
            return std::nullopt;
        });
        out.push_back(cred.reduce(r));
    }
    return out;
}

VerifyReport verify_multipliers(const PdeSystem& sys, const MultiplierFamily& fam)
{
    if (fam.components.size() != sys.size())
        throw std::invalid_argument("expected " + std::to_string(sys.size()) + " multiplier components, got " +
                                    std::to_string(fam.components.size()));
    VerifyReport rep;
    Expr s = dependents_sum(sys, fam.components);
    ConstraintReducer cred(fam.constraints);
    for (std::size_t sigma = 0; sigma < sys.decls.dependents.size(); ++sigma) {
        Expr r = cred.reduce(euler_operator(s, static_cast<int>(sigma)));
        rep.euler_residuals.push_back(r);
        if (r.is_zero()) continue;
        rep.ok = false;
        auto parts = split_by(finalize(to_poly(r)), [](const Expr& k) { return k.kind() == Kind::Jet; });
        for (auto& [mono, coef] : parts) rep.offending.emplace_back(monomial_str(mono), from_poly(finalize(coef)));
    }
    Reducer red = sys.reducer();
    for (const auto& l : fam.components) {
        Expr r = cred.reduce(red.reduce(l));
        rep.singular.push_back(r.is_zero());
    }
    if (rep.ok && fam.functions().empty()) {
        try {
            rep.fluxes = reconstruct_fluxes(s, sys.decls);
            rep.fluxes_found = true;
        } catch (const NotADivergence&) {
        }
    }
    return rep;
}

Expr integrate(const Expr& e, const Expr& atom)
{
    Poly p = finalize(to_poly(canonicalize(e)));
    Expr out;
    for (const auto& [mono, c] : p) {
        auto t = integrate_term(mono, c, atom);
        if (!t) throw NotADivergence("cannot integrate " + to_string(from_poly(Poly{{mono, c}})) + " in " + to_string(atom));
        out = out + *t;
    }
    return canonicalize(out);
}

namespace {

Expr top_jet(const std::vector<Expr>& jets, const std::vector<std::string>& vars)
{
    return *std::max_element(jets.begin(), jets.end(), [&](const Expr& a, const Expr& b) { return outranks(b, a, vars); });
}

// Depth-first integration by parts. Each step removes the highest-ranked jet
// by integrating its coefficient along one of the directions that lower it;
// directions are tried best-first (lowest resulting top jet, then fewest
// terms) and abandoned when the remainder cannot be finished.
class FluxSearch {
public:
    FluxSearch(const std::vector<std::string>& vars) : vars_(vars) {}

    bool run(const Expr& rest, std::vector<Expr>& flux, int depth)
    {
        if (rest.is_zero()) return true;
        if (depth > 200 || ++nodes_ > 4000) return false;
        for (const auto& f : funcs_of(rest))
            if (!jets_of(f).empty()) throw NotADivergence("function terms with jet arguments");
        auto jets = jets_of(rest);
        if (jets.empty()) {
            std::size_t slot = 0;
            for (std::size_t i = 0; i < vars_.size(); ++i)
                if (contains_atom(rest, Expr::symbol(vars_[i]))) {
                    slot = i;
                    break;
                }
            Expr f;
            try {
                f = integrate(rest, Expr::symbol(vars_[slot]));
            } catch (const NotADivergence&) {
                return false;
            }
            if (!run(canonicalize(rest - total_derivative(f, vars_[slot])), flux, depth + 1)) return false;
            flux[slot] = canonicalize(flux[slot] + f);
            return true;
        }
        Expr top = top_jet(jets, vars_);
        const MultiIndex& j = top.multi_index();
        if (j.empty()) throw NotADivergence("depends on an undifferentiated dependent at top order");
        Expr a = partial(rest, top);

        struct Step {
            std::size_t dir;
            Expr f, rest;
            std::optional<Expr> top;
            std::size_t size;
        };
        std::vector<Step> steps;
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (order_in(j, vars_[i]) == 0) continue;
            Expr lower = Expr::jet(top.name(), top.dep_index(), raised(j, vars_[i], -1));
            Expr f;
            try {
                f = integrate(a, lower);
            } catch (const NotADivergence&) {
                continue;
            }
            Expr r = canonicalize(rest - total_derivative(f, vars_[i]));
            auto rj = jets_of(r);
            steps.push_back({i, f, r, rj.empty() ? std::nullopt : std::optional<Expr>(top_jet(rj, vars_)),
                             finalize(to_poly(r)).size()});
        }
        std::stable_sort(steps.begin(), steps.end(), [&](const Step& a, const Step& b) {
            if (a.rest.is_zero() != b.rest.is_zero()) return a.rest.is_zero();
            if (a.top.has_value() != b.top.has_value()) return !a.top.has_value();
            if (a.top && *a.top != *b.top) return outranks(*b.top, *a.top, vars_);
            return a.size < b.size;
        });
        for (const auto& st : steps) {
            if (run(st.rest, flux, depth + 1)) {
                flux[st.dir] = canonicalize(flux[st.dir] + st.f);
                return true;
            }
        }
        return false;
    }

private:
    const std::vector<std::string>& vars_;
    int nodes_ = 0;
};

} // namespace

std::vector<Expr> reconstruct_fluxes(const Expr& e, const Declarations& d)
{
    const auto& vars = d.independents;
    if (vars.empty()) throw NotADivergence("no independent variables");
    std::vector<Expr> flux(vars.size(), Expr(0));
    FluxSearch search(vars);
    if (!search.run(canonicalize(e), flux, 0)) throw NotADivergence("flux reconstruction did not terminate");
    Expr check = e;
    for (std::size_t i = 0; i < vars.size(); ++i) check = check - total_derivative(flux[i], vars[i]);
    if (!canonicalize(check).is_zero()) throw NotADivergence("reconstructed fluxes do not reproduce the expression");
    return flux;
}

DivergenceResult is_divergence(const Expr& e, const Declarations& d)
{
    DivergenceResult r;
    r.divergence = true;
    for (std::size_t s = 0; s < d.dependents.size() && r.divergence; ++s)
        r.divergence = euler_operator(e, static_cast<int>(s)).is_zero();
    if (d.dependents.empty()) r.divergence = true;
    if (!r.divergence) return r;
    try {
        r.fluxes = reconstruct_fluxes(e, d);
        r.fluxes_found = true;
    } catch (const NotADivergence&) {
    }
    return r;
}

std::string TrivialReduction::describe(std::size_t nu) const
{
    std::string name = unknown_name(nu);
    if (vanishes[nu]) return name + " = 0";
    if (remaining_args[nu].empty()) return name + " constant";
    std::string s = name + " = " + name + "(";
    for (std::size_t i = 0; i < remaining_args[nu].size(); ++i)
        s += (i ? ", " : "") + to_string(remaining_args[nu][i]);
    return s + ")";
}

TrivialReduction reduce_trivial(const DeterminingSystem& ds)
{
    const std::size_t n = ds.unknowns.size();
    TrivialReduction tr;
    tr.remaining_args.assign(n, ds.args);
    tr.vanishes.assign(n, false);
    std::vector<Expr> eqs;
    for (const auto& e : ds.equations) eqs.push_back(e.equation);
    auto index_of = [&](const Expr& f) -> std::optional<std::size_t> {
        if (f.kind() != Kind::Func) return std::nullopt;
        for (std::size_t nu = 0; nu < n; ++nu)
            if (f.name() == unknown_name(nu)) return nu;
        return std::nullopt;
    };
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& e : eqs) {
            Poly p = finalize(to_poly(e));
            if (p.size() != 1) continue;
            std::optional<Expr> unknown;
            bool clean = true;
            for (const auto& f : p.begin()->first) {
                if (index_of(f.kernel)) {
                    clean = clean && !unknown && f.exp == 1;
                    unknown = f.kernel;
                } else if (f.kernel.kind() != Kind::Func) {
                    for (const auto& g : funcs_of(f.kernel)) clean = clean && !index_of(g);
                } else {
                    clean = false;
                }
            }
            if (!clean || !unknown) continue;
            std::size_t nu = *index_of(*unknown);
            const auto& ord = unknown->orders();
            int total = 0, pos = -1;
            for (std::size_t i = 0; i < ord.size(); ++i) {
                total += ord[i];
                if (ord[i]) pos = static_cast<int>(i);
            }
            if (total == 0) {
                tr.vanishes[nu] = true;
            } else if (total == 1) {
                auto& ra = tr.remaining_args[nu];
                ra.erase(ra.begin() + pos);
            } else {
                continue;
            }
            for (auto& x : eqs)
                x = map_atoms(x, [&](const Expr& a) -> std::optional<Expr> {
                    auto k = index_of(a);
                    if (!k || *k != nu) return std::nullopt;
                    if (tr.vanishes[nu]) return Expr(0);
                    std::vector<int> o = a.orders();
                    o.resize(a.children().size(), 0);
                    if (o[static_cast<std::size_t>(pos)]) return Expr(0);
                    std::vector<Expr> args = a.children();
                    args.erase(args.begin() + pos);
                    o.erase(o.begin() + pos);
                    return Expr::func(a.name(), std::move(args), std::move(o));
                });
            eqs.erase(std::remove_if(eqs.begin(), eqs.end(), [](const Expr& x) { return x.is_zero(); }), eqs.end());
            changed = true;
            break;
        }
    }
    for (auto& e : eqs) {
        Expr m = monic(e);
        if (std::find(tr.residual.begin(), tr.residual.end(), m) == tr.residual.end()) tr.residual.push_back(m);
    }
    return tr;
}

CharacteristicReduction characteristic_reduce(const std::vector<Expr>& components_in_frame,
                                              const FunctionConstraint& constraint,
                                              const std::vector<Expr>& coordinates,
                                              const std::vector<std::string>& reduced_frame)
{
    if (constraint.functions.size() != 1)
        throw NotSolvable("characteristic reduction needs a single arbitrary function");
    const std::string& fname = constraint.functions[0];
    const auto& frame = constraint.frame;
    if (coordinates.size() != frame.size()) throw std::invalid_argument("coordinate count does not match the frame");
    for (const auto& r : reduced_frame)
        if (std::find(frame.begin(), frame.end(), r) != frame.end())
            throw std::invalid_argument("reduced frame name '" + r + "' clashes with the frame");
    auto sym = [](const std::string& v) { return Expr::symbol(v); };

    struct FirstOrder {
        std::vector<Expr> coef; // per frame variable
    };
    std::vector<FirstOrder> first;
    std::vector<Expr> others;
    struct Solve {
        Expr pivot;
        Expr value; // pivot in terms of the new variable and the other symbol
    };
    std::vector<Expr> invariants;
    std::vector<std::optional<Solve>> solves;
    for (const auto& e : constraint.equations) {
        auto jets = jets_of(e);
        bool fo = !jets.empty();
        for (const auto& j : jets) fo = fo && total_order(j.multi_index()) == 1;
        if (!fo) {
            others.push_back(e);
            continue;
        }
        FirstOrder f;
        Expr rest = e;
        for (const auto& v : frame) {
            Expr j = Expr::jet(fname, 0, {{v, 1}});
            Expr c = partial(e, j);
            if (!jets_of(c).empty()) throw NotSolvable("first-order constraint is not linear");
            f.coef.push_back(c);
            rest = rest - c * j;
        }
        if (!canonicalize(rest).is_zero()) throw NotSolvable("first-order constraint is not homogeneous");
        std::vector<std::size_t> nz;
        for (std::size_t i = 0; i < frame.size(); ++i)
            if (!f.coef[i].is_zero()) nz.push_back(i);
        if (nz.size() != 2) throw NotSolvable("first-order constraint must couple exactly two variables");
        std::size_t piv = f.coef[nz[0]].is_number() ? nz[0] : nz[1];
        std::size_t oth = piv == nz[0] ? nz[1] : nz[0];
        if (!f.coef[piv].is_number()) throw NotSolvable("first-order constraint has no constant pivot coefficient");
        Expr xi = sym(frame[piv]), eta = sym(frame[oth]);
        Expr ratio = canonicalize(f.coef[oth] / f.coef[piv]);
        Poly rp = finalize(to_poly(ratio));
        if (rp.size() != 1) throw NotSolvable("coefficient is not separable");
        Expr b(rp.begin()->second), c(1);
        for (const auto& fac : rp.begin()->first) {
            bool dx = contains_atom(fac.kernel, xi), de = contains_atom(fac.kernel, eta);
            for (const auto& v : frame)
                if (v != frame[piv] && v != frame[oth] && contains_atom(fac.kernel, sym(v)))
                    throw NotSolvable("coefficient depends on a third variable");
            if (dx && de) throw NotSolvable("coefficient is not separable");
            (de ? c : b) = (de ? c : b) * Expr::pow(fac.kernel, fac.exp);
        }
        Expr ib = integrate(b, xi), ic = integrate(Expr::pow(c, -1), eta);
        invariants.push_back(canonicalize(ib - ic));
        std::size_t k = invariants.size() - 1;
        Expr bc = canonicalize(b);
        if (bc.is_number() && k < reduced_frame.size())
            solves.push_back(Solve{xi, canonicalize((sym(reduced_frame[k]) + ic) / bc)});
        else
            solves.push_back(std::nullopt);
        first.push_back(std::move(f));
    }
    if (invariants.size() != reduced_frame.size())
        throw NotSolvable("found " + std::to_string(invariants.size()) + " invariants for a reduced frame of " +
                          std::to_string(reduced_frame.size()));
    for (const auto& f : first)
        for (const auto& inv : invariants) {
            Expr s;
            for (std::size_t i = 0; i < frame.size(); ++i) s = s + f.coef[i] * partial(inv, sym(frame[i]));
            if (!canonicalize(s).is_zero()) throw NotSolvable("invariants are not common to all first-order constraints");
        }

    Expr g = Expr::func(fname, invariants);
    auto lift = [&](const Expr& e) {
        return map_atoms(e, [&](const Expr& a) -> std::optional<Expr> {
            if (a.kind() == Kind::Jet && a.name() == fname) return total_derivative(g, a.multi_index());
            return std::nullopt;
        });
    };
    auto to_reduced = [&](const Expr& e) {
        return map_atoms(e, [&](const Expr& a) -> std::optional<Expr> {
            if (a.kind() == Kind::Func && a.name() == fname && a.children() == invariants)
                return frame_jet(fname, 0, reduced_frame, a.orders());
            return std::nullopt;
        });
    };
    auto old_free = [&](const Expr& e) {
        for (const auto& v : frame)
            if (contains_atom(e, sym(v))) return false;
        return true;
    };

    FunctionConstraint reduced;
    reduced.functions = {fname};
    reduced.frame = reduced_frame;
    for (const auto& e : others) {
        Expr r = to_reduced(lift(e));
        auto lead = choose_leading(r, reduced_frame);
        if (!lead) throw NotSolvable("reduced constraint has no leading jet");
        r = canonicalize(r / partial(r, lead->jet));
        if (!old_free(r)) {
            std::vector<std::pair<Expr, Expr>> rules;
            for (const auto& s : solves)
                if (s) rules.emplace_back(s->pivot, s->value);
            r = substitute(r, rules);
        }
        if (!old_free(r)) throw NotSolvable("constraint does not reduce to the invariants");
        reduced.equations.push_back(r);
    }

    CharacteristicReduction out;
    out.invariants = invariants;
    std::vector<std::pair<Expr, Expr>> to_coords;
    for (std::size_t i = 0; i < frame.size(); ++i) to_coords.emplace_back(sym(frame[i]), coordinates[i]);
    for (const auto& c : components_in_frame) out.family.components.push_back(substitute(lift(c), to_coords));
    for (const auto& inv : invariants) out.family.coordinates.push_back(substitute(inv, to_coords));
    out.family.constraints = {reduced};
    return out;
}

} // namespace conslin
