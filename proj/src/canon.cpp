#include "conslin/poly.hpp"

#include <algorithm>
#include <unordered_map>

namespace conslin {

namespace {

int kind_rank(Kind k)
{
    switch (k) {
    case Kind::Symbol: return 0;
    case Kind::Jet: return 1;
    case Kind::Func: return 2;
    case Kind::Log: return 3;
    case Kind::Exp: return 4;
    case Kind::SymPow: return 5;
    case Kind::Add: return 6;
    default: return 7;
    }
}

bool is_special(const Expr& k) { return k.kind() == Kind::Exp || k.kind() == Kind::SymPow; }

long degree(const Monomial& m)
{
    long d = 0;
    for (const auto& f : m) d += f.exp;
    return d;
}

void check_size(const Poly& p)
{
    std::size_t cap = max_terms();
    if (cap != 0 && p.size() > cap)
        throw ExpressionTooLarge("expression exceeds " + std::to_string(cap) + " terms");
}

void add_term(Poly& p, const Monomial& m, const Rational& c)
{
    if (sgn(c) == 0) return;
    auto [it, inserted] = p.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (sgn(it->second) == 0) p.erase(it);
    }
}

// Sorted merge, exponents added, zeros dropped. Exp(a)^0 etc. simply vanish.
Monomial merge(const Monomial& a, const Monomial& b, long sign_b = 1)
{
    Monomial out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        int c;
        if (i == a.size()) c = 1;
        else if (j == b.size()) c = -1;
        else c = kernel_compare(a[i].kernel, b[j].kernel);
        if (c < 0) out.push_back(a[i++]);
        else if (c > 0) {
            out.push_back({b[j].kernel, sign_b * b[j].exp});
            ++j;
        } else {
            long e = a[i].exp + sign_b * b[j].exp;
            if (e != 0) out.push_back({a[i].kernel, e});
            ++i;
            ++j;
        }
    }
    return out;
}

bool needs_normalization(const Monomial& m)
{
    for (std::size_t i = 0; i < m.size(); ++i) {
        const Expr& k = m[i].kernel;
        if (k.kind() == Kind::Add && m[i].exp > 0) return true;
        if (k.kind() == Kind::Exp) {
            if (m[i].exp != 1) return true;
            if (i + 1 < m.size() && m[i + 1].kernel.kind() == Kind::Exp) return true;
        }
        if (k.kind() == Kind::SymPow) {
            if (m[i].exp != 1) return true;
            if (i + 1 < m.size() && m[i + 1].kernel.kind() == Kind::SymPow &&
                m[i + 1].kernel.children()[0] == k.children()[0])
                return true;
        }
    }
    return false;
}

Poly single(const Monomial& m, const Rational& c)
{
    Poly p;
    if (sgn(c) != 0) p.emplace(m, c);
    return p;
}

Poly normalize_monomial(const Monomial& m, const Rational& c)
{
    if (sgn(c) == 0) return {};
    if (!needs_normalization(m)) return single(m, c);
    Monomial plain;
    Poly exp_arg;
    std::vector<std::pair<Expr, Poly>> sympows; // base -> summed exponent
    std::vector<Factor> expand;
    for (const auto& f : m) {
        const Expr& k = f.kernel;
        if (k.kind() == Kind::Exp) {
            exp_arg = poly_add(std::move(exp_arg), poly_scale(to_poly(k.children()[0]), Rational(f.exp)));
        } else if (k.kind() == Kind::SymPow) {
            Poly s = poly_scale(to_poly(k.children()[1]), Rational(f.exp));
            const Expr& base = k.children()[0];
            auto it = std::find_if(sympows.begin(), sympows.end(), [&](const auto& p) { return p.first == base; });
            if (it == sympows.end()) sympows.emplace_back(base, std::move(s));
            else it->second = poly_add(std::move(it->second), s);
        } else if (k.kind() == Kind::Add && f.exp > 0) {
            expand.push_back(f);
        } else {
            plain.push_back(f);
        }
    }
    Poly result = single(plain, c);
    bool had_exp = std::any_of(m.begin(), m.end(), [](const Factor& f) { return f.kernel.kind() == Kind::Exp; });
    if (had_exp) result = poly_mul(result, make_exp(exp_arg));
    for (auto& [base, s] : sympows) result = poly_mul(result, make_sympow(to_poly(base), s));
    for (const auto& f : expand) result = poly_mul(result, poly_pow(to_poly(f.kernel), f.exp));
    return result;
}

Monomial negated(const Monomial& m)
{
    Monomial out = m;
    for (auto& f : out) f.exp = -f.exp;
    return out;
}

bool is_plain(const Expr& k) { return !is_special(k) && k.kind() != Kind::Add; }

// Monomial common to every term: plain kernels at their minimum exponent (absent
// counts as 0, so this may be a Laurent shift), special kernels only when they
// occur with the same exponent everywhere.
Monomial content_monomial(const Poly& p, bool include_special)
{
    if (p.empty()) return {};
    std::map<Expr, long, ExprLess> lo;
    std::map<Expr, long, ExprLess> special;
    std::map<Expr, std::size_t, ExprLess> count;
    for (const auto& [m, c] : p) {
        for (const auto& f : m) {
            ++count[f.kernel];
            if (is_plain(f.kernel)) {
                auto it = lo.find(f.kernel);
                if (it == lo.end()) lo.emplace(f.kernel, f.exp);
                else it->second = std::min(it->second, f.exp);
            } else if (include_special && is_special(f.kernel)) {
                auto it = special.find(f.kernel);
                if (it == special.end()) special.emplace(f.kernel, f.exp);
                else if (it->second != f.exp) it->second = 0;
            }
        }
    }
    Monomial out;
    for (auto& [k, e] : lo) {
        long v = count[k] == p.size() ? e : std::min(e, 0L);
        if (v != 0) out.push_back({k, v});
    }
    for (auto& [k, e] : special)
        if (e != 0 && count[k] == p.size()) out.push_back({k, e});
    std::sort(out.begin(), out.end(), [](const Factor& a, const Factor& b) { return kernel_compare(a.kernel, b.kernel) < 0; });
    return out;
}

Poly divide_by_monomial(const Poly& p, const Monomial& m)
{
    Poly out;
    for (const auto& [t, c] : p) out.emplace(merge(t, m, -1), c);
    return out;
}

Rational floor_of(const Rational& q)
{
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return Rational(f);
}

Poly int_pow(const Poly& base, long n)
{
    if (n >= 0) return poly_pow(base, n);
    return poly_pow(poly_inverse(base), -n);
}

bool is_constant(const Poly& p) { return p.empty() || (p.size() == 1 && p.begin()->first.empty()); }

Rational constant_part(const Poly& p)
{
    auto it = p.find(Monomial{});
    return it == p.end() ? Rational(0) : it->second;
}

Poly sympow_kernel(const Poly& base, const Poly& s)
{
    Node n;
    n.kind = Kind::SymPow;
    n.kids = {from_poly(finalize(base)), from_poly(finalize(s))};
    return poly_kernel(make_canonical_node(std::move(n)));
}

// base^s with s free of an integer constant part.
Poly sympow_core(const Poly& base, const Poly& s)
{
    if (base.size() == 1 && base.begin()->second == 1) {
        const Monomial& m = base.begin()->first;
        Poly result = poly_const(1);
        for (const auto& f : m) {
            const Expr& k = f.kernel;
            Poly es = poly_scale(s, Rational(f.exp));
            if (k.kind() == Kind::SymPow)
                result = poly_mul(result, make_sympow(to_poly(k.children()[0]),
                                                      poly_mul(to_poly(k.children()[1]), es)));
            else if (k.kind() == Kind::Exp)
                result = poly_mul(result, make_exp(poly_mul(to_poly(k.children()[0]), es)));
            else if (f.exp == 1 || !is_constant(es) || sgn(constant_part(es) - floor_of(constant_part(es))) != 0)
                result = poly_mul(result, f.exp == 1 ? sympow_kernel(poly_kernel(k), s)
                                                     : make_sympow(poly_kernel(k), es));
            else
                result = poly_mul(result, int_pow(poly_kernel(k), constant_part(es).get_num().get_si()));
        }
        return result;
    }
    return sympow_kernel(base, s);
}

} // namespace

int kernel_compare(const Expr& a, const Expr& b)
{
    int ra = kind_rank(a.kind()), rb = kind_rank(b.kind());
    if (ra != rb) return ra < rb ? -1 : 1;
    return compare(a, b);
}

bool MonomialLess::operator()(const Monomial& a, const Monomial& b) const
{
    long da = degree(a), db = degree(b);
    if (da != db) return da < db;
    long i = static_cast<long>(a.size()) - 1, j = static_cast<long>(b.size()) - 1;
    while (i >= 0 || j >= 0) {
        if (i < 0) return b[j].exp > 0;
        if (j < 0) return a[i].exp < 0;
        int c = kernel_compare(a[i].kernel, b[j].kernel);
        if (c == 0) {
            if (a[i].exp != b[j].exp) return a[i].exp < b[j].exp;
            --i;
            --j;
        } else if (c > 0) {
            return a[i].exp < 0;
        } else {
            return b[j].exp > 0;
        }
    }
    return false;
}

bool is_reciprocal_kernel(const Factor& f) { return f.kernel.kind() == Kind::Add && f.exp < 0; }

Poly poly_const(const Rational& q) { return single({}, q); }

Poly poly_kernel(const Expr& kernel, long exp)
{
    if (exp == 0) return poly_const(1);
    return normalize_monomial({{kernel, exp}}, 1);
}

Poly poly_add(Poly a, const Poly& b)
{
    for (const auto& [m, c] : b) add_term(a, m, c);
    check_size(a);
    return a;
}

Poly poly_sub(Poly a, const Poly& b)
{
    for (const auto& [m, c] : b) add_term(a, m, -c);
    check_size(a);
    return a;
}

Poly poly_scale(Poly a, const Rational& q)
{
    if (sgn(q) == 0) return {};
    for (auto& [m, c] : a) c *= q;
    return a;
}

Poly poly_mul(const Poly& a, const Poly& b)
{
    Poly out;
    if (a.empty() || b.empty()) return out;
    if (is_constant(a)) return poly_scale(b, a.begin()->second);
    if (is_constant(b)) return poly_scale(a, b.begin()->second);
    for (const auto& [ma, ca] : a) {
        for (const auto& [mb, cb] : b) {
            Monomial m = merge(ma, mb);
            Rational c = ca * cb;
            if (!needs_normalization(m)) {
                add_term(out, m, c);
            } else {
                for (const auto& [mm, cc] : normalize_monomial(m, c)) add_term(out, mm, cc);
            }
        }
        check_size(out);
    }
    return out;
}

Poly poly_pow(const Poly& a, long n)
{
    if (n < 0) return poly_pow(poly_inverse(a), -n);
    Poly result = poly_const(1);
    Poly base = a;
    while (n > 0) {
        if (n & 1) result = poly_mul(result, base);
        n >>= 1;
        if (n > 0) base = poly_mul(base, base);
    }
    return result;
}

bool poly_is_monomial(const Poly& a) { return a.size() == 1; }

Poly poly_inverse(const Poly& a)
{
    if (a.empty()) throw DivisionByZero("division by zero");
    if (a.size() == 1) {
        const auto& [m, c] = *a.begin();
        return normalize_monomial(negated(m), 1 / c);
    }
    Together t = together(a);
    const Poly& n = t.numerator;
    if (n.empty()) throw DivisionByZero("division by an expression that is identically zero");
    Poly inv_den = normalize_monomial(negated(t.denominator), 1);
    if (n.size() == 1) return poly_mul(inv_den, poly_inverse(n));
    Monomial cm = content_monomial(n, true);
    Poly reduced = divide_by_monomial(n, cm);
    Rational lc = reduced.rbegin()->second;
    reduced = poly_scale(std::move(reduced), 1 / lc);
    Expr s = from_poly(reduced);
    Poly recip = single({{s, -1}}, 1 / lc);
    return poly_mul(poly_mul(recip, normalize_monomial(negated(cm), 1)), inv_den);
}

Together together(const Poly& p)
{
    std::map<Expr, long, ExprLess> need;
    for (const auto& [m, c] : p)
        for (const auto& f : m)
            if (is_reciprocal_kernel(f)) {
                long& k = need[f.kernel];
                k = std::max(k, -f.exp);
            }
    if (need.empty()) return {p, {}};

    std::map<Expr, Poly, ExprLess> as_poly;
    for (const auto& [k, e] : need) as_poly.emplace(k, to_poly(k));
    std::map<std::pair<const Node*, long>, Poly> pow_cache;
    auto power = [&](const Expr& k, long e) -> const Poly& {
        auto key = std::make_pair(k.get(), e);
        auto it = pow_cache.find(key);
        if (it == pow_cache.end()) it = pow_cache.emplace(key, poly_pow(as_poly.at(k), e)).first;
        return it->second;
    };

    Poly num;
    for (const auto& [m, c] : p) {
        Monomial rest;
        std::map<Expr, long, ExprLess> have;
        for (const auto& f : m) {
            if (is_reciprocal_kernel(f)) have[f.kernel] = -f.exp;
            else rest.push_back(f);
        }
        Poly term = single(rest, c);
        for (const auto& [k, e] : need) {
            long missing = e - (have.count(k) ? have[k] : 0);
            if (missing > 0) term = poly_mul(term, power(k, missing));
        }
        num = poly_add(std::move(num), term);
    }

    Together out;
    for (auto& [k, e] : need) {
        while (e > 0 && !num.empty()) {
            auto q = poly_exact_divide(num, as_poly.at(k));
            if (!q) break;
            num = std::move(*q);
            --e;
        }
    }
    out.numerator = std::move(num);
    if (out.numerator.empty()) return out;
    for (const auto& [k, e] : need)
        if (e > 0) out.denominator.push_back({k, -e});
    std::sort(out.denominator.begin(), out.denominator.end(),
              [](const Factor& a, const Factor& b) { return kernel_compare(a.kernel, b.kernel) < 0; });
    return out;
}

Poly finalize(const Poly& p)
{
    bool any = false;
    for (const auto& [m, c] : p)
        for (const auto& f : m)
            if (is_reciprocal_kernel(f)) any = true;
    if (!any) return p;
    Together t = together(p);
    if (t.denominator.empty()) return t.numerator;
    Poly out;
    for (const auto& [m, c] : t.numerator) add_term(out, merge(m, t.denominator), c);
    return out;
}

std::optional<Poly> poly_exact_divide(const Poly& a, const Poly& b)
{
    if (b.empty()) throw DivisionByZero("division by zero");
    if (a.empty()) return Poly{};
    if (b.size() == 1) return poly_mul(a, poly_inverse(b));
    Monomial ca = content_monomial(a, false);
    Monomial cb = content_monomial(b, false);
    Poly rem = divide_by_monomial(a, ca);
    Poly div = divide_by_monomial(b, cb);
    const auto& [lb, lcb] = *div.rbegin();
    Poly quot;
    constexpr int kMaxSteps = 20000;
    for (int step = 0; !rem.empty(); ++step) {
        if (step > kMaxSteps) return std::nullopt;
        const auto& [la, lca] = *rem.rbegin();
        Monomial qm = merge(la, lb, -1);
        for (const auto& f : qm)
            if (f.exp < 0 || !is_plain(f.kernel)) return std::nullopt;
        Rational qc = lca / lcb;
        add_term(quot, qm, qc);
        rem = poly_sub(std::move(rem), poly_mul(single(qm, qc), div));
    }
    Monomial shift = merge(ca, cb, -1);
    return divide_by_monomial(quot, negated(shift));
}

Poly to_poly(const Expr& e)
{
    if (e.is_canonical()) {
        auto decode_term = [](const Expr& t, Poly& out) {
            Rational c = 1;
            Monomial m;
            auto push = [&m](const Expr& f) {
                if (f.kind() == Kind::Pow) m.push_back({f.children()[0], f.exponent()});
                else m.push_back({f, 1});
            };
            if (t.kind() == Kind::Number) {
                c = t.number();
            } else if (t.kind() == Kind::Mul) {
                for (const auto& f : t.children()) {
                    if (f.kind() == Kind::Number) c = f.number();
                    else push(f);
                }
            } else {
                push(t);
            }
            add_term(out, m, c);
        };
        Poly out;
        if (e.kind() == Kind::Add) {
            for (const auto& t : e.children()) decode_term(t, out);
        } else {
            decode_term(e, out);
        }
        return out;
    }
    switch (e.kind()) {
    case Kind::Number: return poly_const(e.number());
    case Kind::Symbol:
    case Kind::Jet: return single({{e, 1}}, 1);
    case Kind::Func: {
        std::vector<Expr> args;
        for (const auto& a : e.children()) args.push_back(canonicalize(a));
        return single({{Expr::func(e.name(), std::move(args), e.orders()), 1}}, 1);
    }
    case Kind::Add: {
        Poly out;
        for (const auto& t : e.children()) out = poly_add(std::move(out), to_poly(t));
        return out;
    }
    case Kind::Mul: {
        Poly out = poly_const(1);
        for (const auto& f : e.children()) {
            out = poly_mul(out, to_poly(f));
            if (out.empty()) break;
        }
        return out;
    }
    case Kind::Pow: return int_pow(to_poly(e.children()[0]), e.exponent());
    case Kind::SymPow: return make_sympow(to_poly(e.children()[0]), to_poly(e.children()[1]));
    case Kind::Exp: return make_exp(to_poly(e.children()[0]));
    case Kind::Log: return make_log(to_poly(e.children()[0]));
    }
    return {};
}

Expr from_poly(const Poly& p)
{
    if (p.empty()) return Expr(0);
    std::vector<Expr> terms;
    terms.reserve(p.size());
    for (auto it = p.rbegin(); it != p.rend(); ++it) {
        const auto& [m, c] = *it;
        std::vector<Expr> factors;
        for (const auto& f : m) {
            if (f.exp == 1) {
                factors.push_back(f.kernel);
            } else {
                Node n;
                n.kind = Kind::Pow;
                n.kids = {f.kernel};
                n.exponent = f.exp;
                factors.push_back(make_canonical_node(std::move(n)));
            }
        }
        if (factors.empty()) {
            terms.push_back(Expr(c));
        } else if (c == 1 && factors.size() == 1) {
            terms.push_back(factors.front());
        } else {
            Node n;
            n.kind = Kind::Mul;
            if (c != 1) n.kids.push_back(Expr(c));
            for (auto& f : factors) n.kids.push_back(std::move(f));
            terms.push_back(make_canonical_node(std::move(n)));
        }
    }
    if (terms.size() == 1) return terms.front();
    Node n;
    n.kind = Kind::Add;
    n.kids = std::move(terms);
    return make_canonical_node(std::move(n));
}

Poly make_exp(const Poly& arg_in)
{
    Poly arg = finalize(arg_in);
    if (arg.empty()) return poly_const(1);
    Poly result = poly_const(1);
    Poly rest;
    for (const auto& [m, c] : arg) {
        const Factor* log_factor = nullptr;
        bool ok = true;
        Monomial params;
        for (const auto& f : m) {
            if (f.kernel.kind() == Kind::Log && f.exp == 1 && !log_factor) {
                log_factor = &f;
            } else if (f.kernel.kind() == Kind::Symbol && f.kernel.symbol_kind() == SymbolKind::Parameter) {
                params.push_back(f);
            } else {
                ok = false;
            }
        }
        if (!ok || !log_factor) {
            add_term(rest, m, c);
            continue;
        }
        Poly y = to_poly(log_factor->kernel.children()[0]);
        if (params.empty() && c.get_den() == 1)
            result = poly_mul(result, int_pow(y, c.get_num().get_si()));
        else
            result = poly_mul(result, make_sympow(y, single(params, c)));
    }
    if (!rest.empty()) {
        Node n;
        n.kind = Kind::Exp;
        n.kids = {from_poly(rest)};
        result = poly_mul(result, single({{make_canonical_node(std::move(n)), 1}}, 1));
    }
    return result;
}

Poly make_log(const Poly& arg_in)
{
    Poly arg = finalize(arg_in);
    if (arg.empty()) throw DivisionByZero("logarithm of zero");
    if (arg.size() == 1) {
        const auto& [m, c] = *arg.begin();
        if (m.empty() && c == 1) return {};
        if (c == 1 && m.size() == 1 && m[0].exp == 1 && m[0].kernel.kind() == Kind::Exp)
            return to_poly(m[0].kernel.children()[0]);
    }
    Node n;
    n.kind = Kind::Log;
    n.kids = {from_poly(arg)};
    return single({{make_canonical_node(std::move(n)), 1}}, 1);
}

Poly make_sympow(const Poly& base_in, const Poly& ex_in)
{
    Poly ex = finalize(ex_in);
    if (ex.empty()) return poly_const(1);
    Poly base = finalize(base_in);
    if (base.empty()) return {};
    if (base.size() == 1 && base.begin()->first.empty() && base.begin()->second == 1) return poly_const(1);
    Rational c = constant_part(ex);
    Rational n = floor_of(c);
    Poly rest = poly_sub(ex, poly_const(n));
    Poly ipart = int_pow(base, n.get_num().get_si());
    if (rest.empty()) return ipart;
    return poly_mul(ipart, sympow_core(base, rest));
}

Poly differentiate(const Poly& p, const KernelDerivative& rule)
{
    std::unordered_map<const Node*, Poly> cache;
    std::function<Poly(const Poly&)> diff;
    std::function<const Poly&(const Expr&)> dk = [&](const Expr& k) -> const Poly& {
        auto it = cache.find(k.get());
        if (it != cache.end()) return it->second;
        Poly d;
        if (auto r = rule(k)) {
            d = std::move(*r);
        } else {
            switch (k.kind()) {
            case Kind::Func: {
                const auto& args = k.children();
                for (std::size_t i = 0; i < args.size(); ++i) {
                    Poly da = diff(to_poly(args[i]));
                    if (da.empty()) continue;
                    std::vector<int> ord = k.orders();
                    ++ord[i];
                    Expr fi = Expr::func(k.name(), args, std::move(ord));
                    d = poly_add(std::move(d), poly_mul(single({{fi, 1}}, 1), da));
                }
                break;
            }
            case Kind::Exp: d = poly_mul(poly_kernel(k), diff(to_poly(k.children()[0]))); break;
            case Kind::Log: {
                Poly a = to_poly(k.children()[0]);
                d = poly_mul(diff(a), poly_inverse(a));
                break;
            }
            case Kind::SymPow: {
                Poly b = to_poly(k.children()[0]);
                Poly s = to_poly(k.children()[1]);
                Poly db = diff(b), ds = diff(s);
                Poly inner;
                if (!db.empty()) inner = poly_mul(poly_mul(s, db), poly_inverse(b));
                if (!ds.empty()) inner = poly_add(std::move(inner), poly_mul(ds, make_log(b)));
                d = poly_mul(single({{k, 1}}, 1), inner);
                break;
            }
            case Kind::Add: d = diff(to_poly(k)); break;
            default: break;
            }
        }
        return cache.emplace(k.get(), std::move(d)).first->second;
    };
    diff = [&](const Poly& q) -> Poly {
        Poly out;
        for (const auto& [m, c] : q) {
            for (std::size_t i = 0; i < m.size(); ++i) {
                const Poly& d = dk(m[i].kernel);
                if (d.empty()) continue;
                Monomial rest = m;
                if (--rest[i].exp == 0) rest.erase(rest.begin() + static_cast<long>(i));
                out = poly_add(std::move(out), poly_mul(single(rest, c * m[i].exp), d));
            }
        }
        return out;
    };
    return finalize(diff(p));
}

Expr differentiate(const Expr& e, const KernelDerivative& rule)
{
    return from_poly(differentiate(finalize(to_poly(e)), rule));
}

std::map<Monomial, Poly, MonomialLess> split_by(const Poly& p, const std::function<bool(const Expr&)>& selector)
{
    std::map<Monomial, Poly, MonomialLess> out;
    for (const auto& [m, c] : p) {
        Monomial key, rest;
        for (const auto& f : m) (selector(f.kernel) ? key : rest).push_back(f);
        add_term(out[key], rest, c);
    }
    for (auto it = out.begin(); it != out.end();)
        it = it->second.empty() ? out.erase(it) : std::next(it);
    return out;
}

} // namespace conslin
