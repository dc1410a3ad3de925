#include "conslin/expr.hpp"

#include <algorithm>
#include <cstdlib>

namespace conslin {

namespace {

std::string print_canonical(const Expr& e);

std::string jet_name(const Expr& j)
{
    std::string s = j.name();
    if (j.multi_index().empty()) return s;
    s += '_';
    for (const auto& [v, k] : j.multi_index())
        for (int i = 0; i < k; ++i) s += v;
    return s;
}

std::string kernel_str(const Expr& k)
{
    switch (k.kind()) {
    case Kind::Symbol: return k.name();
    case Kind::Jet: return jet_name(k);
    case Kind::Func: {
        std::string s = k.name();
        bool any = false;
        std::string idx;
        for (std::size_t i = 0; i < k.orders().size(); ++i)
            for (int r = 0; r < k.orders()[i]; ++r) {
                if (any) idx += ',';
                idx += std::to_string(i + 1);
                any = true;
            }
        if (any) s += "_{" + idx + "}";
        s += '(';
        for (std::size_t i = 0; i < k.children().size(); ++i) {
            if (i) s += ", ";
            s += print_canonical(k.children()[i]);
        }
        return s + ')';
    }
    case Kind::Exp: return "exp(" + print_canonical(k.children()[0]) + ")";
    case Kind::Log: return "log(" + print_canonical(k.children()[0]) + ")";
    case Kind::SymPow:
        return "pow(" + print_canonical(k.children()[0]) + ", " + print_canonical(k.children()[1]) + ")";
    case Kind::Add: return "(" + print_canonical(k) + ")";
    default: return "(" + print_canonical(k) + ")";
    }
}

std::string power_str(const Expr& kernel, long e)
{
    std::string b = kernel_str(kernel);
    return e == 1 ? b : b + "^" + std::to_string(e);
}

// Prints one canonical term; `negative` receives the sign so sums can use " - ".
std::string term_str(const Expr& t, bool& negative)
{
    Rational c = 1;
    std::vector<std::pair<Expr, long>> factors;
    auto push = [&](const Expr& f) {
        if (f.kind() == Kind::Pow) factors.emplace_back(f.children()[0], f.exponent());
        else factors.emplace_back(f, 1);
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
    negative = sgn(c) < 0;
    mpz_class num = abs(c.get_num());
    mpz_class den = c.get_den();
    std::string top;
    if (num != 1) top = num.get_str();
    for (const auto& [k, e] : factors) {
        if (e <= 0) continue;
        if (!top.empty()) top += '*';
        top += power_str(k, e);
    }
    if (top.empty()) top = "1";
    if (den != 1) top += "/" + den.get_str();
    for (const auto& [k, e] : factors)
        if (e < 0) top += "/" + power_str(k, -e);
    return top;
}

// Reciprocal kernels shared by every term of a sum, with the smallest power.
std::vector<std::pair<Expr, long>> common_denominator(const std::vector<Expr>& terms)
{
    std::vector<std::pair<Expr, long>> common;
    bool first = true;
    for (const auto& t : terms) {
        std::vector<std::pair<Expr, long>> mine;
        const std::vector<Expr> single{t};
        const auto& fs = t.kind() == Kind::Mul ? t.children() : single;
        for (const auto& f : fs)
            if (f.kind() == Kind::Pow && f.children()[0].kind() == Kind::Add && f.exponent() < 0)
                mine.emplace_back(f.children()[0], -f.exponent());
        if (first) {
            common = mine;
            first = false;
            continue;
        }
        std::vector<std::pair<Expr, long>> keep;
        for (const auto& [k, e] : common)
            for (const auto& [k2, e2] : mine)
                if (k == k2) keep.emplace_back(k, std::min(e, e2));
        common = std::move(keep);
    }
    return common;
}

Expr strip_denominator(const Expr& t, const std::vector<std::pair<Expr, long>>& den)
{
    const std::vector<Expr> single{t};
    const auto& fs = t.kind() == Kind::Mul ? t.children() : single;
    std::vector<Expr> kept;
    for (const auto& f : fs) {
        if (f.kind() == Kind::Pow && f.children()[0].kind() == Kind::Add) {
            long e = f.exponent();
            for (const auto& [k, d] : den)
                if (k == f.children()[0]) e += d;
            if (e == 0) continue;
            if (e != f.exponent()) {
                Node n;
                n.kind = Kind::Pow;
                n.kids = {f.children()[0]};
                n.exponent = e;
                kept.push_back(make_canonical_node(std::move(n)));
                continue;
            }
        }
        kept.push_back(f);
    }
    if (kept.empty()) return Expr(1);
    if (kept.size() == 1) return kept.front();
    Node n;
    n.kind = Kind::Mul;
    n.kids = std::move(kept);
    return make_canonical_node(std::move(n));
}

std::string print_canonical(const Expr& e)
{
    std::vector<Expr> terms;
    if (e.kind() == Kind::Add) terms = e.children();
    else terms.push_back(e);
    if (terms.size() > 1) {
        auto den = common_denominator(terms);
        if (!den.empty()) {
            std::vector<Expr> stripped;
            for (const auto& t : terms) stripped.push_back(strip_denominator(t, den));
            Node n;
            n.kind = Kind::Add;
            n.kids = std::move(stripped);
            std::string out = "(" + print_canonical(make_canonical_node(std::move(n))) + ")";
            for (const auto& [k, d] : den) out += "/" + power_str(k, d);
            return out;
        }
    }
    std::string out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        bool neg = false;
        std::string s = term_str(terms[i], neg);
        if (i == 0) out += neg ? "-" + s : s;
        else out += (neg ? " - " : " + ") + s;
    }
    return out;
}

} // namespace

std::string to_string(const Expr& e) { return print_canonical(canonicalize(e)); }

} // namespace conslin
