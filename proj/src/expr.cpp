#include "conslin/expr.hpp"

#include "conslin/poly.hpp"

#include <algorithm>
#include <unordered_map>

namespace conslin {

int total_order(const MultiIndex& mi)
{
    int s = 0;
    for (const auto& [v, k] : mi) s += k;
    return s;
}

int order_in(const MultiIndex& mi, const std::string& var)
{
    for (const auto& [v, k] : mi)
        if (v == var) return k;
    return 0;
}

MultiIndex raised(MultiIndex mi, const std::string& var, int by)
{
    auto it = std::lower_bound(mi.begin(), mi.end(), var,
                               [](const auto& p, const std::string& s) { return p.first < s; });
    if (it != mi.end() && it->first == var) {
        it->second += by;
        if (it->second == 0) mi.erase(it);
    } else if (by != 0) {
        mi.insert(it, {var, by});
    }
    return mi;
}

bool index_divides(const MultiIndex& a, const MultiIndex& b)
{
    for (const auto& [v, k] : a)
        if (order_in(b, v) < k) return false;
    return true;
}

MultiIndex index_difference(const MultiIndex& b, const MultiIndex& a)
{
    MultiIndex out = b;
    for (const auto& [v, k] : a) out = raised(std::move(out), v, -k);
    return out;
}

namespace {

constexpr std::size_t kFnvOffset = 1469598103934665603ull;
constexpr std::size_t kFnvPrime = 1099511628211ull;

std::size_t mix(std::size_t h, std::size_t v)
{
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xffu;
        h *= kFnvPrime;
    }
    return h;
}

std::size_t mix_str(std::size_t h, const std::string& s)
{
    for (unsigned char c : s) {
        h ^= c;
        h *= kFnvPrime;
    }
    return mix(h, s.size());
}

std::size_t hash_rational(const Rational& q)
{
    std::size_t h = kFnvOffset;
    h = mix(h, static_cast<std::size_t>(mpz_sgn(q.get_num_mpz_t()) + 1));
    h = mix(h, mpz_get_ui(q.get_num_mpz_t()));
    h = mix(h, mpz_size(q.get_num_mpz_t()));
    h = mix(h, mpz_get_ui(q.get_den_mpz_t()));
    return h;
}

void seal(Node& n)
{
    std::size_t h = mix(kFnvOffset, static_cast<std::size_t>(n.kind));
    switch (n.kind) {
    case Kind::Number: h = mix(h, hash_rational(n.value)); break;
    case Kind::Symbol: h = mix_str(h, n.name); break;
    case Kind::Jet:
        h = mix_str(h, n.name);
        h = mix(h, static_cast<std::size_t>(n.index));
        for (const auto& [v, k] : n.mi) h = mix(mix_str(h, v), static_cast<std::size_t>(k));
        break;
    case Kind::Func:
        h = mix_str(h, n.name);
        for (int o : n.orders) h = mix(h, static_cast<std::size_t>(o));
        break;
    case Kind::Pow: h = mix(h, static_cast<std::size_t>(n.exponent)); break;
    default: break;
    }
    for (const auto& k : n.kids) h = mix(h, k.hash());
    n.hash = h;
}

Expr build(Node n)
{
    seal(n);
    return Expr(std::make_shared<const Node>(std::move(n)));
}

const Expr& zero_expr()
{
    static const Expr z = [] {
        Node n;
        n.kind = Kind::Number;
        n.canonical = true;
        return build(std::move(n));
    }();
    return z;
}

int cmp_rational(const Rational& a, const Rational& b)
{
    int c = cmp(a, b);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

} // namespace

Expr make_canonical_node(Node n)
{
    n.canonical = true;
    return build(std::move(n));
}

Expr::Expr() : node_(zero_expr().node_) {}

Expr::Expr(int v) : Expr(Rational(v)) {}

Expr::Expr(long v) : Expr(Rational(v)) {}

Expr::Expr(const Rational& q)
{
    Node n;
    n.kind = Kind::Number;
    n.value = q;
    n.value.canonicalize();
    n.canonical = true;
    node_ = build(std::move(n)).node_;
}

Expr Expr::symbol(const std::string& name, SymbolKind kind)
{
    Node n;
    n.kind = Kind::Symbol;
    n.name = name;
    n.skind = kind;
    n.canonical = true;
    return build(std::move(n));
}

Expr Expr::jet(const std::string& dependent, int index, MultiIndex mi)
{
    std::sort(mi.begin(), mi.end());
    mi.erase(std::remove_if(mi.begin(), mi.end(), [](const auto& p) { return p.second == 0; }), mi.end());
    Node n;
    n.kind = Kind::Jet;
    n.name = dependent;
    n.index = index;
    n.mi = std::move(mi);
    n.canonical = true;
    return build(std::move(n));
}

Expr Expr::func(const std::string& name, std::vector<Expr> args, std::vector<int> orders)
{
    if (orders.empty()) orders.assign(args.size(), 0);
    if (orders.size() != args.size()) throw std::invalid_argument("function term: orders/args size mismatch");
    Node n;
    n.kind = Kind::Func;
    n.name = name;
    n.orders = std::move(orders);
    n.canonical = std::all_of(args.begin(), args.end(), [](const Expr& a) { return a.is_canonical(); });
    n.kids = std::move(args);
    return build(std::move(n));
}

Expr Expr::add(std::vector<Expr> terms)
{
    if (terms.empty()) return Expr();
    if (terms.size() == 1) return terms.front();
    Node n;
    n.kind = Kind::Add;
    n.kids = std::move(terms);
    return build(std::move(n));
}

Expr Expr::mul(std::vector<Expr> factors)
{
    if (factors.empty()) return Expr(1);
    if (factors.size() == 1) return factors.front();
    Node n;
    n.kind = Kind::Mul;
    n.kids = std::move(factors);
    return build(std::move(n));
}

Expr Expr::pow(const Expr& base, long exponent)
{
    Node n;
    n.kind = Kind::Pow;
    n.kids = {base};
    n.exponent = exponent;
    return build(std::move(n));
}

Expr Expr::sympow(const Expr& base, const Expr& exponent)
{
    Node n;
    n.kind = Kind::SymPow;
    n.kids = {base, exponent};
    return build(std::move(n));
}

Expr Expr::exp(const Expr& arg)
{
    Node n;
    n.kind = Kind::Exp;
    n.kids = {arg};
    return build(std::move(n));
}

Expr Expr::log(const Expr& arg)
{
    Node n;
    n.kind = Kind::Log;
    n.kids = {arg};
    return build(std::move(n));
}

Kind Expr::kind() const { return node_->kind; }
bool Expr::is_zero() const { return node_->kind == Kind::Number && sgn(node_->value) == 0; }
bool Expr::is_one() const { return node_->kind == Kind::Number && node_->value == 1; }
bool Expr::is_atom() const
{
    return node_->kind == Kind::Symbol || node_->kind == Kind::Jet || node_->kind == Kind::Func;
}
const Rational& Expr::number() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
SymbolKind Expr::symbol_kind() const { return node_->skind; }
int Expr::dep_index() const { return node_->index; }
const MultiIndex& Expr::multi_index() const { return node_->mi; }
const std::vector<int>& Expr::orders() const { return node_->orders; }
const std::vector<Expr>& Expr::children() const { return node_->kids; }
long Expr::exponent() const { return node_->exponent; }
std::size_t Expr::hash() const { return node_->hash; }
bool Expr::is_canonical() const { return node_->canonical; }
std::string Expr::str() const { return to_string(*this); }

int compare(const Expr& a, const Expr& b)
{
    if (a.get() == b.get()) return 0;
    const Node& x = a.node();
    const Node& y = b.node();
    if (x.kind != y.kind) return x.kind < y.kind ? -1 : 1;
    switch (x.kind) {
    case Kind::Number: return cmp_rational(x.value, y.value);
    case Kind::Symbol:
        if (x.name != y.name) return x.name < y.name ? -1 : 1;
        if (x.skind != y.skind) return x.skind < y.skind ? -1 : 1;
        return 0;
    case Kind::Jet: {
        if (x.index != y.index) return x.index < y.index ? -1 : 1;
        int ox = total_order(x.mi), oy = total_order(y.mi);
        if (ox != oy) return ox < oy ? -1 : 1;
        if (x.mi != y.mi) return x.mi < y.mi ? -1 : 1;
        if (x.name != y.name) return x.name < y.name ? -1 : 1;
        return 0;
    }
    case Kind::Func:
        if (x.name != y.name) return x.name < y.name ? -1 : 1;
        if (x.orders != y.orders) return x.orders < y.orders ? -1 : 1;
        break;
    case Kind::Pow:
        if (x.exponent != y.exponent) return x.exponent < y.exponent ? -1 : 1;
        break;
    default: break;
    }
    if (x.kids.size() != y.kids.size()) return x.kids.size() < y.kids.size() ? -1 : 1;
    for (std::size_t i = 0; i < x.kids.size(); ++i) {
        int c = compare(x.kids[i], y.kids[i]);
        if (c != 0) return c;
    }
    return 0;
}

bool operator==(const Expr& a, const Expr& b)
{
    if (a.get() == b.get()) return true;
    if (a.hash() != b.hash()) return false;
    return compare(a, b) == 0;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::add({a, Expr::mul({Expr(-1), b})}); }
Expr operator-(const Expr& a)
{
    if (a.is_number()) return Expr(Rational(-a.number()));
    return Expr::mul({Expr(-1), a});
}
Expr operator*(const Expr& a, const Expr& b) { return Expr::mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::mul({a, Expr::pow(b, -1)}); }

namespace {
thread_local std::size_t g_max_terms = 0;
}

void set_max_terms(std::size_t n) { g_max_terms = n; }
std::size_t max_terms() { return g_max_terms; }

Expr canonicalize(const Expr& e)
{
    if (e.is_canonical()) return e;
    return from_poly(finalize(to_poly(e)));
}

namespace {

Expr rebuild(const Expr& e, const std::function<std::optional<Expr>(const Expr&)>& fn,
             std::unordered_map<const Node*, Expr>& memo)
{
    auto it = memo.find(e.get());
    if (it != memo.end()) return it->second;
    Expr out;
    switch (e.kind()) {
    case Kind::Number: out = e; break;
    case Kind::Symbol:
    case Kind::Jet: {
        auto r = fn(e);
        out = r ? *r : e;
        break;
    }
    case Kind::Func: {
        std::vector<Expr> args;
        bool changed = false;
        for (const auto& a : e.children()) {
            args.push_back(rebuild(a, fn, memo));
            changed = changed || args.back().get() != a.get();
        }
        Expr f = changed ? Expr::func(e.name(), std::move(args), e.orders()) : e;
        auto r = fn(f);
        out = r ? *r : f;
        break;
    }
    default: {
        std::vector<Expr> kids;
        bool changed = false;
        for (const auto& k : e.children()) {
            kids.push_back(rebuild(k, fn, memo));
            changed = changed || kids.back().get() != k.get();
        }
        if (!changed) {
            out = e;
            break;
        }
        switch (e.kind()) {
        case Kind::Add: out = Expr::add(std::move(kids)); break;
        case Kind::Mul: out = Expr::mul(std::move(kids)); break;
        case Kind::Pow: out = Expr::pow(kids[0], e.exponent()); break;
        case Kind::SymPow: out = Expr::sympow(kids[0], kids[1]); break;
        case Kind::Exp: out = Expr::exp(kids[0]); break;
        case Kind::Log: out = Expr::log(kids[0]); break;
        default: out = e; break;
        }
    }
    }
    memo.emplace(e.get(), out);
    return out;
}

void collect_atoms(const Expr& e, std::vector<Expr>& out, std::unordered_map<const Node*, bool>& seen)
{
    if (!seen.emplace(e.get(), true).second) return;
    if (e.kind() == Kind::Symbol || e.kind() == Kind::Jet) {
        out.push_back(e);
        return;
    }
    if (e.kind() == Kind::Func) out.push_back(e);
    for (const auto& k : e.children()) collect_atoms(k, out, seen);
}

} // namespace

Expr map_atoms(const Expr& e, const std::function<std::optional<Expr>(const Expr&)>& fn)
{
    std::unordered_map<const Node*, Expr> memo;
    return canonicalize(rebuild(e, fn, memo));
}

Expr substitute(const Expr& e, const std::vector<std::pair<Expr, Expr>>& rules)
{
    if (rules.empty()) return canonicalize(e);
    return map_atoms(e, [&](const Expr& a) -> std::optional<Expr> {
        for (const auto& [lhs, rhs] : rules)
            if (lhs == a) return rhs;
        return std::nullopt;
    });
}

std::vector<Expr> atoms(const Expr& e)
{
    std::vector<Expr> out;
    std::unordered_map<const Node*, bool> seen;
    collect_atoms(e, out, seen);
    std::sort(out.begin(), out.end(), ExprLess{});
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Expr> jets_of(const Expr& e)
{
    auto all = atoms(e);
    std::vector<Expr> out;
    for (auto& a : all)
        if (a.kind() == Kind::Jet) out.push_back(a);
    return out;
}

std::vector<Expr> funcs_of(const Expr& e)
{
    auto all = atoms(e);
    std::vector<Expr> out;
    for (auto& a : all)
        if (a.kind() == Kind::Func) out.push_back(a);
    return out;
}

bool contains_atom(const Expr& e, const Expr& atom)
{
    if (e == atom) return true;
    for (const auto& k : e.children())
        if (contains_atom(k, atom)) return true;
    return false;
}

bool depends_on_any(const Expr& e, const std::vector<Expr>& list)
{
    for (const auto& a : list)
        if (contains_atom(e, a)) return true;
    return false;
}

} // namespace conslin
