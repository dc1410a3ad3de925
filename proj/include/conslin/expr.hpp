#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace conslin {

using Rational = mpq_class;

enum class Kind : std::uint8_t { Number, Symbol, Jet, Func, Add, Mul, Pow, SymPow, Exp, Log };

enum class SymbolKind : std::uint8_t { Independent, Parameter, Coordinate };

/// Derivative multi-index of a jet variable: (independent variable, order) pairs,
/// sorted by variable name, zero orders omitted. The empty index is U itself.
using MultiIndex = std::vector<std::pair<std::string, int>>;

int total_order(const MultiIndex& mi);
int order_in(const MultiIndex& mi, const std::string& var);
MultiIndex raised(MultiIndex mi, const std::string& var, int by = 1);
/// True when `a` is componentwise <= `b`.
bool index_divides(const MultiIndex& a, const MultiIndex& b);
/// b - a, assuming index_divides(a, b).
MultiIndex index_difference(const MultiIndex& b, const MultiIndex& a);

class Node;

/// Immutable, shared expression tree.
///
/// Trees built with the arithmetic operators are raw: nothing is folded or
/// sorted. `canonicalize` produces the normal form, which is again an Expr
/// (flagged canonical so later passes skip it).
class Expr {
public:
    Expr();
    Expr(int v);
    Expr(long v);
    Expr(const Rational& q);
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static Expr symbol(const std::string& name, SymbolKind kind = SymbolKind::Independent);
    static Expr jet(const std::string& dependent, int index, MultiIndex mi = {});
    /// Arbitrary function term; `orders[i]` is the derivative order in argument i.
    static Expr func(const std::string& name, std::vector<Expr> args, std::vector<int> orders = {});
    static Expr add(std::vector<Expr> terms);
    static Expr mul(std::vector<Expr> factors);
    static Expr pow(const Expr& base, long exponent);
    static Expr sympow(const Expr& base, const Expr& exponent);
    static Expr exp(const Expr& arg);
    static Expr log(const Expr& arg);

    Kind kind() const;
    const Node& node() const { return *node_; }
    const Node* get() const { return node_.get(); }

    bool is_number() const { return kind() == Kind::Number; }
    bool is_zero() const;
    bool is_one() const;
    bool is_atom() const; // Symbol, Jet or Func
    const Rational& number() const;
    const std::string& name() const;
    SymbolKind symbol_kind() const;
    int dep_index() const;
    const MultiIndex& multi_index() const;
    const std::vector<int>& orders() const;
    const std::vector<Expr>& children() const;
    long exponent() const;
    std::size_t hash() const;
    bool is_canonical() const;

    std::string str() const;

private:
    std::shared_ptr<const Node> node_;
};

class Node {
public:
    Kind kind = Kind::Number;
    bool canonical = false;
    std::size_t hash = 0;
    Rational value;
    std::string name;
    SymbolKind skind = SymbolKind::Independent;
    int index = 0;
    MultiIndex mi;
    std::vector<int> orders;
    std::vector<Expr> kids;
    long exponent = 0;
};

/// Marks a freshly built node as canonical. Only the normalizer should call this.
Expr make_canonical_node(Node n);

// Structural comparison. `compare` is a deterministic total order.
int compare(const Expr& a, const Expr& b);
bool operator==(const Expr& a, const Expr& b);
inline bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }
struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

// Raw construction.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);

class DivisionByZero : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ExpressionTooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Upper bound on the number of terms any intermediate polynomial may reach
/// (0 = unlimited). Thread-local; the CLI sets it from --max-terms.
void set_max_terms(std::size_t n);
std::size_t max_terms();

Expr canonicalize(const Expr& e);
inline bool is_identically_zero(const Expr& e) { return canonicalize(e).is_zero(); }

/// Rebuilds `e` bottom-up, replacing atoms (symbols, jets, function terms) for
/// which `fn` returns a value. Function-term arguments are rewritten before `fn`
/// sees the term. Result is canonical.
Expr map_atoms(const Expr& e, const std::function<std::optional<Expr>(const Expr&)>& fn);

/// Simultaneous substitution of atoms; right-hand sides are not rescanned.
Expr substitute(const Expr& e, const std::vector<std::pair<Expr, Expr>>& rules);

/// All distinct atoms (symbols, jets, function terms) anywhere in `e`, sorted.
std::vector<Expr> atoms(const Expr& e);
std::vector<Expr> jets_of(const Expr& e);
std::vector<Expr> funcs_of(const Expr& e);
bool contains_atom(const Expr& e, const Expr& atom);
bool depends_on_any(const Expr& e, const std::vector<Expr>& atoms);

// Printing in the input grammar.
std::string to_string(const Expr& e);

} // namespace conslin
