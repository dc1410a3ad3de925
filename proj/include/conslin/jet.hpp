#pragma once

#include "conslin/parse.hpp"
#include "conslin/poly.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace conslin {

// Total derivative D_var. Symbols are matched by name; jets raise their index in
// `var`; function terms use the chain rule through their arguments.
Expr total_derivative(const Expr& e, const std::string& var);
Expr total_derivative(const Expr& e, const MultiIndex& mi);
Poly total_derivative(const Poly& p, const std::string& var);

// Partial derivative with respect to an atom (symbol, jet or function term).
Expr partial(const Expr& e, const Expr& atom);

// E_{U^sigma}: sum over jets J of dependent `sigma` present in e of (-D)_J d e / d U_J.
Expr euler_operator(const Expr& e, int sigma);

struct LeadingRule {
    Expr jet;
    Expr rhs;
};

class CyclicRules : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotSolvable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Solves `equation` for `jet`; requires the equation to be affine in it.
LeadingRule solve_for(const Expr& equation, const Expr& jet);

/// Automatic leading jet: highest total order, then higher order in earlier
/// declared independents, then lower dependent index; the equation must be
/// affine in it. Jets in `taken` are skipped.
std::optional<LeadingRule> choose_leading(const Expr& equation, const std::vector<std::string>& independents,
                                          const std::vector<Expr>& taken = {});

/// Lazy, memoized on-solution reduction by a set of leading rules. A jet U_J is
/// rewritten by D_{J-L}(rhs) for the first rule U_L with L <= J.
class Reducer {
public:
    Reducer() = default;
    explicit Reducer(std::vector<LeadingRule> rules);

    const std::vector<LeadingRule>& rules() const { return rules_; }
    std::optional<Expr> rhs_for(const Expr& jet);
    Expr reduce(const Expr& e);

private:
    std::vector<LeadingRule> rules_;
    std::map<Expr, std::optional<Expr>, ExprLess> memo_;
    std::set<Expr, ExprLess> active_;
};

/// Explicit rule list for every jet up to total order k matched by `rules`.
std::vector<LeadingRule> prolong_rules(const std::vector<LeadingRule>& rules,
                                       const std::vector<std::string>& independents,
                                       const std::vector<std::string>& dependents, int order);

struct PdeSystem {
    Declarations decls;
    std::vector<std::string> names;
    std::vector<Expr> equations;
    /// Explicit leading-solve overrides, per equation.
    std::vector<std::optional<LeadingRule>> overrides;

    std::size_t size() const { return equations.size(); }
    int order() const;
    /// Override when present, automatic choice otherwise. Throws NotSolvable.
    std::vector<LeadingRule> leading_rules() const;
    Reducer reducer() const { return Reducer(leading_rules()); }
};

/// A linear system on arbitrary functions f(frame...). Equations are written in
/// jets of dependents named like the functions over the frame variables, e.g.
/// "f_xx + f_t" with frame (x, t).
struct FunctionConstraint {
    std::vector<std::string> functions;
    std::vector<std::string> frame;
    std::vector<Expr> equations;
    std::vector<std::optional<LeadingRule>> overrides;

    Declarations frame_decls(const Declarations& base = {}) const;
    std::vector<LeadingRule> leading_rules() const;
    int index_of(const std::string& function) const;
};

/// Rewrites function terms f_K(a...) that are reducible modulo constraints.
class ConstraintReducer {
public:
    ConstraintReducer() = default;
    explicit ConstraintReducer(const std::vector<FunctionConstraint>& constraints);
    Expr reduce(const Expr& e);
    bool empty() const { return entries_.empty(); }

private:
    struct Entry {
        FunctionConstraint constraint;
        Reducer reducer;
    };
    std::vector<Entry> entries_;
};

/// Jet over the frame corresponding to the function term f_K(args).
Expr frame_jet(const std::string& function, int index, const std::vector<std::string>& frame,
               const std::vector<int>& orders);
/// Maps a frame expression (jets of the functions, frame symbols) back to
/// function terms of `args`.
Expr from_frame(const Expr& e, const std::vector<std::string>& functions, const std::vector<std::string>& frame,
                const std::vector<Expr>& args);

struct SymmetryGenerator {
    std::vector<Expr> xi;
    std::vector<Expr> eta;
    std::vector<FunctionConstraint> constraints;
};

struct SymmetryReport {
    bool ok = true;
    std::vector<Expr> residuals;
};

/// Prolonged action of the characteristic eta - xi_i U_{x_i} on each equation,
/// reduced on solutions and modulo the generator's constraints.
SymmetryReport verify_point_symmetry(const PdeSystem& sys, const SymmetryGenerator& gen);

} // namespace conslin
