#pragma once

#include "conslin/jet.hpp"

#include <optional>
#include <string>
#include <vector>

namespace conslin {

enum class TransformKind { Point, Contact };

/// z_i = phi_i(x, u[, u_x]), w = psi(x, u[, u_x]) and, for contact maps,
/// w_{z_i} = rho_i. Expressions are written in the source declarations; the
/// target variables get their own names.
struct Transformation {
    TransformKind kind = TransformKind::Point;
    Declarations source;
    std::vector<std::string> target_vars;
    std::vector<std::string> target_deps;
    std::vector<Expr> phi;
    std::vector<Expr> psi;
    std::vector<Expr> rho;

    Declarations target_decls() const;
};

class SingularJacobian : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class ContactViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class InverseUnavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// det(D phi_i / D x_j) in the source variables.
Expr transformation_jacobian(const Transformation& tr);

bool check_contact_condition(const Transformation& tr);

/// Source variables as expressions in the target jet space.
struct InverseMap {
    std::vector<Expr> x;                    // per source independent
    std::vector<Expr> u;                    // per source dependent
    std::vector<std::vector<Expr>> u_first; // contact only: u_{x_j}
};

/// Closed-form inverse by isolating one unknown at a time (affine, exp and log
/// patterns). Throws InverseUnavailable.
InverseMap invert(const Transformation& tr);

/// The inverse as a transformation from the target back to the source, when the
/// inverse is a point map.
Transformation inverse_transformation(const Transformation& tr);

/// Expression of the source jet space rewritten in target jets.
class ChangeOfVariables {
public:
    explicit ChangeOfVariables(const Transformation& tr);
    Expr operator()(const Expr& e);
    const InverseMap& inverse() const { return inv_; }

private:
    Expr source_jet(int alpha, const MultiIndex& mi);
    Expr d_source(const Expr& e, std::size_t j);

    Transformation tr_;
    Declarations target_;
    InverseMap inv_;
    std::vector<std::vector<Expr>> minv_; // (M^-1)_{ji}: D_{x_j} = sum_i minv[j][i] D_{z_i}
    std::map<std::pair<int, MultiIndex>, Expr> memo_;
};

struct TransformedSystem {
    PdeSystem system;
    std::vector<Expr> factors; // original transformed equation = factor * output equation
};

/// Rewrites each equation in the target variables, clears denominators and
/// strips nonzero content free of derivative jets.
TransformedSystem apply_transformation(const PdeSystem& sys, const Transformation& tr);

/// Numerator of e with content free of derivative jets removed; `factor`
/// receives e / result.
Expr clear_factors(const Expr& e, Expr* factor = nullptr);

struct EquivalenceReport {
    bool equivalent = false;
    std::string method; // "factor" or "reduction"
    std::vector<Expr> factors; // per equation of a when method == "factor"
};

/// Equal up to nonzero factors per equation, or mutually reducible by leading rules.
EquivalenceReport equivalent_systems(const PdeSystem& a, const PdeSystem& b);

struct PushedSolution {
    std::vector<Expr> x; // source independents in terms of z (parametric)
    std::vector<Expr> u; // source dependents in terms of z
    bool explicit_form = false; // x_i == z_i up to renaming
};

/// Image in the source variables of a target solution w(z). Point maps only.
PushedSolution push_solution(const Transformation& tr, const std::vector<Expr>& target_solution);

} // namespace conslin
