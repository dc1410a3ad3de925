#pragma once

#include "conslin/jet.hpp"
#include "conslin/linops.hpp"

#include <string>
#include <vector>

namespace conslin {

enum class AnsatzShape { General, FixedIndependents, IntegratingFactor };

std::string shape_name(AnsatzShape s);
AnsatzShape parse_shape(const std::string& s);

struct MultiplierAnsatz {
    int order = 0;
    AnsatzShape shape = AnsatzShape::General;
    /// Explicit argument list; empty means x, U and all jets up to `order`.
    std::vector<Expr> args;
};

/// The ansatz arguments actually used (presets force order 0).
std::vector<Expr> ansatz_arguments(const PdeSystem& sys, const MultiplierAnsatz& a);

struct DeterminingEquation {
    int sigma = 0;
    std::string monomial; // printed parametric-jet monomial it was split from
    Expr equation;
};

struct DeterminingSystem {
    std::vector<Expr> args;
    std::vector<Expr> unknowns; // L1(args), L2(args), ...
    std::vector<DeterminingEquation> equations;
};

/// E_{U^sigma}(sum_nu L_nu G^nu) split by monomials in the jets that are not
/// ansatz arguments. Parallel over sigma; ordering is fixed by (sigma, monomial).
DeterminingSystem determining_system(const PdeSystem& sys, const MultiplierAnsatz& a);
DeterminingSystem determining_system_serial(const PdeSystem& sys, const MultiplierAnsatz& a);

/// Multipliers containing arbitrary functions of coordinates, constrained by
/// linear PDEs over a frame.
struct MultiplierFamily {
    std::vector<Expr> components;
    std::vector<FunctionConstraint> constraints;
    /// Coordinate expressions (in system variables) substituted for the frame.
    std::vector<Expr> coordinates;

    std::vector<std::string> functions() const;
};

/// Substitutes the family into every determining equation (L_nu,K -> d^K Lambda_nu
/// with respect to the ansatz arguments) and reduces modulo the constraints.
std::vector<Expr> check_family(const DeterminingSystem& ds, const MultiplierFamily& fam);

struct VerifyReport {
    bool ok = true;
    std::vector<Expr> euler_residuals;             // per sigma, after constraint reduction
    std::vector<std::pair<std::string, Expr>> offending; // parametric monomial -> coefficient
    std::vector<Expr> fluxes;                      // when reconstructible
    bool fluxes_found = false;
    std::vector<bool> singular;                    // Lambda_nu vanishing on solutions
};

VerifyReport verify_multipliers(const PdeSystem& sys, const MultiplierFamily& fam);

class NotADivergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fluxes Y with sum_i D_i Y_i = e. Throws NotADivergence.
std::vector<Expr> reconstruct_fluxes(const Expr& e, const Declarations& d);

struct DivergenceResult {
    bool divergence = false;
    std::vector<Expr> fluxes;
    bool fluxes_found = false;
};

DivergenceResult is_divergence(const Expr& e, const Declarations& d);

/// Antiderivative of e with respect to an atom (symbol or jet). Handles
/// polynomial factors, 1/u and exp(a*u + b); throws NotADivergence otherwise.
Expr integrate(const Expr& e, const Expr& atom);

/// Result of the single-term elimination heuristic.
struct TrivialReduction {
    std::vector<std::vector<Expr>> remaining_args; // per unknown
    std::vector<bool> vanishes;                    // unknown forced to 0
    std::vector<Expr> residual;                    // equations left over
    bool solved() const { return residual.empty(); }
    std::string describe(std::size_t nu) const;
};

TrivialReduction reduce_trivial(const DeterminingSystem& ds);

/// Integrates first-order constraints f_xi + b(xi) c(eta) f_eta = 0 by
/// characteristics, rewrites the rest on the invariants and recomposes the family.
struct CharacteristicReduction {
    std::vector<Expr> invariants; // in the old frame symbols
    MultiplierFamily family;
};

CharacteristicReduction characteristic_reduce(const std::vector<Expr>& components_in_frame,
                                              const FunctionConstraint& constraint,
                                              const std::vector<Expr>& coordinates,
                                              const std::vector<std::string>& reduced_frame);

} // namespace conslin
