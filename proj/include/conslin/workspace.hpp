#pragma once

#include "conslin/conslaw.hpp"
#include "conslin/linearize.hpp"

#include <optional>
#include <string>
#include <vector>

namespace conslin {

/// Malformed workspace: bad section, unknown or duplicate key, missing field,
/// or an expression that does not parse. Carries the 1-based line when known.
class WorkspaceError : public std::runtime_error {
public:
    WorkspaceError(const std::string& msg, int line = 0);
    int line;
};

struct MultiplierSection {
    MultiplierFamily family;
    // Set when the family was given in a frame and reduced by characteristics.
    std::optional<MultiplierFamily> raw;
    std::vector<Expr> invariants;
};

struct Workspace {
    Declarations decls;
    PdeSystem system;
    std::optional<MultiplierAnsatz> ansatz;
    std::optional<MultiplierSection> multipliers;
    std::optional<AdjointSystem> adjoint;
    std::vector<Expr> w; // [W]: candidate W to verify
    std::optional<Transformation> transformation;
    std::optional<PdeSystem> target;
    std::optional<SymmetryGenerator> symmetry;
    std::string hash; // of the raw text
};

Workspace parse_workspace(const std::string& text);
Workspace load_workspace(const std::string& path);

std::vector<std::string> split_list(const std::string& s);

} // namespace conslin
