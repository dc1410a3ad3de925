#pragma once

#include "conslin/expr.hpp"

#include <string>
#include <vector>

namespace conslin {

/// Names known to the parser. Dependent i (0-based) parses as jet index i.
struct Declarations {
    std::vector<std::string> independents;
    std::vector<std::string> dependents;
    std::vector<std::string> parameters;
    std::vector<std::string> coordinates;
    std::vector<std::string> functions;
    bool allow_undeclared_functions = false;

    Expr independent(const std::string& name) const { return Expr::symbol(name, SymbolKind::Independent); }
    int dependent_index(const std::string& name) const;
    Expr dependent(int index, MultiIndex mi = {}) const;
    std::vector<Expr> independent_symbols() const;
    bool declares(const std::string& name) const;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)), position(pos)
    {
    }
    std::size_t position;
};

class UndeclaredIdentifier : public std::runtime_error {
public:
    explicit UndeclaredIdentifier(const std::string& name)
        : std::runtime_error("undeclared identifier '" + name + "'"), identifier(name)
    {
    }
    std::string identifier;
};

/// Parses and canonicalizes.
Expr parse(const std::string& text, const Declarations& decls);
/// Parses without canonicalizing (keeps the raw tree).
Expr parse_raw(const std::string& text, const Declarations& decls);

} // namespace conslin
