#include "conslin/parse.hpp"

#include <algorithm>
#include <cctype>

namespace conslin {

int Declarations::dependent_index(const std::string& name) const
{
    auto it = std::find(dependents.begin(), dependents.end(), name);
    return it == dependents.end() ? -1 : static_cast<int>(it - dependents.begin());
}

Expr Declarations::dependent(int index, MultiIndex mi) const
{
    return Expr::jet(dependents.at(static_cast<std::size_t>(index)), index, std::move(mi));
}

std::vector<Expr> Declarations::independent_symbols() const
{
    std::vector<Expr> out;
    for (const auto& n : independents) out.push_back(independent(n));
    return out;
}

bool Declarations::declares(const std::string& name) const
{
    auto in = [&](const std::vector<std::string>& v) { return std::find(v.begin(), v.end(), name) != v.end(); };
    return in(independents) || in(dependents) || in(parameters) || in(coordinates) || in(functions);
}

namespace {

class Parser {
public:
    Parser(const std::string& text, const Declarations& d) : s_(text), d_(d) {}

    Expr run()
    {
        Expr e = expr();
        skip();
        if (p_ != s_.size()) fail("unexpected '" + std::string(1, s_[p_]) + "'");
        return e;
    }

private:
    const std::string& s_;
    const Declarations& d_;
    std::size_t p_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, p_); }

    void skip()
    {
        while (p_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[p_]))) ++p_;
    }

    bool eat(char c)
    {
        skip();
        if (p_ < s_.size() && s_[p_] == c) {
            ++p_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }

    Expr expr()
    {
        std::vector<Expr> terms{term()};
        for (;;) {
            if (eat('+')) terms.push_back(term());
            else if (eat('-')) terms.push_back(-term());
            else break;
        }
        return Expr::add(std::move(terms));
    }

    Expr term()
    {
        std::vector<Expr> factors{unary()};
        for (;;) {
            if (eat('*')) factors.push_back(unary());
            else if (eat('/')) {
                Expr d = unary();
                // a/b^n reads as a*b^-n so printed denominators re-parse unexpanded
                if (d.kind() == Kind::Pow && !d.is_canonical()) factors.push_back(Expr::pow(d.children()[0], -d.exponent()));
                else factors.push_back(Expr::pow(d, -1));
            }
            else break;
        }
        return Expr::mul(std::move(factors));
    }

    Expr unary()
    {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }

    Expr power()
    {
        Expr base = primary();
        if (eat('^')) {
            Expr ex = canonicalize(unary());
            if (ex.is_number() && ex.number().get_den() == 1 && ex.number().get_num().fits_slong_p())
                return Expr::pow(base, ex.number().get_num().get_si());
            return Expr::sympow(base, ex);
        }
        return base;
    }

    Expr number()
    {
        std::size_t start = p_;
        while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) ++p_;
        std::string digits = s_.substr(start, p_ - start);
        mpz_class den = 1;
        if (p_ < s_.size() && s_[p_] == '.') {
            ++p_;
            std::size_t fs = p_;
            while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) ++p_;
            std::string frac = s_.substr(fs, p_ - fs);
            digits += frac;
            for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        }
        if (digits.empty()) fail("malformed number");
        Rational q(mpz_class(digits), den);
        q.canonicalize();
        return Expr(q);
    }

    std::vector<Expr> arguments()
    {
        std::vector<Expr> args;
        if (eat(')')) return args;
        do {
            args.push_back(expr());
        } while (eat(','));
        expect(')');
        return args;
    }

    std::optional<MultiIndex> split_suffix(const std::string& suffix) const
    {
        // Greedy longest match of independent names.
        MultiIndex mi;
        std::size_t i = 0;
        while (i < suffix.size()) {
            std::size_t best = 0;
            const std::string* which = nullptr;
            for (const auto& v : d_.independents)
                if (v.size() > best && suffix.compare(i, v.size(), v) == 0) {
                    best = v.size();
                    which = &v;
                }
            if (!which) return std::nullopt;
            mi = raised(std::move(mi), *which);
            i += best;
        }
        return mi;
    }

    Expr identifier_atom(const std::string& id, std::size_t at)
    {
        auto in = [&](const std::vector<std::string>& v) { return std::find(v.begin(), v.end(), id) != v.end(); };
        if (in(d_.independents)) return Expr::symbol(id, SymbolKind::Independent);
        if (in(d_.parameters)) return Expr::symbol(id, SymbolKind::Parameter);
        if (in(d_.coordinates)) return Expr::symbol(id, SymbolKind::Coordinate);
        int k = d_.dependent_index(id);
        if (k >= 0) return d_.dependent(k);
        auto us = id.find('_');
        if (us != std::string::npos) {
            int dep = d_.dependent_index(id.substr(0, us));
            if (dep >= 0) {
                auto mi = split_suffix(id.substr(us + 1));
                if (!mi) {
                    p_ = at;
                    fail("unknown derivative suffix in '" + id + "'");
                }
                return d_.dependent(dep, std::move(*mi));
            }
        }
        throw UndeclaredIdentifier(id);
    }

    Expr call(const std::string& name, std::vector<int> positions, std::size_t at)
    {
        std::vector<Expr> args = arguments();
        if (positions.empty()) {
            auto need = [&](std::size_t n) {
                if (args.size() != n) {
                    p_ = at;
                    fail(name + " expects " + std::to_string(n) + " argument(s)");
                }
            };
            if (name == "exp") {
                need(1);
                return Expr::exp(args[0]);
            }
            if (name == "log") {
                need(1);
                return Expr::log(args[0]);
            }
            if (name == "pow") {
                need(2);
                return Expr::sympow(args[0], args[1]);
            }
        }
        if (!d_.allow_undeclared_functions &&
            std::find(d_.functions.begin(), d_.functions.end(), name) == d_.functions.end())
            throw UndeclaredIdentifier(name);
        std::vector<int> orders(args.size(), 0);
        for (int pos : positions) {
            if (pos < 1 || static_cast<std::size_t>(pos) > args.size()) {
                p_ = at;
                fail("derivative position out of range for '" + name + "'");
            }
            ++orders[static_cast<std::size_t>(pos - 1)];
        }
        return Expr::func(name, std::move(args), std::move(orders));
    }

    Expr primary()
    {
        skip();
        if (p_ >= s_.size()) fail("unexpected end of input");
        char c = s_[p_];
        if (c == '(') {
            ++p_;
            Expr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (!std::isalpha(static_cast<unsigned char>(c))) fail(std::string("unexpected '") + c + "'");
        std::size_t at = p_;
        std::size_t start = p_;
        while (p_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[p_])) || s_[p_] == '_')) ++p_;
        std::string id = s_.substr(start, p_ - start);
        std::vector<int> positions;
        if (!id.empty() && id.back() == '_' && p_ < s_.size() && s_[p_] == '{') {
            id.pop_back();
            ++p_;
            do {
                skip();
                std::size_t ds = p_;
                while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) ++p_;
                if (ds == p_) fail("expected derivative position");
                positions.push_back(std::stoi(s_.substr(ds, p_ - ds)));
            } while (eat(','));
            expect('}');
            skip();
            if (p_ >= s_.size() || s_[p_] != '(') fail("expected '(' after derivative positions");
        }
        skip();
        if (p_ < s_.size() && s_[p_] == '(') {
            ++p_;
            return call(id, std::move(positions), at);
        }
        return identifier_atom(id, at);
    }
};

} // namespace

Expr parse_raw(const std::string& text, const Declarations& decls) { return Parser(text, decls).run(); }

Expr parse(const std::string& text, const Declarations& decls) { return canonicalize(parse_raw(text, decls)); }

} // namespace conslin
