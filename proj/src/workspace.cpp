#include "conslin/workspace.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace conslin {

WorkspaceError::WorkspaceError(const std::string& msg, int line_)
    : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg), line(line_)
{
}

namespace {

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Entry {
    std::string key;
    std::string value;
    int line;
};

struct Section {
    int line = 0;
    std::vector<Entry> entries;

    const Entry* find(const std::string& k) const
    {
        for (const auto& e : entries)
            if (e.key == k) return &e;
        return nullptr;
    }
};

const std::set<std::string> kSections = {"vars",   "system",         "leading", "ansatz",   "multipliers",
                                         "adjoint", "W", "transformation", "target", "symmetry"};

std::map<std::string, Section> read_sections(const std::string& text)
{
    std::map<std::string, Section> out;
    Section* cur = nullptr;
    std::istringstream in(text);
    std::string raw;
    int ln = 0;
    while (std::getline(in, raw)) {
        ++ln;
        std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw WorkspaceError("malformed section header", ln);
            std::string name = trim(line.substr(1, line.size() - 2));
            if (!kSections.count(name)) throw WorkspaceError("unknown section [" + name + "]", ln);
            if (out.count(name)) throw WorkspaceError("duplicate section [" + name + "]", ln);
            cur = &out[name];
            cur->line = ln;
            continue;
        }
        if (!cur) throw WorkspaceError("key outside of any section", ln);
        auto eq = line.find('=');
        if (eq == std::string::npos) throw WorkspaceError("expected 'key = value'", ln);
        Entry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), ln};
        if (e.key.empty()) throw WorkspaceError("empty key", ln);
        if (cur->find(e.key)) throw WorkspaceError("duplicate key '" + e.key + "'", ln);
        cur->entries.push_back(std::move(e));
    }
    return out;
}

Expr parse_at(const Entry& e, const Declarations& d)
{
    try {
        return parse(e.value, d);
    } catch (const std::exception& ex) {
        throw WorkspaceError(e.key + ": " + ex.what(), e.line);
    }
}

[[noreturn]] void unknown(const Entry& e, const std::string& section)
{
    throw WorkspaceError("unknown key '" + e.key + "' in [" + section + "]", e.line);
}

const Entry& require(const Section& s, const std::string& key, const std::string& section)
{
    const Entry* e = s.find(key);
    if (!e) throw WorkspaceError("[" + section + "] needs '" + key + "'", s.line);
    return *e;
}

// "constraint" or "constraint<k>".
bool is_indexed(const std::string& key, const std::string& stem)
{
    if (key.rfind(stem, 0) != 0) return false;
    std::string rest = key.substr(stem.size());
    return std::all_of(rest.begin(), rest.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

std::string fnv1a(const std::string& s)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void add_functions(Declarations& d, const std::vector<std::string>& fns)
{
    for (const auto& f : fns)
        if (std::find(d.functions.begin(), d.functions.end(), f) == d.functions.end()) d.functions.push_back(f);
}

FunctionConstraint constraint_from(const Section& s, const std::string& section, const std::vector<std::string>& fns,
                                   const std::vector<std::string>& frame, const Declarations& base)
{
    FunctionConstraint c;
    c.functions = fns;
    c.frame = frame;
    Declarations fd = c.frame_decls(base);
    for (const auto& e : s.entries)
        if (is_indexed(e.key, "constraint")) c.equations.push_back(parse_at(e, fd));
    if (c.equations.empty()) throw WorkspaceError("[" + section + "] needs at least one constraint", s.line);
    return c;
}

int parse_int(const Entry& e)
{
    try {
        std::size_t pos = 0;
        int v = std::stoi(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw WorkspaceError(e.key + ": expected an integer", e.line);
    }
}

} // namespace

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

Workspace parse_workspace(const std::string& text)
{
    auto secs = read_sections(text);
    Workspace ws;
    ws.hash = fnv1a(text);

    if (!secs.count("vars")) throw WorkspaceError("missing [vars]");
    const Section& vars = secs["vars"];
    for (const auto& e : vars.entries) {
        if (e.key == "independents") ws.decls.independents = split_list(e.value);
        else if (e.key == "dependents") ws.decls.dependents = split_list(e.value);
        else if (e.key == "parameters") ws.decls.parameters = split_list(e.value);
        else if (e.key == "functions") ws.decls.functions = split_list(e.value);
        else unknown(e, "vars");
    }
    if (ws.decls.independents.empty() || ws.decls.dependents.empty())
        throw WorkspaceError("[vars] needs independents and dependents", vars.line);
    for (const char* s : {"multipliers", "symmetry"})
        if (secs.count(s))
            if (const Entry* f = secs[s].find("functions")) add_functions(ws.decls, split_list(f->value));

    if (!secs.count("system")) throw WorkspaceError("missing [system]");
    ws.system.decls = ws.decls;
    for (const auto& e : secs["system"].entries) {
        ws.system.names.push_back(e.key);
        ws.system.equations.push_back(parse_at(e, ws.decls));
    }
    if (ws.system.equations.empty()) throw WorkspaceError("[system] is empty", secs["system"].line);

    if (secs.count("leading")) {
        ws.system.overrides.assign(ws.system.size(), std::nullopt);
        for (const auto& e : secs["leading"].entries) {
            auto it = std::find(ws.system.names.begin(), ws.system.names.end(), e.key);
            if (it == ws.system.names.end()) unknown(e, "leading");
            auto i = static_cast<std::size_t>(it - ws.system.names.begin());
            try {
                ws.system.overrides[i] = solve_for(ws.system.equations[i], parse_at(e, ws.decls));
            } catch (const NotSolvable& ex) {
                throw WorkspaceError(e.key + ": " + ex.what(), e.line);
            }
        }
    }

    if (secs.count("ansatz")) {
        MultiplierAnsatz a;
        for (const auto& e : secs["ansatz"].entries) {
            if (e.key == "order") a.order = parse_int(e);
            else if (e.key == "shape") {
                try {
                    a.shape = parse_shape(e.value);
                } catch (const std::exception& ex) {
                    throw WorkspaceError(ex.what(), e.line);
                }
            } else if (e.key == "args") {
                for (const auto& s : split_list(e.value)) a.args.push_back(parse_at(Entry{e.key, s, e.line}, ws.decls));
            } else unknown(e, "ansatz");
        }
        ws.ansatz = a;
    }

    if (secs.count("multipliers")) {
        const Section& s = secs["multipliers"];
        auto fns = split_list(require(s, "functions", "multipliers").value);
        auto frame = split_list(require(s, "frame", "multipliers").value);
        std::vector<Expr> coords;
        for (const auto& c : split_list(require(s, "coordinates", "multipliers").value))
            coords.push_back(parse_at(Entry{"coordinates", c, s.find("coordinates")->line}, ws.decls));
        if (coords.size() != frame.size())
            throw WorkspaceError("coordinates and frame differ in length", s.find("coordinates")->line);
        const Entry* reduce = nullptr;
        std::vector<const Entry*> comps;
        for (const auto& e : s.entries) {
            if (e.key == "functions" || e.key == "frame" || e.key == "coordinates" || is_indexed(e.key, "constraint")) continue;
            if (e.key == "reduce") reduce = &e;
            else if (e.key == "L" + std::to_string(comps.size() + 1)) comps.push_back(&e);
            else unknown(e, "multipliers");
        }
        if (comps.size() != ws.system.size())
            throw WorkspaceError("[multipliers] needs L1..L" + std::to_string(ws.system.size()), s.line);
        FunctionConstraint c = constraint_from(s, "multipliers", fns, frame, ws.decls);
        MultiplierSection ms;
        if (reduce) {
            Declarations fd = c.frame_decls(ws.decls);
            std::vector<Expr> in_frame;
            MultiplierFamily raw;
            for (const auto* e : comps) {
                in_frame.push_back(parse_at(*e, fd));
                raw.components.push_back(from_frame(in_frame.back(), fns, frame, coords));
            }
            raw.constraints = {c};
            raw.coordinates = coords;
            try {
                auto red = characteristic_reduce(in_frame, c, coords, split_list(reduce->value));
                ms.family = red.family;
                ms.invariants = red.invariants;
            } catch (const std::exception& ex) {
                throw WorkspaceError(std::string("characteristic reduction failed: ") + ex.what(), reduce->line);
            }
            ms.raw = raw;
        } else {
            for (const auto* e : comps) ms.family.components.push_back(parse_at(*e, ws.decls));
            ms.family.constraints = {c};
            ms.family.coordinates = coords;
        }
        ws.multipliers = ms;
    }

    if (secs.count("adjoint")) {
        const Section& s = secs["adjoint"];
        if (!ws.multipliers) throw WorkspaceError("[adjoint] needs [multipliers]", s.line);
        const auto& c = ws.multipliers->family.constraints.front();
        AdjointSystem adj;
        adj.frame = c.frame;
        Declarations fd = c.frame_decls(ws.decls);
        std::vector<const Entry*> rows;
        for (const auto& e : s.entries) {
            if (e.key == "eq" + std::to_string(rows.size() + 1)) {
                rows.push_back(&e);
            } else if (is_indexed(e.key, "eq")) {
                unknown(e, "adjoint");
            } else {
                adj.names.push_back(e.key);
                adj.definitions.push_back(parse_at(e, fd));
            }
        }
        if (adj.names.empty() || rows.empty()) throw WorkspaceError("[adjoint] needs v definitions and eq1..", s.line);
        Declarations vd;
        vd.independents = adj.frame;
        vd.dependents = adj.names;
        vd.parameters = ws.decls.parameters;
        std::vector<Expr> eqs;
        for (const auto* e : rows) eqs.push_back(parse_at(*e, vd));
        try {
            adj.op = operator_from_equations(eqs, adj.frame, static_cast<int>(adj.names.size()));
        } catch (const std::exception& ex) {
            throw WorkspaceError(std::string("[adjoint] ") + ex.what(), s.line);
        }
        ws.adjoint = adj;
    }

    if (secs.count("W")) {
        for (const auto& e : secs["W"].entries) {
            if (e.key != "W" + std::to_string(ws.w.size() + 1)) unknown(e, "W");
            ws.w.push_back(parse_at(e, ws.decls));
        }
    }

    if (secs.count("transformation")) {
        const Section& s = secs["transformation"];
        Transformation tr;
        tr.source = ws.decls;
        tr.target_vars = split_list(require(s, "vars", "transformation").value);
        tr.target_deps = split_list(require(s, "deps", "transformation").value);
        std::map<std::string, Expr> given;
        for (const auto& e : s.entries) {
            if (e.key == "vars" || e.key == "deps") continue;
            if (e.key == "kind") {
                if (e.value == "point") tr.kind = TransformKind::Point;
                else if (e.value == "contact") tr.kind = TransformKind::Contact;
                else throw WorkspaceError("kind must be point or contact", e.line);
                continue;
            }
            bool known = std::count(tr.target_vars.begin(), tr.target_vars.end(), e.key) ||
                         std::count(tr.target_deps.begin(), tr.target_deps.end(), e.key);
            if (e.key.rfind("rho_", 0) == 0)
                known = std::count(tr.target_vars.begin(), tr.target_vars.end(), e.key.substr(4)) > 0;
            if (!known) unknown(e, "transformation");
            given[e.key] = parse_at(e, ws.decls);
        }
        auto take = [&](const std::string& k) {
            auto it = given.find(k);
            if (it == given.end()) throw WorkspaceError("[transformation] needs '" + k + "'", s.line);
            return it->second;
        };
        for (const auto& v : tr.target_vars) tr.phi.push_back(take(v));
        for (const auto& w : tr.target_deps) tr.psi.push_back(take(w));
        if (tr.kind == TransformKind::Contact)
            for (const auto& v : tr.target_vars) tr.rho.push_back(take("rho_" + v));
        ws.transformation = tr;
    }

    if (secs.count("target")) {
        const Section& s = secs["target"];
        if (!ws.transformation) throw WorkspaceError("[target] needs [transformation]", s.line);
        PdeSystem t;
        t.decls = ws.transformation->target_decls();
        for (const auto& e : s.entries) {
            t.names.push_back(e.key);
            t.equations.push_back(parse_at(e, t.decls));
        }
        ws.target = t;
    }

    if (secs.count("symmetry")) {
        const Section& s = secs["symmetry"];
        SymmetryGenerator g;
        g.xi.assign(ws.decls.independents.size(), Expr(0));
        g.eta.assign(ws.decls.dependents.size(), Expr(0));
        const Entry* fns = s.find("functions");
        for (const auto& e : s.entries) {
            if (e.key == "functions" || e.key == "frame" || is_indexed(e.key, "constraint")) continue;
            auto slot = [&](const std::string& stem, const std::vector<std::string>& names, std::vector<Expr>& dst) {
                if (e.key.rfind(stem, 0) != 0) return false;
                auto it = std::find(names.begin(), names.end(), e.key.substr(stem.size()));
                if (it == names.end()) return false;
                dst[static_cast<std::size_t>(it - names.begin())] = parse_at(e, ws.decls);
                return true;
            };
            if (!slot("xi_", ws.decls.independents, g.xi) && !slot("eta_", ws.decls.dependents, g.eta)) unknown(e, "symmetry");
        }
        if (fns)
            g.constraints = {constraint_from(s, "symmetry", split_list(fns->value),
                                             split_list(require(s, "frame", "symmetry").value), ws.decls)};
        ws.symmetry = g;
    }
    return ws;
}

Workspace load_workspace(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw WorkspaceError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_workspace(buf.str());
}

} // namespace conslin
