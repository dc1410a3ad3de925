#include "conslin/commands.hpp"

#include "conslin/probe.hpp"

#include <sstream>

namespace conslin {

const char* const kToolVersion = "conslin 0.1.0";

namespace {

Document ex(const Expr& e) { return to_string(e); }

Document exs(const std::vector<Expr>& v)
{
    Document a = Document::array();
    for (const auto& e : v) a.push_back(ex(e));
    return a;
}

Document matrix(const Matrix& m)
{
    Document a = Document::array();
    for (const auto& row : m) a.push_back(exs(row));
    return a;
}

bool all_zero(const std::vector<Expr>& v)
{
    for (const auto& e : v)
        if (!e.is_zero()) return false;
    return true;
}

Document strings(const std::vector<std::string>& v) { return Document(v); }

Document system_doc(const PdeSystem& s)
{
    Document d;
    d["independents"] = strings(s.decls.independents);
    d["dependents"] = strings(s.decls.dependents);
    d["equations"] = exs(s.equations);
    return d;
}

Document constraint_doc(const FunctionConstraint& c)
{
    Document d;
    d["functions"] = strings(c.functions);
    d["frame"] = strings(c.frame);
    d["equations"] = exs(c.equations);
    return d;
}

Document family_doc(const MultiplierFamily& f)
{
    Document d;
    d["components"] = exs(f.components);
    d["coordinates"] = exs(f.coordinates);
    Document cs = Document::array();
    for (const auto& c : f.constraints) cs.push_back(constraint_doc(c));
    d["constraints"] = cs;
    return d;
}

Document transformation_doc(const Transformation& tr)
{
    Document d;
    d["kind"] = tr.kind == TransformKind::Contact ? "contact" : "point";
    d["vars"] = strings(tr.target_vars);
    d["deps"] = strings(tr.target_deps);
    d["phi"] = exs(tr.phi);
    d["psi"] = exs(tr.psi);
    if (tr.kind == TransformKind::Contact) d["rho"] = exs(tr.rho);
    return d;
}

Document rationals(const std::vector<Rational>& v)
{
    Document a = Document::array();
    for (const auto& q : v) a.push_back(q.get_str());
    return a;
}

Document verify_doc(const VerifyReport& r)
{
    Document d;
    d["verified"] = r.ok;
    d["euler_residuals"] = exs(r.euler_residuals);
    Document off = Document::array();
    for (const auto& [m, c] : r.offending) off.push_back({{"monomial", m}, {"coefficient", ex(c)}});
    d["offending"] = off;
    std::vector<bool> sing = r.singular;
    d["singular"] = sing;
    if (r.fluxes_found) d["fluxes"] = exs(r.fluxes);
    return d;
}

// Q^T G - L~*[X] W evaluated at random points; the difference is left
// uncanonicalized so this is independent of the symbolic cancellation.
bool probe_identity(const LinearizationCandidate& cand, const PdeSystem& sys, const CommandOptions& opts)
{
    auto action = adjoint_action(cand, cand.W, sys.decls.independents);
    for (std::size_t mu = 0; mu < action.size(); ++mu) {
        Expr lhs;
        for (std::size_t nu = 0; nu < sys.size(); ++nu) lhs = lhs + cand.Q[nu][mu] * sys.equations[nu];
        if (!probe_is_zero(lhs - action[mu], opts.probe_points, opts.seed)) return false;
    }
    return true;
}

CommandResult finish(CommandResult r, const Workspace& ws, const std::string& command)
{
    Document out;
    out["command"] = command;
    out["status"] = r.exit_code == kOk ? "ok" : r.exit_code == kRejected ? "rejected" : "error";
    out["exit_code"] = r.exit_code;
    for (auto& [k, v] : r.doc.items()) out[k] = v;
    out["provenance"] = {{"tool", kToolVersion}, {"input_hash", ws.hash}};
    r.doc = std::move(out);
    return r;
}

CommandResult fail(CommandResult r, int code, const std::string& stage, const std::string& reason)
{
    r.exit_code = code;
    r.doc["stage"] = stage;
    r.doc["reason"] = reason;
    return r;
}

// Runs body, mapping the library's exceptions onto exit codes with a stage tag.
template <class F>
CommandResult guarded(const Workspace& ws, const std::string& command, std::string& stage, F body)
{
    CommandResult r;
    try {
        body(r);
    } catch (const Rejection& e) {
        r = fail(std::move(r), kRejected, stage, e.what());
    } catch (const ExtractionFailure& e) {
        r = fail(std::move(r), kRejected, stage, e.what());
    } catch (const SingularJacobian& e) {
        r = fail(std::move(r), kRejected, stage, e.what());
    } catch (const ContactViolation& e) {
        r = fail(std::move(r), kResidualFailure, stage, e.what());
    } catch (const WorkspaceError& e) {
        r = fail(std::move(r), kInputError, stage, e.what());
    } catch (const std::exception& e) {
        r = fail(std::move(r), kResidualFailure, stage, e.what());
    }
    return finish(std::move(r), ws, command);
}

MultiplierAnsatz effective_ansatz(const Workspace& ws, const CommandOptions& opts)
{
    MultiplierAnsatz a = ws.ansatz.value_or(MultiplierAnsatz{});
    if (opts.ansatz_order) a.order = *opts.ansatz_order;
    if (opts.preset) a.shape = *opts.preset;
    return a;
}

void check_candidate(CommandResult& r, std::string& stage, const Workspace& ws, LinearizationCandidate& cand,
                     const CommandOptions& opts)
{
    stage = "verification";
    auto rep = verify_linearization(ws.system, cand);
    Document v;
    v["identity_residuals"] = exs(rep.identity_residuals);
    v["probe_points"] = opts.probe_points;
    v["probe_zero"] = probe_identity(cand, ws.system, opts);
    v["mapping_checked"] = rep.mapping_checked;
    if (rep.mapping_checked) {
        v["mapping_equivalent"] = rep.mapping_ok;
        v["mapping_method"] = rep.mapping_method;
    }
    if (!rep.note.empty()) v["note"] = rep.note;
    v["ok"] = rep.ok && v["probe_zero"].get<bool>();
    r.doc["verification"] = v;
    if (!v["ok"].get<bool>()) {
        r.exit_code = kResidualFailure;
        r.doc["stage"] = stage;
        r.doc["reason"] = "linearization identity or mapping check failed";
    }
}

} // namespace

CommandResult cmd_detsys(const Workspace& ws, const CommandOptions& opts)
{
    std::string stage = "ansatz";
    return guarded(ws, "detsys", stage, [&](CommandResult& r) {
        if (!ws.ansatz && !opts.ansatz_order && !opts.preset) throw WorkspaceError("detsys needs [ansatz] or --ansatz-order");
        MultiplierAnsatz a = effective_ansatz(ws, opts);
        stage = "determining_system";
        auto ds = determining_system(ws.system, a);
        r.doc["ansatz"] = {{"shape", shape_name(a.shape)}, {"order", a.order}, {"args", exs(ds.args)}};
        Document eqs = Document::array();
        for (const auto& e : ds.equations)
            eqs.push_back({{"sigma", e.sigma + 1}, {"monomial", e.monomial}, {"equation", ex(e.equation)}});
        r.doc["determining_system"] = {{"unknowns", exs(ds.unknowns)}, {"equations", eqs}};

        stage = "reduction";
        auto tr = reduce_trivial(ds);
        if (tr.solved()) {
            std::vector<std::string> desc;
            for (std::size_t nu = 0; nu < ds.unknowns.size(); ++nu) desc.push_back(tr.describe(nu));
            r.doc["family"] = {{"solved", true}, {"description", desc}};
            return;
        }
        if (!ws.multipliers) {
            r.doc["family"] = {{"solved", false}, {"residual_system", exs(tr.residual)}};
            return;
        }
        stage = "family_check";
        const auto& ms = *ws.multipliers;
        const MultiplierFamily& given = ms.raw ? *ms.raw : ms.family;
        auto res = check_family(ds, given);
        Document fc;
        fc["family"] = family_doc(given);
        fc["residuals"] = exs(res);
        fc["ok"] = all_zero(res);
        if (ms.raw) {
            auto rres = check_family(ds, ms.family);
            fc["characteristic_reduction"] = {{"invariants", exs(ms.invariants)},
                                              {"family", family_doc(ms.family)},
                                              {"residuals", exs(rres)}};
            fc["ok"] = fc["ok"].get<bool>() && all_zero(rres);
        }
        r.doc["family"] = {{"solved", false}, {"check", fc}};
        if (!fc["ok"].get<bool>()) {
            r.exit_code = kResidualFailure;
            r.doc["stage"] = stage;
            r.doc["reason"] = "supplied family does not solve the determining system";
        }
    });
}

CommandResult cmd_linearize(const Workspace& ws, const CommandOptions& opts)
{
    std::string stage = "input";
    return guarded(ws, "linearize", stage, [&](CommandResult& r) {
        if (!ws.multipliers || !ws.adjoint) throw WorkspaceError("linearize needs [multipliers] and [adjoint]");
        const auto& fam = ws.multipliers->family;
        AnsatzShape shape = effective_ansatz(ws, opts).shape;

        stage = "multipliers";
        auto vr = verify_multipliers(ws.system, fam);
        Document md = verify_doc(vr);
        md["family"] = family_doc(fam);
        if (ws.multipliers->raw) md["invariants"] = exs(ws.multipliers->invariants);
        r.doc["multipliers"] = md;
        if (!vr.ok) {
            r = fail(std::move(r), kResidualFailure, stage, "multipliers do not verify");
            return;
        }

        stage = "match";
        auto cand = match_multiplier_form(ws.system, fam, *ws.adjoint, shape);
        r.doc["match"] = {{"X", exs(cand.X)}, {"J", ex(cand.J)}, {"Q", matrix(cand.Q)}, {"contact", cand.contact}};

        stage = "identity";
        augmented_identity(cand, ws.system);
        Expr residual = augmented_residual(cand, ws.system);
        auto euler = euler_extraction_residuals(cand, ws.system);
        r.doc["identity"] = {{"W", exs(cand.W)},
                             {"w_scale", rationals(cand.w_scale)},
                             {"fluxes", exs(cand.fluxes)},
                             {"residual", ex(residual)},
                             {"euler_extraction_residuals", exs(euler)}};
        if (!residual.is_zero() || !all_zero(euler)) {
            r = fail(std::move(r), kResidualFailure, stage, "augmented identity does not hold");
            return;
        }

        stage = "mapping";
        auto tr = build_mapping(cand, ws.system);
        r.doc["transformation"] = transformation_doc(tr);
        r.doc["target_system"] = system_doc(target_system(cand, ws.system));

        check_candidate(r, stage, ws, cand, opts);
    });
}

CommandResult cmd_verify(const Workspace& ws, const CommandOptions& opts)
{
    std::string stage = "input";
    return guarded(ws, "verify", stage, [&](CommandResult& r) {
        bool any = false;
        auto worst = [&](int code, const std::string& reason) {
            if (code > r.exit_code) {
                r.exit_code = code;
                r.doc["stage"] = stage;
                r.doc["reason"] = reason;
            }
        };
        if (ws.multipliers) {
            any = true;
            stage = "multipliers";
            auto vr = verify_multipliers(ws.system, ws.multipliers->family);
            Document md = verify_doc(vr);
            if (ws.multipliers->raw) {
                auto raw = verify_multipliers(ws.system, *ws.multipliers->raw);
                md["unreduced"] = verify_doc(raw);
                vr.ok = vr.ok && raw.ok;
            }
            r.doc["multipliers"] = md;
            if (!vr.ok) worst(kResidualFailure, "multipliers do not verify");
        }
        if (!ws.w.empty()) {
            any = true;
            stage = "W";
            if (!ws.multipliers || !ws.adjoint) throw WorkspaceError("[W] needs [multipliers] and [adjoint]");
            auto cand = match_multiplier_form(ws.system, ws.multipliers->family, *ws.adjoint,
                                              effective_ansatz(ws, opts).shape);
            if (ws.w.size() != static_cast<std::size_t>(cand.ltilde.rows))
                throw WorkspaceError("[W] needs " + std::to_string(cand.ltilde.rows) + " components");
            cand.W = ws.w;
            normalize_w(cand);
            CommandResult sub;
            check_candidate(sub, stage, ws, cand, opts);
            r.doc["W"] = sub.doc["verification"];
            if (sub.exit_code != kOk) worst(sub.exit_code, "W does not satisfy the linearization identity");
        }
        if (ws.transformation) {
            any = true;
            stage = "transformation";
            const auto& tr = *ws.transformation;
            Document td = transformation_doc(tr);
            bool contact_ok = tr.kind != TransformKind::Contact || check_contact_condition(tr);
            if (tr.kind == TransformKind::Contact) td["contact_condition"] = contact_ok;
            r.doc["transformation"] = td;
            if (!contact_ok) {
                worst(kResidualFailure, "contact condition violated");
            } else if (ws.target) {
                stage = "target";
                auto out = apply_transformation(ws.system, tr);
                auto eq = equivalent_systems(out.system, *ws.target);
                r.doc["transformed_system"] = system_doc(out.system);
                r.doc["target"] = {{"equivalent", eq.equivalent}, {"method", eq.method}};
                if (!eq.equivalent) worst(kResidualFailure, "transformed system differs from [target]");
            }
        }
        if (ws.symmetry) {
            any = true;
            stage = "symmetry";
            auto sr = verify_point_symmetry(ws.system, *ws.symmetry);
            r.doc["symmetry"] = {{"verified", sr.ok}, {"residuals", exs(sr.residuals)}};
            if (!sr.ok) worst(kResidualFailure, "generator is not a symmetry");
        }
        if (!any) throw WorkspaceError("verify needs [multipliers], [W], [transformation] or [symmetry]");
    });
}

CommandResult run_command(const std::string& command, const std::string& path, const CommandOptions& opts)
{
    Workspace ws;
    try {
        ws = load_workspace(path);
    } catch (const std::exception& e) {
        CommandResult r;
        r = fail(std::move(r), kInputError, "parse", e.what());
        return finish(std::move(r), ws, command);
    }
    if (command == "detsys") return cmd_detsys(ws, opts);
    if (command == "linearize") return cmd_linearize(ws, opts);
    if (command == "verify") return cmd_verify(ws, opts);
    CommandResult r;
    r = fail(std::move(r), kInputError, "input", "unknown command '" + command + "'");
    return finish(std::move(r), ws, command);
}

namespace {

void render(const Document& d, int indent, std::ostringstream& out)
{
    std::string pad(static_cast<std::size_t>(indent), ' ');
    auto scalar = [](const Document& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    if (d.is_object()) {
        for (const auto& [k, v] : d.items()) {
            if (v.is_structured() && !v.empty()) {
                out << pad << k << ":\n";
                render(v, indent + 2, out);
            } else {
                out << pad << k << ": " << (v.is_structured() ? (v.is_array() ? "[]" : "{}") : scalar(v)) << "\n";
            }
        }
    } else if (d.is_array()) {
        for (const auto& v : d) {
            if (v.is_structured() && !v.empty()) {
                out << pad << "-\n";
                render(v, indent + 2, out);
            } else {
                out << pad << "- " << (v.is_structured() ? (v.is_array() ? "[]" : "{}") : scalar(v)) << "\n";
            }
        }
    } else {
        out << pad << scalar(d) << "\n";
    }
}

} // namespace

std::string render_text(const Document& doc)
{
    std::ostringstream out;
    render(doc, 0, out);
    return out.str();
}

} // namespace conslin
