#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "conslin/commands.hpp"

using namespace conslin;

namespace {

std::string path(const std::string& rel) { return std::string(CONSLIN_SOURCE_DIR) + "/" + rel; }

CommandResult run(const std::string& cmd, const std::string& rel) { return run_command(cmd, path(rel), {}); }

std::vector<std::string> strs(const Document& a)
{
    std::vector<std::string> out;
    for (const auto& v : a) out.push_back(v.get<std::string>());
    return out;
}

// Printed expressions parse back to the same expression.
void check_reparse(const Document& a, const Declarations& d)
{
    for (const auto& s : strs(a)) {
        Expr e = parse(s, d);
        CHECK(to_string(e) == s);
    }
}

} // namespace

TEST_CASE("workspace parsing")
{
    auto ws = load_workspace(path("corpus/burgers.ws"));
    CHECK(ws.system.size() == 2);
    CHECK(ws.system.names == std::vector<std::string>{"G1", "G2"});
    REQUIRE(ws.multipliers);
    CHECK(ws.multipliers->family.components.size() == 2);
    REQUIRE(ws.adjoint);
    CHECK(ws.adjoint->names == std::vector<std::string>{"v1", "v2"});

    CHECK_THROWS_AS(parse_workspace("[vars]\nindependents = x\ndependents = U\n[system]\nG = U_x\n[bogus]\n"),
                    WorkspaceError);
    CHECK_THROWS_AS(parse_workspace("[vars]\nindependents = x\ndependents = U\n[system]\nG = U_x\nG = U\n"),
                    WorkspaceError);
    CHECK_THROWS_AS(parse_workspace("[vars]\nindependents = x\ndependents = U\n[system]\nG = V_x\n"), WorkspaceError);
    CHECK_THROWS_AS(parse_workspace("[vars]\nindependents = x\ndependents = U\n"), WorkspaceError);
    try {
        parse_workspace("[vars]\nindependents = x\ndependents = U\nfoo = 1\n[system]\nG = U_x\n");
        FAIL("expected an error");
    } catch (const WorkspaceError& e) {
        CHECK(e.line == 4);
    }

    auto lead = parse_workspace("[vars]\nindependents = x, t\ndependents = U\n[system]\nG = U_t - U_xx\n"
                                "[leading]\nG = U_t\n");
    REQUIRE(lead.system.overrides.size() == 1);
    CHECK(lead.system.overrides[0]->jet == parse("U_t", lead.decls));
}

TEST_CASE("corpus gate")
{
    for (const char* f : {"corpus/burgers.ws", "corpus/pipeline.ws", "corpus/telegraph.ws"}) {
        CAPTURE(f);
        auto r = run("linearize", f);
        CHECK(r.exit_code == kOk);
        CHECK(r.doc["status"] == "ok");
        CHECK(r.doc["identity"]["residual"] == "0");
        CHECK(r.doc["verification"]["ok"] == true);
        CHECK(r.doc["verification"]["probe_zero"] == true);
        CHECK(r.doc["verification"]["mapping_equivalent"] == true);
    }
}

TEST_CASE("burgers document")
{
    auto r = run("linearize", "corpus/burgers.ws");
    auto ws = load_workspace(path("corpus/burgers.ws"));
    CHECK(strs(r.doc["identity"]["W"]) == std::vector<std::string>{"2*U1*exp(-U2/4)", "4*exp(-U2/4)"});
    CHECK(r.doc["match"]["J"] == "1");
    check_reparse(r.doc["identity"]["W"], ws.decls);
    check_reparse(r.doc["transformation"]["psi"], ws.decls);
    Declarations fd = ws.decls;
    fd.allow_undeclared_functions = true;
    check_reparse(r.doc["identity"]["fluxes"], fd);

    Declarations td;
    td.independents = strs(r.doc["target_system"]["independents"]);
    td.dependents = strs(r.doc["target_system"]["dependents"]);
    check_reparse(r.doc["target_system"]["equations"], td);

    // Determinism of both renderings.
    auto again = run("linearize", "corpus/burgers.ws");
    CHECK(again.doc.dump() == r.doc.dump());
    CHECK(render_text(again.doc) == render_text(r.doc));
}

TEST_CASE("pipeline document")
{
    auto r = run("linearize", "corpus/pipeline.ws");
    auto ws = load_workspace(path("corpus/pipeline.ws"));
    CHECK(r.doc["match"]["J"] == "U_xx");
    CHECK(r.doc["match"]["contact"] == true);
    CHECK(r.doc["transformation"]["kind"] == "contact");
    CHECK(parse(r.doc["identity"]["W"][0].get<std::string>(), ws.decls) == parse("x*U_x - U", ws.decls));
    CHECK(strs(r.doc["transformation"]["rho"]) == std::vector<std::string>{"x", "-U_t"});
}

TEST_CASE("telegraph document")
{
    auto r = run("linearize", "corpus/telegraph.ws");
    auto ws = load_workspace(path("corpus/telegraph.ws"));
    CHECK(strs(r.doc["multipliers"]["invariants"]) == std::vector<std::string>{"x - U2", "-log(U1) + t"});
    Expr j = parse(r.doc["match"]["J"].get<std::string>(), ws.decls);
    CHECK(canonicalize(j - parse("1/U1*((1 - U2_x)*(U1 - U1_t) - U2_t*U1_x)", ws.decls)).is_zero());

    auto d = run("detsys", "corpus/telegraph.ws");
    CHECK(d.exit_code == kOk);
    CHECK(d.doc["family"]["check"]["ok"] == true);
}

TEST_CASE("detsys")
{
    auto t = run("detsys", "tests/data/trivial.ws");
    CHECK(t.exit_code == kOk);
    CHECK(t.doc["family"]["solved"] == true);
    CHECK(t.doc["family"]["description"][0] == "L1 constant");

    auto b = run("detsys", "corpus/burgers.ws");
    CHECK(b.exit_code == kOk);
    CHECK(b.doc["family"]["check"]["ok"] == true);
    CHECK(!b.doc["determining_system"]["equations"].empty());

    CommandOptions o;
    o.ansatz_order = 0;
    auto p = run_command("detsys", path("corpus/pipeline.ws"), o);
    // Order 0 cannot hold v(U_x, t).
    CHECK(p.exit_code != kOk);
}

TEST_CASE("verify and negative controls")
{
    CHECK(run("verify", "tests/data/burgers_w.ws").exit_code == kOk);
    CHECK(run("verify", "tests/data/burgers_map.ws").exit_code == kOk);
    CHECK(run("verify", "tests/data/pipeline_contact.ws").exit_code == kOk);
    CHECK(run("verify", "tests/data/telegraph_map.ws").exit_code == kOk);
    CHECK(run("verify", "corpus/telegraph.ws").exit_code == kOk);

    auto bw = run("verify", "tests/data/burgers_bad_w.ws");
    CHECK(bw.exit_code == kResidualFailure);
    CHECK(bw.doc["status"] == "error");
    CHECK(bw.doc["W"]["ok"] == false);
    CHECK(run("verify", "tests/data/pipeline_bad_rho.ws").exit_code == kResidualFailure);
    CHECK(run("verify", "tests/data/burgers_bad_symmetry.ws").exit_code == kResidualFailure);

    auto toy = run("linearize", "tests/data/toy_family.ws");
    CHECK(toy.exit_code == kRejected);
    CHECK(toy.doc["status"] == "rejected");
    CHECK(toy.doc["stage"] == "match");

    CHECK(run("verify", "tests/data/bad_key.ws").exit_code == kInputError);
    CHECK(run("linearize", "tests/data/missing.ws").exit_code == kInputError);
    CHECK(run("frobnicate", "corpus/burgers.ws").exit_code == kInputError);
}
