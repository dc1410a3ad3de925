#include "conslin/commands.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    using namespace conslin;
    CLI::App app{"Linearization of PDE systems through conservation-law multipliers"};
    app.require_subcommand(1);

    std::string file;
    std::optional<int> order;
    std::string preset;
    bool json = false;
    std::size_t max_terms_flag = 0;
    std::uint64_t seed = 1;

    for (const char* name : {"detsys", "linearize", "verify"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("file", file, "workspace file")->required();
        sub->add_option("--ansatz-order", order, "multiplier ansatz order");
        sub->add_option("--preset", preset, "ansatz shape")
            ->check(CLI::IsMember({"general", "fixed-independents", "integrating-factor"}));
        sub->add_flag("--json", json, "emit JSON instead of indented text");
        sub->add_option("--max-terms", max_terms_flag, "abort when an expression exceeds N terms");
        sub->add_option("--seed", seed, "seed for numeric probe points");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }

    CommandOptions opts;
    opts.ansatz_order = order;
    if (!preset.empty()) opts.preset = parse_shape(preset);
    opts.seed = seed;
    if (max_terms_flag) set_max_terms(max_terms_flag);

    auto r = run_command(app.get_subcommands().front()->get_name(), file, opts);
    std::cout << (json ? r.doc.dump(2) + "\n" : render_text(r.doc));
    return r.exit_code;
}
