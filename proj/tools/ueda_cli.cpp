// Command-line front end; all logic lives in ueda/cli.hpp.
#include "CLI11.hpp"

#include "ueda/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ueda: Diophantine scans, majorant series, germ normalization"};
    app.require_subcommand(1);

    ueda::RunConfig cfg;
    auto add_common = [&](CLI::App* sub, bool needs_input) {
        auto* in = sub->add_option("--input", cfg.input_path, "input JSON file");
        if (needs_input) in->required();
        sub->add_option("--out", cfg.out_path, "output report path (JSON; CSV lands next to it)");
        sub->add_option("--mode", cfg.mode, "exact|float")->check(CLI::IsMember({"exact", "float"}));
        sub->add_option("--degree", cfg.N, "truncation degree N")
            ->each([&](const std::string&) { cfg.N_given = true; });
        sub->add_option("--scan-bound", cfg.scan_bound, "lattice scan bound");
        sub->add_option("--seed", cfg.seed, "random seed");
        sub->add_option("--threads", cfg.threads, "worker thread count");
    };

    add_common(app.add_subcommand("classify", "Diophantine classification of a bundle tuple"), true);
    add_common(app.add_subcommand("majorant", "majorant series, cross-check, diagonal bounds"), true);
    add_common(app.add_subcommand("normalize", "normalize a germ system from JSON"), true);
    auto* ex = app.add_subcommand("example", "generate a named example, then normalize");
    ex->add_option("name", cfg.example_name,
                   "deformation_trivial|projective_bundle|resonant_demo|random_diophantine")
        ->required();
    add_common(ex, false);
    add_common(app.add_subcommand("scan", "sweep a parameter grid, aggregate CSV"), true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();
    return ueda::run(cfg);
}
