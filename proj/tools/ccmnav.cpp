// ccmnav: plan, execute and compare cooperative vs noncooperative navigation
// in pedestrian scenes via compact cognitive maps.
#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "ccm/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"compact cognitive map navigation"};
    app.require_subcommand(1);

    ccm::RunConfig cfg;
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool no_timestamp = false;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", cfg.scenario_path, "scenario file");
        sub->add_option("--template", cfg.template_name,
                        "scenario family: static_demo, dynamic_demo, head_on, "
                        "cluttered_flow, dense_group, line_up");
        sub->add_option("--mode", cfg.mode, "avus, cous or both")->capture_default_str();
        sub->add_option("--runs", cfg.runs, "ensemble size")->capture_default_str();
        sub->add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", seed, "base seed")->each([&](const std::string&) {
            seed_given = true;
        });
        sub->add_option("--set", sets, "parameter override key=value (repeatable)");
        sub->add_flag("--no-timestamp", no_timestamp, "omit timestamp header lines");
    };

    CLI::App* plan = app.add_subcommand("plan", "build maps and trace paths");
    CLI::App* simulate = app.add_subcommand("simulate", "plan and execute one scenario");
    CLI::App* ensemble = app.add_subcommand("ensemble", "run a seeded scenario ensemble");
    CLI::App* calibrate = app.add_subcommand("calibrate", "measure the wavefront speed");
    add_common(plan);
    add_common(simulate);
    add_common(ensemble);
    add_common(calibrate);

    CLI11_PARSE(app, argc, argv);

    if (plan->parsed()) cfg.command = ccm::Command::plan;
    if (simulate->parsed()) cfg.command = ccm::Command::simulate;
    if (ensemble->parsed()) cfg.command = ccm::Command::ensemble;
    if (calibrate->parsed()) cfg.command = ccm::Command::calibrate;
    if (seed_given) cfg.seed = seed;
    cfg.timestamp = !no_timestamp;
    for (const std::string& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            std::cerr << "error: --set expects key=value, got '" << s << "'\n";
            return 1;
        }
        cfg.overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }

    return ccm::run(cfg, std::cout, std::cerr);
}
