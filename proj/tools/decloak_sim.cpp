// Command-line driver: run a scenario, check its protocol properties, and
// report gas costs. Subcommands: run, check, report, all.

#include <CLI11.hpp>

#include "decloak/checkers.hpp"
#include "decloak/gas.hpp"

#include <filesystem>
#include <iostream>

using namespace decloak;

namespace {

Scenario load_or_exit(const std::string& path) {
    if (!std::filesystem::exists(path)) {
        std::cerr << "scenario file not found: " << path << "\n";
        std::exit(2);
    }
    return Scenario::load(path);
}

void print_summary(const RunResult& r) {
    std::cout << "scenario: " << r.scenario.name << "\n";
    std::cout << "ticks: " << r.ticks << "  blocks: " << r.chain->height() << "\n";
    if (auto sta = r.final_sta())
        std::cout << "proposal status: " << sta_name(*sta) << "\n";
    else
        std::cout << "proposal status: (no on-chain record)\n";
    for (const auto& a : r.actors) {
        std::cout << "  " << a.label << " [" << a.behavior << "] balance "
                  << r.balance_before.at(a.addr) << " -> " << r.contract->balance(a.addr);
        if (a.learned_r) std::cout << "  output " << sha256(*a.learned_r).hex().substr(0, 12);
        std::cout << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic simulator for TEE-backed multi-party transactions"};
    app.require_subcommand(1);

    std::string scenario_path, trace_path, gas_path;

    auto* run = app.add_subcommand("run", "run a scenario and write its trace");
    run->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    run->add_option("--trace", trace_path, "write the run trace to this file");

    auto* check = app.add_subcommand("check", "re-run a scenario and verify protocol properties");
    check->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    check->add_option("--trace", trace_path, "compare the replay against this recorded trace");

    auto* report = app.add_subcommand("report", "run a scenario and print its gas report");
    report->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    report->add_option("--gas-table", gas_path, "override gas costs from a key=value file");

    auto* all = app.add_subcommand("all", "run, check and report in one go");
    all->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    all->add_option("--trace", trace_path, "write the run trace to this file");
    all->add_option("--gas-table", gas_path, "override gas costs from a key=value file");

    CLI11_PARSE(app, argc, argv);

    try {
        Scenario sc = load_or_exit(scenario_path);
        RunResult r = run_scenario(sc);

        if (run->parsed()) {
            if (!trace_path.empty()) {
                r.trace.save(trace_path);
                std::cout << "trace written to " << trace_path << "\n";
            }
            print_summary(r);
            return 0;
        }

        if (check->parsed()) {
            if (!trace_path.empty()) {
                Trace recorded = Trace::load(trace_path);
                if (!traces_equal(recorded, r.trace)) {
                    std::cout << "FAIL  trace_replay  replay diverges from recorded trace\n";
                    return 1;
                }
                std::cout << "PASS  trace_replay  replay matches recorded trace\n";
            }
            CheckReport rep = check_run(r);
            std::cout << rep.to_text();
            return rep.all_pass() ? 0 : 1;
        }

        GasTable table = gas_path.empty() ? GasTable::defaults() : GasTable::load(gas_path);

        if (report->parsed()) {
            print_summary(r);
            std::cout << gas_report(r, table).to_text();
            return 0;
        }

        // all
        if (!trace_path.empty()) r.trace.save(trace_path);
        print_summary(r);
        CheckReport rep = check_run(r);
        std::cout << rep.to_text();
        std::cout << gas_report(r, table).to_text();
        return rep.all_pass() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
