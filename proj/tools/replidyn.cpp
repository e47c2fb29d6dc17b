#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "replidyn/error.hpp"
#include "replidyn/experiment.hpp"

namespace fs = std::filesystem;
using namespace replidyn;

namespace {

std::vector<std::string> split_checks(const std::string& list) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(list);
    while (std::getline(is, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item == "all") {
            const auto& all = check_names();
            out.insert(out.end(), all.begin(), all.end());
        } else if (!item.empty()) {
            out.push_back(item);
        }
    }
    if (out.empty()) throw Error("--checks: empty list");
    return out;
}

// Prints the CSV and optionally mirrors it to a file.
void emit(const std::string& csv, const std::string& out_path) {
    std::cout << csv;
    if (!out_path.empty()) write_file_atomic(out_path, csv);
}

int report(int code, const std::string& message) {
    if (code != 0 && !message.empty()) std::cerr << "replidyn: " << message << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regularized nonlocal degenerate parabolic solver and diagnostics"};
    app.require_subcommand(1);

    std::string config_path, trace_path, snaps_path, checks = "all", out_path;

    auto* run_cmd = app.add_subcommand("run", "Run initdata, solver, diagnostics and blow-up analysis");
    run_cmd->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);

    auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep (sweep.axis, sweep.values)");
    sweep_cmd->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);

    auto* verify_cmd = app.add_subcommand("verify", "Run diagnostic checks on a stored trace");
    verify_cmd->add_option("--trace", trace_path, "trace CSV")->required()->check(CLI::ExistingFile);
    verify_cmd->add_option("--snapshots", snaps_path, "snapshot NDJSON")->required()->check(CLI::ExistingFile);
    verify_cmd->add_option("--checks", checks, "comma-separated check names, or 'all'");
    verify_cmd->add_option("--out", out_path, "also write the CSV here");

    auto* init_cmd = app.add_subcommand("initdata", "Build regularized initial data and its property report");
    init_cmd->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);

    auto* blow_cmd = app.add_subcommand("blowup", "Blow-up analysis of a stored trace");
    blow_cmd->add_option("--trace", trace_path, "trace CSV")->required()->check(CLI::ExistingFile);
    blow_cmd->add_option("--snapshots", snaps_path, "snapshot NDJSON")->required()->check(CLI::ExistingFile);
    blow_cmd->add_option("--out", out_path, "also write the CSV here");
    double threshold = 10.0, core_margin = 0.25;
    blow_cmd->add_option("--growth-threshold", threshold, "growth factor marking a blow-up node");
    blow_cmd->add_option("--core-margin", core_margin, "boundary distance of the reported core");

    auto* rep_cmd = app.add_subcommand("replicator", "Integrate replicator dynamics");
    rep_cmd->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            const ExperimentConfig cfg = parse_config(read_text_file(config_path));
            const ExperimentResult r = run_experiment(cfg, output_root(cfg));
            if (r.exit_code != 1) std::cout << (r.dir / "summary.json").string() << '\n';
            return report(r.exit_code, r.message);
        }
        if (*sweep_cmd) {
            const SweepSpec spec = parse_sweep(read_text_file(config_path));
            const SweepResult r = run_sweep(spec, output_root(spec.base));
            for (const auto& row : r.rows)
                if (row.exit_code != 0) std::cerr << spec.axis << "=" << row.axis_value << ": " << row.message << '\n';
            std::cout << (output_root(spec.base) / spec.base.name / "sweep_summary.csv").string() << '\n';
            return r.exit_code;
        }
        if (*verify_cmd) {
            const Trace trace = read_trace_csv(fs::path(trace_path));
            const auto snaps = read_snapshots(fs::path(snaps_path));
            const auto rows = run_checks(trace, snaps, split_checks(checks));
            emit(checks_to_csv(rows), out_path);
            return all_pass(rows) ? 0 : 2;
        }
        if (*init_cmd) {
            const ExperimentConfig cfg = parse_config(read_text_file(config_path));
            std::string msg;
            const int code = run_initdata(cfg, output_root(cfg), &msg);
            if (code != 1) std::cout << (output_root(cfg) / cfg.name / "initdata_report.csv").string() << '\n';
            return report(code, msg);
        }
        if (*blow_cmd) {
            const Trace trace = read_trace_csv(fs::path(trace_path));
            const auto snaps = read_snapshots(fs::path(snaps_path));
            BlowupSpec spec;
            spec.growth_threshold = threshold;
            spec.core_margin = core_margin;
            const BlowupAnalysis a = analyse_blowup(trace, snaps, spec);
            emit(blowup_csv(a), out_path);
            return report(a.fit_error.empty() ? 0 : 2, a.fit_error);
        }
        if (*rep_cmd) {
            const ExperimentConfig cfg = parse_config(read_text_file(config_path));
            std::string msg;
            const int code = run_replicator(cfg, output_root(cfg), &msg);
            return report(code, msg);
        }
    } catch (const std::exception& e) {
        return report(1, e.what());
    }
    return 1;
}
