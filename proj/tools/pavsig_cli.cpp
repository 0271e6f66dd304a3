// pavsig: batch runs, reports, replays, and the live gateway.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pavsig/config_file.hpp"
#include "pavsig/harness.hpp"
#include "pavsig/report.hpp"
#include "pavsig/trial_log.hpp"

#if defined(PAVSIG_HAVE_GATEWAY)
#include "pavsig/gateway.hpp"
#endif

namespace fs = std::filesystem;

namespace {

std::vector<pavsig::TrialLog> load_logs(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && name.rfind("trial_", 0) == 0 && entry.path().extension() == ".jsonl") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<pavsig::TrialLog> logs;
    for (const auto& f : files) logs.push_back(pavsig::read_log(f));
    return logs;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pavlovian signalling simulator"};
    app.require_subcommand(1);

    // run
    pavsig::ExperimentConfig cfg;
    std::string algo = "td-lambda";
    std::string pilot = "automotion";
    std::string config_path;
    fs::path out_dir = "runs";
    auto* run = app.add_subcommand("run", "Run trials and write JSONL logs plus summary.csv");
    run->add_option("--algo", algo, "td0 | td-lambda | gtd | la-td")
        ->check(CLI::IsMember({"td0", "td-lambda", "gtd", "la-td"}));
    run->add_option("--lambda", cfg.signalling.lambda, "Trace decay")->capture_default_str();
    run->add_option("--lookahead", cfg.signalling.lookahead_bins, "Look-ahead bins (la-td)")->capture_default_str();
    run->add_option("--trials", cfg.signalling.trials)->capture_default_str();
    run->add_option("--motions", cfg.signalling.motions_per_trial, "Motions per trial")->capture_default_str();
    run->add_option("--seed", cfg.signalling.seed)->capture_default_str();
    run->add_option("--jitter-bins", cfg.world.servo.jitter_bins)->capture_default_str();
    run->add_option("--threshold", cfg.signalling.threshold)->capture_default_str();
    run->add_option("--pilot", pilot, "automotion | scripted")->check(CLI::IsMember({"automotion", "scripted"}));
    run->add_option("--delay-ms", cfg.pilot.onset_delay_ms, "Token onset delay (scripted)")->capture_default_str();
    run->add_option("--reaction-ms", cfg.pilot.reaction_ms, "Reaction delay (scripted)")->capture_default_str();
    run->add_option("--config", config_path, "World config file (key = value)");
    run->add_option("--out", out_dir, "Output directory")->capture_default_str();

    // report
    fs::path in_dir;
    std::string format = "csv";
    auto* report = app.add_subcommand("report", "Summarize a run directory");
    report->add_option("--in", in_dir, "Run directory")->required();
    report->add_option("--format", format)->check(CLI::IsMember({"csv", "jsonl"}))->capture_default_str();

    // replay
    fs::path log_path;
    fs::path replay_out;
    auto* replay = app.add_subcommand("replay", "Re-run a recorded log and compare byte-for-byte");
    replay->add_option("--log", log_path, "Recorded trial log")->required();
    replay->add_option("--out", replay_out, "Write the replayed log here");

#if defined(PAVSIG_HAVE_GATEWAY)
    pavsig::GatewayOptions gw;
    auto* serve = app.add_subcommand("serve", "Serve live trials over WebSocket");
    serve->add_option("--port", gw.port)->capture_default_str();
    serve->add_option("--delay-ms", gw.delay_ms, "Token onset delay")->capture_default_str();
    serve->add_option("--out", gw.log_dir, "Directory for finished trial logs")->capture_default_str();
#endif

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            if (!config_path.empty()) pavsig::apply_config_file(config_path, cfg);
            cfg.signalling.algorithm = *pavsig::parse_algorithm(algo);
            cfg.pilot.mode = *pavsig::parse_pilot(pilot);
            if (run->count("--lookahead") == 0 && cfg.signalling.algorithm != pavsig::SignalAlgorithm::la_td) {
                cfg.signalling.lookahead_bins = 0;
            }
            cfg.validate();
            fs::create_directories(out_dir);
            const auto logs = pavsig::run_experiment(cfg);
            for (const auto& log : logs) {
                pavsig::write_log(out_dir / pavsig::log_file_name(log.summary.trial), log);
            }
            const std::string table = pavsig::summary_table(logs, pavsig::ReportFormat::csv);
            write_text(out_dir / "summary.csv", table);
            std::cout << table;
            return 0;
        }
        if (*report) {
            const auto logs = load_logs(in_dir);
            if (logs.empty()) {
                std::cerr << "no trial_*.jsonl logs in " << in_dir << "\n";
                return 1;
            }
            const auto fmt = format == "csv" ? pavsig::ReportFormat::csv : pavsig::ReportFormat::jsonl;
            const std::string ext = format == "csv" ? ".csv" : ".jsonl";
            const std::string summary = pavsig::summary_table(logs, fmt);
            write_text(in_dir / ("summary" + ext), summary);
            write_text(in_dir / ("raster" + ext), pavsig::raster_table(logs, fmt));
            write_text(in_dir / ("trace" + ext), pavsig::trace_table(logs, fmt));
            std::cout << summary;
            return 0;
        }
        if (*replay) {
            const std::string original = pavsig::read_file(log_path);
            const auto replayed = pavsig::to_jsonl(pavsig::replay_trial(pavsig::parse_jsonl(original)));
            if (!replay_out.empty()) write_text(replay_out, replayed);
            if (replayed == original) {
                std::cout << "replay identical (" << original.size() << " bytes)\n";
                return 0;
            }
            std::cout << "replay differs from recording\n";
            return 2;
        }
#if defined(PAVSIG_HAVE_GATEWAY)
        if (*serve) {
            pavsig::run_gateway(gw);
            return 0;
        }
#endif
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
