#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "auditlab/errors.hpp"
#include "auditlab/harness/config.hpp"
#include "auditlab/harness/dataset.hpp"
#include "auditlab/harness/sweeps.hpp"

using namespace auditlab;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct SweepArgs {
    std::string config;
    std::optional<std::uint64_t> seed_offset;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<unsigned> threads;
};

void add_sweep_options(CLI::App* cmd, SweepArgs& a) {
    cmd->add_option("--config", a.config, "experiment config (JSON)")->required();
    cmd->add_option("--seed-offset", a.seed_offset, "added to every seed");
    cmd->add_option("--out", a.out, "results file (default: stdout)");
    cmd->add_option("--format", a.format, "csv or json");
    cmd->add_option("--threads", a.threads, "worker threads (0: all cores)");
}

ExperimentConfig load_with_overrides(const SweepArgs& a, ExperimentMode expected) {
    ExperimentConfig c = load_config(a.config);
    if (c.mode != expected)
        throw ConfigError(std::string("config mode is ") + mode_name(c.mode) + ", expected " + mode_name(expected));
    if (a.seed_offset) c.seed_offset = *a.seed_offset;
    if (a.out) c.output_path = *a.out;
    if (a.format) c.format = parse_result_format(*a.format);
    if (a.threads) c.threads = *a.threads;
    return c;
}

void write_rows(const std::vector<ResultRow>& rows, const ExperimentConfig& c) {
    if (c.output_path.empty() || c.output_path == "-") {
        if (c.format == ResultFormat::csv) write_results_csv(std::cout, rows);
        else write_results_json(std::cout, rows);
    } else {
        emit_results(rows, c.output_path, c.format);
    }
}

int run_sweep(const SweepArgs& a, ExperimentMode mode) {
    const ExperimentConfig c = load_with_overrides(a, mode);
    SweepOutput out = mode == ExperimentMode::blackbox ? run_blackbox_sweep(c) : run_mixture_sweep(c);
    for (const auto& n : out.notes) std::cerr << n << '\n';
    write_rows(out.rows, c);
    return 0;
}

int run_lower_bound(const SweepArgs& a, const std::optional<std::string>& report_path) {
    const ExperimentConfig c = load_with_overrides(a, ExperimentMode::lower_bound_check);
    const LowerBoundReport r = run_lower_bound_check(c);
    const std::string doc = lower_bound_report_to_json(r).dump(2);
    if (report_path) {
        std::ofstream f(*report_path);
        if (!f) throw IoError("cannot write " + *report_path);
        f << doc << '\n';
    } else {
        std::cout << doc << '\n';
    }
    if (!r.rows.empty() && !c.output_path.empty()) emit_results(r.rows, c.output_path, c.format);
    return 0;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cost-aware fairness auditing under partial feedback"};
    app.require_subcommand(1);

    SweepArgs blackbox, mixture, lower;
    add_sweep_options(app.add_subcommand("blackbox", "tau sweep of Baseline and RS-Audit"), blackbox);
    add_sweep_options(app.add_subcommand("mixture", "eps sweep of RS-Audit and Exp-Audit"), mixture);
    auto* lb_cmd = app.add_subcommand("lower-bound", "exact checks and label scaling on the hard instances");
    add_sweep_options(lb_cmd, lower);
    std::optional<std::string> lb_report;
    lb_cmd->add_option("--report", lb_report, "report JSON (default: stdout)");

    std::string dataset, data_path, data_out;
    auto* ingest_cmd = app.add_subcommand("ingest", "validate and encode a raw dataset");
    ingest_cmd->add_option("--dataset", dataset, "adult or law")->required()->check(CLI::IsMember({"adult", "law"}));
    ingest_cmd->add_option("--path", data_path, "raw CSV")->required();
    ingest_cmd->add_option("--out", data_out, "encoded CSV")->required();

    std::string inst_path, clf_path;
    std::uint64_t summarize_seed = 0;
    auto* sum_cmd = app.add_subcommand("summarize", "population summary of an instance and classifier");
    sum_cmd->add_option("--instance", inst_path, "instance JSON")->required();
    sum_cmd->add_option("--classifier", clf_path, "classifier JSON")->required();
    sum_cmd->add_option("--seed", summarize_seed, "seed for generated instances and training");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (app.got_subcommand("blackbox")) return run_sweep(blackbox, ExperimentMode::blackbox);
        if (app.got_subcommand("mixture")) return run_sweep(mixture, ExperimentMode::mixture);
        if (app.got_subcommand("lower-bound")) return run_lower_bound(lower, lb_report);
        if (app.got_subcommand("ingest")) {
            const Dataset d = dataset == "adult" ? ingest_adult(data_path) : ingest_law(data_path);
            const EncodingSpec spec = fit_encoding(d);
            const LabeledData enc = encode(d, spec);
            std::ofstream f(data_out);
            if (!f) throw IoError("cannot write " + data_out);
            write_encoded_csv(f, enc, spec.feature_names());
            std::cerr << d.a.size() << " rows, " << spec.width() << " encoded features\n";
            return 0;
        }
        if (app.got_subcommand("summarize")) {
            const std::string base = std::filesystem::path(inst_path).parent_path().string();
            RngStream rng(summarize_seed);
            RngStream inst_rng = rng.split(0), clf_rng = rng.split(1);
            auto inst = instance_from_json(read_json_file(inst_path), base, inst_rng);
            auto clf = classifier_from_json(read_json_file(clf_path), *inst, clf_rng);
            std::cout << summary_to_json(best_summary(*inst, *clf, mix_seed(summarize_seed, 7))).dump(2) << '\n';
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitConfig;
}
