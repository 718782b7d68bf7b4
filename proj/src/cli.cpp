#include "chanauth/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chanauth/channel_sim.hpp"
#include "chanauth/config_file.hpp"
#include "chanauth/dataset_io.hpp"
#include "chanauth/grid_search.hpp"
#include "chanauth/numeric_io.hpp"
#include "chanauth/sweep.hpp"

namespace chanauth::cli {

namespace {

namespace fs = std::filesystem;

struct CommonOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::string trace_dir;
    std::optional<std::uint64_t> seed;
    std::size_t grid_subsample = 1;
    bool paper_scale = false;
};

cfg::HarnessConfig load_config(const CommonOptions& opt) {
    cfg::HarnessConfig hc = opt.config_path.empty()
                                ? cfg::default_config()
                                : cfg::resolve_config(cfg::load_ini(opt.config_path));
    if (opt.seed) {
        hc.scenario.seed = *opt.seed;
        hc.sweep.seed = *opt.seed;
        hc.sweep.scenario.seed = *opt.seed;
    }
    if (opt.paper_scale) {
        hc.scenario.n_packets = 100000;
        hc.sweep.scenario.n_packets = 100000;
    }
    return hc;
}

std::string trace_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "trace_%02zu.csv", index);
    return buf;
}

/// Per-dataset scenario: one position constellation per dataset id,
/// realized as an independent channel draw of the configured links.
sim::ScenarioConfig dataset_scenario(const cfg::HarnessConfig& hc, std::size_t dataset_id) {
    sim::ScenarioConfig sc = hc.scenario;
    sc.seed = derive_seed(hc.scenario.seed, 0xda7a5e75c0137a11ULL, dataset_id);
    return sc;
}

/// The generate/ingest-side counterpart of the sweep harness's guarantee:
/// redraw until the configured training window holds both labels.
TraceDataset synthesize_dataset(const cfg::HarnessConfig& hc, std::size_t dataset_id) {
    const sim::ScenarioConfig base = dataset_scenario(hc, dataset_id);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        sim::ScenarioConfig sc = base;
        sc.seed = derive_seed(base.seed, static_cast<std::uint64_t>(attempt));
        TraceDataset ds = sim::synthesize_trace(sc);
        const Eigen::Index begin = hc.preprocess.window;
        const Eigen::Index end = std::min<Eigen::Index>(ds.size(), begin + hc.preprocess.n_train);
        bool bob = false, eve = false;
        for (Eigen::Index k = begin; k < end; ++k)
            (ds.labels[static_cast<std::size_t>(k)] == TransmitterLabel::Eve ? eve : bob) = true;
        if (bob && eve) {
            ds.metadata["dataset"] = std::to_string(dataset_id);
            return ds;
        }
    }
    throw std::runtime_error("generate: training window never held both labels");
}

std::vector<TraceDataset> load_traces(const std::string& dir) {
    const auto files = io::list_trace_files(dir);
    if (files.empty())
        throw io::ParseError(io::ParseErrorKind::Io, dir, 0, "no .csv trace files");
    std::vector<TraceDataset> traces;
    traces.reserve(files.size());
    for (const auto& f : files)
        traces.push_back(io::load_trace(f));
    return traces;
}

int cmd_generate(const CommonOptions& opt, std::ostream& out) {
    const auto hc = load_config(opt);
    fs::create_directories(opt.out_dir);
    for (std::size_t id = 0; id < hc.l_total; ++id) {
        const TraceDataset ds = synthesize_dataset(hc, id);
        const auto path = fs::path(opt.out_dir) / trace_name(id);
        io::save_trace(ds, path);
        out << path.string() << ": n=" << ds.size() << " m=" << ds.m
            << " eve_fraction=" << format_double_shortest(ds.eve_fraction()) << "\n";
    }
    return kExitOk;
}

int cmd_ingest(const CommonOptions& opt, std::ostream& out) {
    const auto files = io::list_trace_files(opt.trace_dir);
    if (files.empty())
        throw io::ParseError(io::ParseErrorKind::Io, opt.trace_dir, 0, "no .csv trace files");
    for (const auto& f : files) {
        const TraceDataset ds = io::load_trace(f);
        out << f.filename().string() << ": n=" << ds.size() << " m=" << ds.m
            << " eve_fraction=" << format_double_shortest(ds.eve_fraction()) << "\n";
    }
    out << files.size() << " trace(s) ok\n";
    return kExitOk;
}

int cmd_gridsearch(const CommonOptions& opt, std::ostream& out) {
    const auto hc = load_config(opt);
    std::vector<TraceDataset> traces;
    if (!opt.trace_dir.empty()) {
        traces = load_traces(opt.trace_dir);
    } else {
        for (std::size_t id = 0; id < hc.l_total; ++id)
            traces.push_back(synthesize_dataset(hc, id));
    }
    const auto collection =
        io::partition_collection(std::move(traces), hc.l_valid, hc.partition, hc.shuffle_seed);
    const auto validation = io::select(collection, collection.validation);

    fs::create_directories(opt.out_dir);
    const auto summary_path = fs::path(opt.out_dir) / "best_specs.txt";
    std::ofstream summary(summary_path, std::ios::binary);
    for (const ml::Family family : hc.grid_families) {
        const auto grid = grid::default_grid(family);
        grid::SearchOptions options;
        options.subsample_stride = opt.grid_subsample;
        const auto result =
            grid::grid_search(grid, validation, hc.preprocess, hc.scenario.seed, options);
        const auto csv_path =
            fs::path(opt.out_dir) / ("grid_" + std::string(ml::family_name(family)) + ".csv");
        grid::write_scores_csv(result, csv_path);
        summary << to_string(result.best_spec) << '\n';
        out << ml::family_name(family) << ": best score "
            << format_double_shortest(result.best_score) << " -> " << to_string(result.best_spec)
            << "\n";
    }
    out << "wrote " << summary_path.string() << "\n";
    return kExitOk;
}

int cmd_sweep(const CommonOptions& opt, std::ostream& out) {
    auto hc = load_config(opt);
    harness::SweepReport report;
    if (!opt.trace_dir.empty()) {
        auto traces = load_traces(opt.trace_dir);
        const auto collection =
            io::partition_collection(std::move(traces), hc.l_valid, hc.partition,
                                     hc.shuffle_seed);
        const auto testing = io::select(collection, collection.testing);
        report = harness::run_sweep(hc.sweep, testing);
    } else {
        report = harness::run_sweep(hc.sweep);
    }
    fs::create_directories(opt.out_dir);
    const std::string stem = "sweep_" + std::string(harness::to_string(hc.sweep.variable));
    const auto csv = fs::path(opt.out_dir) / (stem + ".csv");
    const auto agg = fs::path(opt.out_dir) / (stem + "_aggregate.csv");
    const auto svg = fs::path(opt.out_dir) / (stem + ".svg");
    harness::write_report_csv(report, csv);
    harness::write_aggregate_csv(harness::aggregate(report), hc.sweep.variable, agg);
    harness::write_plot_svg(report, svg);
    out << "wrote " << csv.string() << ", " << agg.string() << ", " << svg.string() << "\n";
    return kExitOk;
}

int cmd_report(const CommonOptions& opt, const std::string& in_file, std::ostream& out) {
    const auto report = harness::parse_report_csv(in_file);
    fs::create_directories(opt.out_dir);
    const std::string stem = "sweep_" + std::string(harness::to_string(report.variable));
    const auto agg = fs::path(opt.out_dir) / (stem + "_aggregate.csv");
    const auto svg = fs::path(opt.out_dir) / (stem + ".svg");
    harness::write_aggregate_csv(harness::aggregate(report), report.variable, agg);
    harness::write_plot_svg(report, svg);
    out << "wrote " << agg.string() << ", " << svg.string() << "\n";
    return kExitOk;
}

} // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Channel-estimate transmitter authentication toolkit"};
    app.require_subcommand(1);

    CommonOptions opt;
    std::string report_in;

    const auto add_common = [&](CLI::App* cmd, bool with_traces) {
        cmd->add_option("--config", opt.config_path, "INI config file");
        cmd->add_option("--out-dir", opt.out_dir, "output directory");
        cmd->add_option("--seed", opt.seed, "master seed override");
        if (with_traces)
            cmd->add_option("--trace-dir", opt.trace_dir, "directory of trace CSV files");
    };

    auto* generate = app.add_subcommand("generate", "synthesize and write trace CSVs");
    add_common(generate, false);
    generate->add_flag("--paper-scale", opt.paper_scale, "N=100000 packets per trace");

    auto* ingest = app.add_subcommand("ingest", "validate external trace CSVs");
    ingest->add_option("--trace-dir", opt.trace_dir, "directory of trace CSV files")
        ->required();

    auto* gridsearch = app.add_subcommand("gridsearch", "exhaustive hyperparameter search");
    add_common(gridsearch, true);
    gridsearch->add_option("--grid-subsample", opt.grid_subsample,
                           "keep every n-th grid configuration");

    auto* sweep = app.add_subcommand("sweep", "run the configured sweep on the testing split");
    add_common(sweep, true);
    sweep->add_flag("--paper-scale", opt.paper_scale, "N=100000 packets per trace");

    auto* report = app.add_subcommand("report", "re-aggregate and plot an existing sweep CSV");
    report->add_option("--in", report_in, "tidy sweep CSV")->required();
    report->add_option("--out-dir", opt.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            out << app.help();
            return kExitOk;
        }
        err << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        if (generate->parsed())
            return cmd_generate(opt, out);
        if (ingest->parsed())
            return cmd_ingest(opt, out);
        if (gridsearch->parsed())
            return cmd_gridsearch(opt, out);
        if (sweep->parsed())
            return cmd_sweep(opt, out);
        if (report->parsed())
            return cmd_report(opt, report_in, out);
    } catch (const cfg::ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const io::ParseError& e) {
        err << "data error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "data error: " << e.what() << "\n";
        return kExitDataError;
    }
    err << "no subcommand\n";
    return kExitConfigError;
}

} // namespace chanauth::cli
