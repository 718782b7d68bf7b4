#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chanauth/channel_sim.hpp"
#include "chanauth/classifiers/model.hpp"
#include "chanauth/dataset_io.hpp"
#include "chanauth/grid_search.hpp"
#include "chanauth/preprocess.hpp"

namespace chanauth::harness {

enum class SweepVariable { AttackIntensity, FeatureDim, TrainSize, WindowSize };

std::string_view to_string(SweepVariable v);
std::optional<SweepVariable> sweep_variable_from_name(std::string_view name);

struct SweepConfig {
    SweepVariable variable = SweepVariable::AttackIntensity;
    std::vector<double> values;               ///< swept points, in report order
    sim::ScenarioConfig scenario;             ///< base scenario / fixed knobs
    prep::PreprocessConfig preprocess;        ///< fixed preprocessing knobs
    std::vector<ml::ClassifierSpec> classifiers; ///< empty -> reference_optima()
    int repetitions = 3;                      ///< independent seeds per point
    std::size_t l_total = 10;
    std::size_t l_valid = 2;
    io::PartitionPolicy partition = io::PartitionPolicy::Ordered;
    std::uint64_t shuffle_seed = 0;
    std::uint64_t seed = 0;
};

/// Default swept values per variable.
std::vector<double> default_sweep_values(SweepVariable v);

struct SweepRow {
    double value = 0.0;
    std::string classifier; ///< family display name, '#i' suffixed on duplicates
    std::size_t dataset = 0;
    std::uint64_t seed = 0; ///< repetition seed
    double accuracy = 0.0;  ///< NaN on a failed point
    std::string error;      ///< failure reason, empty on success
};

struct AggregateRow {
    double value = 0.0;
    std::string classifier;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 0; ///< rows aggregated (failed rows excluded)
};

struct SweepReport {
    SweepVariable variable = SweepVariable::AttackIntensity;
    std::vector<SweepRow> rows; ///< (value, classifier, dataset, repetition) order
};

/// Synthesizes one trace per (dataset, repetition) from the scenario with a
/// derived seed, redrawing until the windowed training region of every
/// swept preprocessing variant contains both labels. For the
/// AttackIntensity variable traces are re-synthesized per swept value; for
/// the other variables the traces are fixed and only preprocessing varies.
/// Evaluation always runs on the testing side of the partition.
SweepReport run_sweep(const SweepConfig& cfg);

/// Same evaluation over ingested traces; repetitions then vary only the
/// classifier seed. AttackIntensity cannot be swept over fixed traces.
SweepReport run_sweep(const SweepConfig& cfg, const io::DatasetRefs& datasets);

/// Re-evaluates a single (value, classifier, dataset) point of a synthetic
/// sweep in isolation; run_sweep's rows are reproducible through this.
SweepRow rerun_point(const SweepConfig& cfg, double value, std::size_t classifier_index,
                     std::size_t dataset_index, int repetition);

/// Per (value, classifier): mean/min/max accuracy over datasets and
/// repetitions. Order independent in the input rows.
std::vector<AggregateRow> aggregate(const SweepReport& report);

/// Tidy CSV: variable,value,classifier,dataset,seed,accuracy
void write_report_csv(const SweepReport& report, const std::filesystem::path& path);
SweepReport parse_report_csv(const std::filesystem::path& path);

/// variable,value,classifier,mean_accuracy,min_accuracy,max_accuracy,count
void write_aggregate_csv(const std::vector<AggregateRow>& rows, SweepVariable variable,
                         const std::filesystem::path& path);

/// Static SVG: mean accuracy vs swept value, one polyline per classifier
/// (tagged data-family="<classifier>"), with axes and legend.
void write_plot_svg(const SweepReport& report, const std::filesystem::path& path);

} // namespace chanauth::harness
