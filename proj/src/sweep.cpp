#include "chanauth/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "chanauth/numeric_io.hpp"

namespace chanauth::harness {

namespace {

constexpr std::uint64_t kTraceStream = 0x7e5707a1ce5eedf3ULL;
constexpr std::uint64_t kFitStream = 0xf17a5eed0b3c9a55ULL;
constexpr std::uint64_t kRepStream = 0x9e9e7171b2d4f607ULL;
constexpr int kMaxAdmissionRetries = 1000;

} // namespace

std::string_view to_string(SweepVariable v) {
    switch (v) {
    case SweepVariable::AttackIntensity: return "AttackIntensity";
    case SweepVariable::FeatureDim: return "FeatureDim";
    case SweepVariable::TrainSize: return "TrainSize";
    case SweepVariable::WindowSize: return "WindowSize";
    }
    return "?";
}

std::optional<SweepVariable> sweep_variable_from_name(std::string_view name) {
    for (SweepVariable v : {SweepVariable::AttackIntensity, SweepVariable::FeatureDim,
                            SweepVariable::TrainSize, SweepVariable::WindowSize})
        if (name == to_string(v))
            return v;
    return std::nullopt;
}

std::vector<double> default_sweep_values(SweepVariable v) {
    switch (v) {
    case SweepVariable::AttackIntensity: return {0.05, 0.10, 0.15, 0.20, 0.25};
    case SweepVariable::FeatureDim: return {1, 2, 3, 4, 6, 8, 12, 16, 24, 48};
    case SweepVariable::TrainSize: return {2, 4, 6, 8, 10};
    case SweepVariable::WindowSize: return {0, 1, 2, 3, 4, 5};
    }
    return {};
}

namespace {

/// Applies one swept value to the preprocessing knobs. AttackIntensity is
/// generative and leaves them untouched.
prep::PreprocessConfig apply_value(prep::PreprocessConfig ppcfg, SweepVariable variable,
                                   double value) {
    switch (variable) {
    case SweepVariable::AttackIntensity: break;
    case SweepVariable::FeatureDim:
        ppcfg.m_red = static_cast<Eigen::Index>(std::llround(value));
        break;
    case SweepVariable::TrainSize:
        ppcfg.n_train = static_cast<Eigen::Index>(std::llround(value));
        break;
    case SweepVariable::WindowSize:
        ppcfg.window = static_cast<int>(std::llround(value));
        break;
    }
    return ppcfg;
}

/// The (window, n_train) variants a sweep will run, used to admit traces.
std::vector<std::pair<int, Eigen::Index>> window_variants(const SweepConfig& cfg) {
    std::set<std::pair<int, Eigen::Index>> variants;
    for (double v : cfg.values) {
        const auto pp = apply_value(cfg.preprocess, cfg.variable, v);
        variants.insert({pp.window, pp.n_train});
    }
    if (variants.empty())
        variants.insert({cfg.preprocess.window, cfg.preprocess.n_train});
    return {variants.begin(), variants.end()};
}

/// The published guarantee, applied to the windowed training region: raw
/// packets [W, W + n_train) must contain both labels for every variant.
bool admissible(const TraceDataset& ds,
                const std::vector<std::pair<int, Eigen::Index>>& variants) {
    for (const auto& [window, n_train] : variants) {
        const Eigen::Index begin = window;
        const Eigen::Index end = std::min<Eigen::Index>(ds.size(), begin + n_train);
        bool bob = false, eve = false;
        for (Eigen::Index k = begin; k < end; ++k)
            (ds.labels[static_cast<std::size_t>(k)] == TransmitterLabel::Eve ? eve : bob) = true;
        if (!bob || !eve)
            return false;
    }
    return true;
}

TraceDataset synthesize_admissible(sim::ScenarioConfig scenario, std::uint64_t seed,
                                   const std::vector<std::pair<int, Eigen::Index>>& variants) {
    for (int attempt = 0; attempt < kMaxAdmissionRetries; ++attempt) {
        scenario.seed = derive_seed(seed, static_cast<std::uint64_t>(attempt));
        TraceDataset ds = sim::synthesize_trace(scenario);
        if (admissible(ds, variants))
            return ds;
    }
    throw std::runtime_error("could not synthesize a trace whose training window holds both "
                             "labels for every swept variant");
}

std::vector<std::string> classifier_labels(const std::vector<ml::ClassifierSpec>& specs) {
    std::vector<std::string> labels;
    std::map<std::string, int> seen;
    for (const auto& spec : specs) {
        std::string base{ml::family_name(spec.family)};
        const int n = ++seen[base];
        labels.push_back(n == 1 ? base : base + "#" + std::to_string(n));
    }
    return labels;
}

struct SweepPlan {
    std::vector<ml::ClassifierSpec> classifiers;
    std::vector<std::string> labels;
    std::vector<std::pair<int, Eigen::Index>> variants;
};

SweepPlan make_plan(const SweepConfig& cfg) {
    if (cfg.values.empty())
        throw std::invalid_argument("sweep has no values");
    if (cfg.repetitions < 1)
        throw std::invalid_argument("repetitions must be at least 1");
    SweepPlan plan;
    plan.classifiers = cfg.classifiers.empty() ? grid::reference_optima() : cfg.classifiers;
    plan.labels = classifier_labels(plan.classifiers);
    plan.variants = window_variants(cfg);
    return plan;
}

SweepRow evaluate_point(const TraceDataset& trace, const SweepConfig& cfg, double value,
                        const ml::ClassifierSpec& spec, const std::string& label,
                        std::size_t dataset_id, std::uint64_t rep_seed, std::uint64_t fit_seed) {
    SweepRow row;
    row.value = value;
    row.classifier = label;
    row.dataset = dataset_id;
    row.seed = rep_seed;
    try {
        const auto ppcfg = apply_value(cfg.preprocess, cfg.variable, value);
        const auto pipe = prep::run_pipeline(trace, ppcfg);
        const auto model = ml::fit_model(spec, pipe.train, fit_seed);
        row.accuracy = grid::accuracy(ml::predict(*model, pipe.eval), pipe.eval.labels);
    } catch (const std::exception& e) {
        row.accuracy = std::nan("");
        row.error = e.what();
    }
    return row;
}

/// Synthetic traces for one repetition: one per dataset id. AttackIntensity
/// resynthesizes per swept value (value_index >= 0), the other variables
/// share one trace set per repetition (value_index < 0).
TraceDataset synthesize_for(const SweepConfig& cfg, const SweepPlan& plan, int repetition,
                            std::ptrdiff_t value_index, std::size_t dataset_id) {
    sim::ScenarioConfig scenario = cfg.scenario;
    std::uint64_t seed =
        derive_seed(cfg.seed, kRepStream, static_cast<std::uint64_t>(repetition));
    if (value_index >= 0) {
        scenario.attack_intensity = cfg.values[static_cast<std::size_t>(value_index)];
        seed = derive_seed(seed, static_cast<std::uint64_t>(value_index) + 1);
    }
    seed = derive_seed(seed, kTraceStream, dataset_id);
    return synthesize_admissible(scenario, seed, plan.variants);
}

std::vector<std::size_t> testing_ids(const SweepConfig& cfg) {
    if (cfg.l_valid >= cfg.l_total)
        throw std::invalid_argument("l_valid must be smaller than l_total");
    // Partition over dataset ids only; ordered keeps 0..l_valid-1 as
    // validation, seeded-shuffle permutes ids first.
    std::vector<std::size_t> order(cfg.l_total);
    for (std::size_t i = 0; i < cfg.l_total; ++i)
        order[i] = i;
    if (cfg.partition == io::PartitionPolicy::SeededShuffle) {
        Rng rng(cfg.shuffle_seed);
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[static_cast<std::size_t>(rng.below(i))]);
    }
    return {order.begin() + static_cast<std::ptrdiff_t>(cfg.l_valid), order.end()};
}

std::uint64_t fit_seed_for(const SweepConfig& cfg, int repetition, std::size_t value_index,
                           std::size_t classifier_index, std::size_t dataset_id) {
    return derive_seed(derive_seed(cfg.seed, kFitStream, static_cast<std::uint64_t>(repetition)),
                       derive_seed(value_index, classifier_index), dataset_id);
}

} // namespace

namespace {

/// Shared evaluation core: rows land in deterministic (value, classifier,
/// dataset, repetition) order regardless of the compute order, and the
/// preprocessing pipeline runs once per (value, dataset, repetition).
SweepReport assemble_sweep(const SweepConfig& cfg, const SweepPlan& plan,
                           const std::vector<std::size_t>& ids,
                           const std::function<const TraceDataset&(std::size_t vi,
                                                                   std::size_t id_pos, int rep)>&
                               trace_of) {
    const std::size_t n_values = cfg.values.size();
    const std::size_t n_cls = plan.classifiers.size();
    const std::size_t n_ids = ids.size();
    const auto n_reps = static_cast<std::size_t>(cfg.repetitions);

    SweepReport report;
    report.variable = cfg.variable;
    report.rows.resize(n_values * n_cls * n_ids * n_reps);
    const auto row_at = [&](std::size_t vi, std::size_t ci, std::size_t d,
                            std::size_t rep) -> SweepRow& {
        return report.rows[((vi * n_cls + ci) * n_ids + d) * n_reps + rep];
    };

    for (std::size_t d = 0; d < n_ids; ++d) {
        for (std::size_t rep = 0; rep < n_reps; ++rep) {
            for (std::size_t vi = 0; vi < n_values; ++vi) {
                const auto ppcfg = apply_value(cfg.preprocess, cfg.variable, cfg.values[vi]);
                const std::uint64_t rep_seed =
                    derive_seed(cfg.seed, kRepStream, static_cast<std::uint64_t>(rep));
                const TraceDataset& trace = trace_of(vi, d, static_cast<int>(rep));

                std::optional<prep::PipelineOutput> pipe;
                std::string pipe_error;
                try {
                    pipe = prep::run_pipeline(trace, ppcfg);
                } catch (const std::exception& e) {
                    pipe_error = e.what();
                }

                for (std::size_t ci = 0; ci < n_cls; ++ci) {
                    SweepRow& row = row_at(vi, ci, d, rep);
                    row.value = cfg.values[vi];
                    row.classifier = plan.labels[ci];
                    row.dataset = ids[d];
                    row.seed = rep_seed;
                    if (!pipe) {
                        row.accuracy = std::nan("");
                        row.error = pipe_error;
                        continue;
                    }
                    try {
                        const auto model =
                            ml::fit_model(plan.classifiers[ci], pipe->train,
                                          fit_seed_for(cfg, static_cast<int>(rep), vi, ci,
                                                       ids[d]));
                        row.accuracy =
                            grid::accuracy(ml::predict(*model, pipe->eval), pipe->eval.labels);
                    } catch (const std::exception& e) {
                        row.accuracy = std::nan("");
                        row.error = e.what();
                    }
                }
            }
        }
    }
    return report;
}

} // namespace

SweepReport run_sweep(const SweepConfig& cfg) {
    const SweepPlan plan = make_plan(cfg);
    const auto ids = testing_ids(cfg);
    const bool generative = cfg.variable == SweepVariable::AttackIntensity;

    // Non-generative sweeps reuse one trace per (dataset, repetition)
    // across all swept values; the (d, rep, vi) compute order makes the
    // cached trace valid for the whole inner value loop.
    TraceDataset current;
    std::ptrdiff_t cached_key = -1;
    const auto trace_of = [&](std::size_t vi, std::size_t id_pos, int rep) -> const TraceDataset& {
        if (generative) {
            current = synthesize_for(cfg, plan, rep, static_cast<std::ptrdiff_t>(vi),
                                     ids[id_pos]);
            return current;
        }
        const auto key = static_cast<std::ptrdiff_t>(id_pos * 131071 +
                                                     static_cast<std::size_t>(rep));
        if (key != cached_key) {
            current = synthesize_for(cfg, plan, rep, -1, ids[id_pos]);
            cached_key = key;
        }
        return current;
    };
    return assemble_sweep(cfg, plan, ids, trace_of);
}

SweepReport run_sweep(const SweepConfig& cfg, const io::DatasetRefs& datasets) {
    if (cfg.variable == SweepVariable::AttackIntensity)
        throw std::invalid_argument(
            "AttackIntensity is generative and cannot be swept over ingested traces");
    if (datasets.empty())
        throw std::invalid_argument("run_sweep: no datasets");
    const SweepPlan plan = make_plan(cfg);
    std::vector<std::size_t> ids(datasets.size());
    for (std::size_t i = 0; i < ids.size(); ++i)
        ids[i] = i;
    const auto trace_of = [&](std::size_t, std::size_t id_pos, int) -> const TraceDataset& {
        return *datasets[id_pos];
    };
    return assemble_sweep(cfg, plan, ids, trace_of);
}

SweepRow rerun_point(const SweepConfig& cfg, double value, std::size_t classifier_index,
                     std::size_t dataset_index, int repetition) {
    const SweepPlan plan = make_plan(cfg);
    const auto it = std::find(cfg.values.begin(), cfg.values.end(), value);
    if (it == cfg.values.end())
        throw std::invalid_argument("rerun_point: value not in the sweep");
    const auto vi = static_cast<std::size_t>(it - cfg.values.begin());
    const bool generative = cfg.variable == SweepVariable::AttackIntensity;
    const TraceDataset trace =
        synthesize_for(cfg, plan, repetition,
                       generative ? static_cast<std::ptrdiff_t>(vi) : -1, dataset_index);
    const std::uint64_t rep_seed =
        derive_seed(cfg.seed, kRepStream, static_cast<std::uint64_t>(repetition));
    return evaluate_point(trace, cfg, value, plan.classifiers.at(classifier_index),
                          plan.labels.at(classifier_index), dataset_index, rep_seed,
                          fit_seed_for(cfg, repetition, vi, classifier_index, dataset_index));
}

std::vector<AggregateRow> aggregate(const SweepReport& report) {
    if (report.rows.empty())
        throw std::invalid_argument("aggregate: empty report");
    // Keyed by (value, classifier) in first-appearance order.
    std::vector<AggregateRow> rows;
    std::map<std::pair<double, std::string>, std::size_t> index;
    for (const SweepRow& r : report.rows) {
        const auto key = std::make_pair(r.value, r.classifier);
        auto [it, inserted] = index.try_emplace(key, rows.size());
        if (inserted) {
            AggregateRow agg;
            agg.value = r.value;
            agg.classifier = r.classifier;
            agg.min = std::numeric_limits<double>::infinity();
            agg.max = -std::numeric_limits<double>::infinity();
            rows.push_back(agg);
        }
        AggregateRow& agg = rows[it->second];
        if (std::isnan(r.accuracy))
            continue;
        agg.mean += r.accuracy;
        agg.min = std::min(agg.min, r.accuracy);
        agg.max = std::max(agg.max, r.accuracy);
        ++agg.count;
    }
    for (AggregateRow& agg : rows) {
        if (agg.count > 0) {
            agg.mean /= static_cast<double>(agg.count);
        } else {
            agg.mean = agg.min = agg.max = std::nan("");
        }
    }
    std::sort(rows.begin(), rows.end(), [](const AggregateRow& a, const AggregateRow& b) {
        return a.value < b.value || (a.value == b.value && a.classifier < b.classifier);
    });
    return rows;
}

void write_report_csv(const SweepReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << "variable,value,classifier,dataset,seed,accuracy\n";
    for (const SweepRow& r : report.rows) {
        out << to_string(report.variable) << ',' << format_double_shortest(r.value) << ','
            << r.classifier << ',' << r.dataset << ',' << r.seed << ','
            << (std::isnan(r.accuracy) ? std::string("nan")
                                       : format_double_shortest(r.accuracy))
            << '\n';
    }
}

SweepReport parse_report_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "variable,value,classifier,dataset,seed,accuracy")
        throw std::runtime_error(path.string() + ": bad sweep CSV header");
    SweepReport report;
    bool have_variable = false;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ','))
            f.push_back(tok);
        if (f.size() != 6)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected 6 fields");
        const auto variable = sweep_variable_from_name(f[0]);
        if (!variable)
            throw std::runtime_error(path.string() + ": unknown sweep variable " + f[0]);
        if (!have_variable) {
            report.variable = *variable;
            have_variable = true;
        } else if (*variable != report.variable) {
            throw std::runtime_error(path.string() + ": mixed sweep variables");
        }
        SweepRow row;
        const auto value = parse_double(f[1]);
        const auto dataset = parse_int(f[3]);
        const auto seed = parse_int(f[4]);
        if (!value || !dataset || !seed)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": bad numeric field");
        row.value = *value;
        row.classifier = f[2];
        row.dataset = static_cast<std::size_t>(*dataset);
        row.seed = static_cast<std::uint64_t>(*seed);
        if (f[5] == "nan") {
            row.accuracy = std::nan("");
        } else {
            const auto acc = parse_double(f[5]);
            if (!acc)
                throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                         ": bad accuracy");
            row.accuracy = *acc;
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

void write_aggregate_csv(const std::vector<AggregateRow>& rows, SweepVariable variable,
                         const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << "variable,value,classifier,mean_accuracy,min_accuracy,max_accuracy,count\n";
    for (const AggregateRow& r : rows) {
        const auto fmt = [](double v) {
            return std::isnan(v) ? std::string("nan") : format_double_shortest(v);
        };
        out << to_string(variable) << ',' << format_double_shortest(r.value) << ','
            << r.classifier << ',' << fmt(r.mean) << ',' << fmt(r.min) << ',' << fmt(r.max)
            << ',' << r.count << '\n';
    }
}

void write_plot_svg(const SweepReport& report, const std::filesystem::path& path) {
    const auto aggs = aggregate(report);
    std::vector<std::string> classifiers;
    std::vector<double> values;
    for (const AggregateRow& r : aggs) {
        if (std::find(classifiers.begin(), classifiers.end(), r.classifier) == classifiers.end())
            classifiers.push_back(r.classifier);
        if (std::find(values.begin(), values.end(), r.value) == values.end())
            values.push_back(r.value);
    }
    std::sort(values.begin(), values.end());
    std::sort(classifiers.begin(), classifiers.end());

    const double width = 720, height = 480;
    const double left = 70, right = 190, top = 40, bottom = 50;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    const double vmin = values.front();
    const double vmax = values.back();
    const double span = vmax > vmin ? vmax - vmin : 1.0;
    const auto x_of = [&](double v) { return left + (v - vmin) / span * plot_w; };
    const auto y_of = [&](double a) { return top + (1.0 - a) * plot_h; };

    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << left << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">"
        << "accuracy vs " << to_string(report.variable) << "</text>\n";
    // Axes and horizontal grid.
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << top + plot_h << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
        << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
    for (int g = 0; g <= 10; g += 2) {
        const double a = g / 10.0;
        out << "<line x1=\"" << left << "\" y1=\"" << y_of(a) << "\" x2=\"" << left + plot_w
            << "\" y2=\"" << y_of(a) << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << left - 8 << "\" y=\"" << y_of(a) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << format_double_shortest(a) << "</text>\n";
    }
    for (double v : values) {
        out << "<text x=\"" << x_of(v) << "\" y=\"" << top + plot_h + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << format_double_shortest(v) << "</text>\n";
    }
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << to_string(report.variable) << "</text>\n";

    for (std::size_t c = 0; c < classifiers.size(); ++c) {
        const char* color = palette[c % std::size(palette)];
        std::string points;
        for (double v : values) {
            for (const AggregateRow& r : aggs) {
                if (r.classifier == classifiers[c] && r.value == v && !std::isnan(r.mean)) {
                    points += format_double_shortest(x_of(v)) + "," +
                              format_double_shortest(y_of(r.mean)) + " ";
                    break;
                }
            }
        }
        out << "<polyline data-family=\"" << classifiers[c] << "\" fill=\"none\" stroke=\""
            << color << "\" stroke-width=\"1.8\" points=\"" << points << "\"/>\n";
        const double ly = top + 16 + 18 * static_cast<double>(c);
        out << "<line x1=\"" << left + plot_w + 12 << "\" y1=\"" << ly - 4 << "\" x2=\""
            << left + plot_w + 34 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
            << "\" stroke-width=\"1.8\"/>\n";
        out << "<text x=\"" << left + plot_w + 40 << "\" y=\"" << ly
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << classifiers[c]
            << "</text>\n";
    }
    out << "</svg>\n";
}

} // namespace chanauth::harness
