#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "chanauth/classifiers/model.hpp"
#include "chanauth/dataset_io.hpp"
#include "chanauth/preprocess.hpp"

namespace chanauth::grid {

/// A family's Cartesian hyperparameter space: ordered axes of ordered
/// option strings.
struct HyperGrid {
    ml::Family family = ml::Family::Sgd;
    std::vector<std::pair<std::string, std::vector<std::string>>> axes;
};

/// The built-in search space of one family (the full published grid; GNB's
/// is empty and enumerates to a single parameterless spec).
HyperGrid default_grid(ml::Family family);

std::size_t grid_size(const HyperGrid& grid);

/// Full Cartesian product in odometer order, last axis fastest. Throws on
/// an empty axis; a grid with no axes yields one empty spec.
std::vector<ml::ClassifierSpec> enumerate_grid(const HyperGrid& grid);

/// Fraction of positions where prediction and truth agree.
double accuracy(const std::vector<TransmitterLabel>& y_pred,
                const std::vector<TransmitterLabel>& y_true);

using FitFn = std::function<ml::ModelPtr(const ml::ClassifierSpec&, const prep::FeatureMatrix&,
                                         std::uint64_t)>;

/// Score disqualified configs carry instead of aborting the search.
inline constexpr double kDisqualified = -1.0;

/// Mean accuracy of one config across the validation datasets: per dataset
/// run the preprocessing pipeline, fit on the training split, predict the
/// evaluation split. Any pipeline or fit failure yields kDisqualified.
double score_config(const ml::ClassifierSpec& spec, const io::DatasetRefs& validation,
                    const prep::PreprocessConfig& ppcfg, std::uint64_t seed,
                    const FitFn& fit = {});

struct SearchResult {
    ml::ClassifierSpec best_spec; ///< first config attaining best_score
    double best_score = kDisqualified;
    std::vector<std::pair<ml::ClassifierSpec, double>> per_config_scores;
};

struct SearchOptions {
    /// Keep only every stride-th config of the enumeration (1 = full grid).
    std::size_t subsample_stride = 1;
    /// Model factory; defaults to ml::fit_model. Tests plant stubs here.
    FitFn fit;
};

/// Exhaustive search: scores every enumerated spec, returns the first
/// maximum in enumeration order plus the full score table. Throws when
/// every config is disqualified.
SearchResult grid_search(const HyperGrid& grid, const io::DatasetRefs& validation,
                         const prep::PreprocessConfig& ppcfg, std::uint64_t seed,
                         const SearchOptions& options = {});

/// The published per-family optima (plus the parameterless GNB), in family
/// declaration order. LDA is listed with both accepted solvers; the svd
/// entry is the default pick.
std::vector<ml::ClassifierSpec> reference_optima();

/// CSV: header "family,param=value ...,score"; one line per scored config.
void write_scores_csv(const SearchResult& result, const std::filesystem::path& path);
/// One serialized best spec plus its score.
void write_best_summary(const SearchResult& result, const std::filesystem::path& path);

} // namespace chanauth::grid
