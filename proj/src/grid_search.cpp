#include "chanauth/grid_search.hpp"

#include <fstream>
#include <stdexcept>

#include "chanauth/numeric_io.hpp"
#include "chanauth/rng.hpp"

namespace chanauth::grid {

HyperGrid default_grid(ml::Family family) {
    HyperGrid grid;
    grid.family = family;
    switch (family) {
    case ml::Family::Sgd:
        grid.axes = {
            {"loss", {"hinge", "log", "modified_huber", "squared_hinge", "perceptron"}},
            {"penalty", {"none", "l2", "l1", "elasticnet"}},
            {"alpha", {"1e-06", "1e-05", "1e-04", "1e-03", "1e-02"}},
            {"l1_ratio", {"0", "0.25", "0.5", "0.75", "1"}},
            {"max_iter", {"1", "10", "100", "1000", "10000"}},
            {"tol", {"1e-05", "1e-04", "1e-03", "1e-02", "1e-01"}},
            {"learning_rate", {"constant", "optimal", "invscaling", "adaptive"}},
            {"eta0", {"0.25", "0.5", "0.75", "1"}},
        };
        break;
    case ml::Family::Perceptron:
        grid.axes = {
            {"penalty", {"none", "l2", "l1", "elasticnet"}},
            {"alpha", {"1e-06", "1e-05", "1e-04", "1e-03", "1e-02"}},
            {"max_iter", {"1", "10", "100", "1000", "10000"}},
            {"tol", {"1e-05", "1e-04", "1e-03", "1e-02", "1e-01"}},
        };
        break;
    case ml::Family::PassiveAggressive:
        grid.axes = {
            {"C", {"0.01", "0.1", "1", "10", "100"}},
            {"max_iter", {"1", "10", "100", "1000", "10000"}},
            {"tol", {"1e-05", "1e-04", "1e-03", "1e-02", "1e-01"}},
            {"loss", {"hinge", "squared_hinge"}},
        };
        break;
    case ml::Family::RandomForest:
        grid.axes = {
            {"n_estimators", {"1", "10", "100", "1000", "10000"}},
            {"criterion", {"gini", "entropy"}},
            {"min_samples_split", {"1", "2", "3", "4", "5"}},
            {"min_samples_leaf", {"1", "2", "3", "4", "5"}},
            {"max_features", {"none", "auto", "sqrt", "log2"}},
        };
        break;
    case ml::Family::KNeighbors:
        grid.axes = {
            {"n_neighbors", {"2", "4", "6", "8", "10"}},
            {"algorithm", {"auto", "ball_tree", "kd_tree", "brute"}},
            {"leaf_size", {"10", "20", "30", "40", "50"}},
            {"p", {"1", "2", "3", "4", "5"}},
        };
        break;
    case ml::Family::Svc:
        grid.axes = {
            {"C", {"0.01", "0.1", "1", "10", "100"}},
            {"kernel", {"linear", "poly", "rbf", "sigmoid"}},
            {"degree", {"1", "2", "3", "4", "5"}},
            {"tol", {"1e-05", "1e-04", "1e-03", "1e-02", "1e-01"}},
            {"max_iter", {"1", "10", "100", "1000", "10000"}},
        };
        break;
    case ml::Family::Lda:
        grid.axes = {
            {"solver", {"svd", "lsqr"}},
            {"tol", {"1e-05", "1e-04", "1e-03", "1e-02", "1e-01"}},
            {"shrinkage", {"none", "auto"}},
        };
        break;
    case ml::Family::Gnb:
        grid.axes = {};
        break;
    }
    return grid;
}

std::size_t grid_size(const HyperGrid& grid) {
    std::size_t size = 1;
    for (std::size_t a = 0; a < grid.axes.size(); ++a) {
        const auto& [name, options] = grid.axes[a];
        if (options.empty())
            throw std::invalid_argument("grid axis '" + name + "' has no options");
        for (std::size_t b = 0; b < a; ++b)
            if (grid.axes[b].first == name)
                throw std::invalid_argument("duplicate grid axis '" + name + "'");
        size *= options.size();
    }
    return size;
}

std::vector<ml::ClassifierSpec> enumerate_grid(const HyperGrid& grid) {
    const std::size_t total = grid_size(grid);
    const std::size_t n_axes = grid.axes.size();
    std::vector<ml::ClassifierSpec> specs;
    specs.reserve(total);
    std::vector<std::size_t> odo(n_axes, 0);
    for (std::size_t c = 0; c < total; ++c) {
        ml::ClassifierSpec spec;
        spec.family = grid.family;
        spec.params.reserve(n_axes);
        for (std::size_t a = 0; a < n_axes; ++a)
            spec.params.emplace_back(grid.axes[a].first, grid.axes[a].second[odo[a]]);
        specs.push_back(std::move(spec));
        for (std::size_t a = n_axes; a-- > 0;) { // last axis fastest
            if (++odo[a] < grid.axes[a].second.size())
                break;
            odo[a] = 0;
        }
    }
    return specs;
}

double accuracy(const std::vector<TransmitterLabel>& y_pred,
                const std::vector<TransmitterLabel>& y_true) {
    if (y_pred.size() != y_true.size())
        throw std::invalid_argument("accuracy: length mismatch");
    if (y_pred.empty())
        throw std::invalid_argument("accuracy: empty input");
    std::size_t match = 0;
    for (std::size_t i = 0; i < y_pred.size(); ++i)
        match += y_pred[i] == y_true[i];
    return static_cast<double>(match) / static_cast<double>(y_pred.size());
}

double score_config(const ml::ClassifierSpec& spec, const io::DatasetRefs& validation,
                    const prep::PreprocessConfig& ppcfg, std::uint64_t seed, const FitFn& fit) {
    if (validation.empty())
        throw std::invalid_argument("score_config: no validation datasets");
    static const FitFn default_fit =
        [](const ml::ClassifierSpec& s, const prep::FeatureMatrix& train, std::uint64_t sd) {
            return ml::fit_model(s, train, sd);
        };
    const FitFn& fitter = fit ? fit : default_fit;
    double sum = 0.0;
    for (std::size_t d = 0; d < validation.size(); ++d) {
        try {
            const auto pipe = prep::run_pipeline(*validation[d], ppcfg);
            const auto model = fitter(spec, pipe.train, derive_seed(seed, d));
            const auto pred = ml::predict(*model, pipe.eval);
            sum += accuracy(pred, pipe.eval.labels);
        } catch (const std::exception&) {
            return kDisqualified;
        }
    }
    return sum / static_cast<double>(validation.size());
}

SearchResult grid_search(const HyperGrid& grid, const io::DatasetRefs& validation,
                         const prep::PreprocessConfig& ppcfg, std::uint64_t seed,
                         const SearchOptions& options) {
    const std::size_t stride = std::max<std::size_t>(1, options.subsample_stride);
    auto specs = enumerate_grid(grid);
    SearchResult result;
    bool any_qualified = false;
    for (std::size_t i = 0; i < specs.size(); i += stride) {
        const double score = score_config(specs[i], validation, ppcfg, seed, options.fit);
        any_qualified = any_qualified || score > kDisqualified;
        if (score > result.best_score) { // strict: first maximum wins ties
            result.best_score = score;
            result.best_spec = specs[i];
        }
        result.per_config_scores.emplace_back(std::move(specs[i]), score);
    }
    if (!any_qualified)
        throw std::runtime_error("grid_search: every configuration was disqualified");
    return result;
}

std::vector<ml::ClassifierSpec> reference_optima() {
    using ml::parse_spec;
    return {
        parse_spec("SGDClassifier loss=log penalty=elasticnet alpha=1e-02 l1_ratio=1 "
                   "max_iter=10000 tol=1e-05 learning_rate=adaptive eta0=0.5"),
        parse_spec("PassiveAgressiveClassifier C=0.1 max_iter=1 tol=1e-05 loss=hinge"),
        parse_spec("RandomForestClassifier n_estimators=100 criterion=entropy "
                   "min_samples_split=3 min_samples_leaf=1 max_features=log2"),
        parse_spec("KNeighborsClassifier n_neighbors=2 algorithm=auto leaf_size=10 p=2"),
        parse_spec("SVC C=0.1 kernel=linear degree=1 tol=1e-05 max_iter=10"),
        // Both solvers are accepted optima; lsqr is the default pick since
        // the shrunken covariance only acts on that path.
        parse_spec("LinearDiscriminantAnalysis solver=lsqr tol=1e-05 shrinkage=auto"),
        parse_spec("GaussianNB"),
    };
}

void write_scores_csv(const SearchResult& result, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << "family";
    if (!result.per_config_scores.empty())
        for (const auto& [name, value] : result.per_config_scores.front().first.params)
            out << ',' << name;
    out << ",score\n";
    for (const auto& [spec, score] : result.per_config_scores) {
        out << family_name(spec.family);
        for (const auto& [name, value] : spec.params)
            out << ',' << value;
        out << ',' << format_double_shortest(score) << '\n';
    }
}

void write_best_summary(const SearchResult& result, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << to_string(result.best_spec) << '\n'
        << "score=" << format_double_shortest(result.best_score) << '\n';
}

} // namespace chanauth::grid
