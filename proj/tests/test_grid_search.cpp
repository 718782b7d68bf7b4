#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "chanauth/channel_sim.hpp"
#include "chanauth/grid_search.hpp"
#include "chanauth/rng.hpp"

using namespace chanauth;
using namespace chanauth::grid;

namespace {

/// Test stub: predicts the row's own label (it can see them on the eval
/// FeatureMatrix), i.e. a perfect oracle.
class OracleStub final : public ml::FittedModel {
  public:
    explicit OracleStub(Eigen::Index dim) : dim_(dim) {}
    ml::Family family() const override { return ml::Family::Gnb; }
    Eigen::Index input_dim() const override { return dim_; }
    std::vector<TransmitterLabel> predict(const prep::FeatureMatrix& eval) const override {
        return eval.labels;
    }

  private:
    Eigen::Index dim_;
};

/// Test stub: always answers the majority label of its training set.
class MajorityStub final : public ml::FittedModel {
  public:
    MajorityStub(Eigen::Index dim, TransmitterLabel majority) : dim_(dim), majority_(majority) {}
    ml::Family family() const override { return ml::Family::Gnb; }
    Eigen::Index input_dim() const override { return dim_; }
    std::vector<TransmitterLabel> predict(const prep::FeatureMatrix& eval) const override {
        return std::vector<TransmitterLabel>(static_cast<std::size_t>(eval.size()), majority_);
    }

  private:
    Eigen::Index dim_;
    TransmitterLabel majority_;
};

TransmitterLabel majority_of(const std::vector<TransmitterLabel>& labels) {
    const auto eve = static_cast<std::size_t>(
        std::count(labels.begin(), labels.end(), TransmitterLabel::Eve));
    return 2 * eve > labels.size() ? TransmitterLabel::Eve : TransmitterLabel::Bob;
}

std::vector<TraceDataset> make_validation(std::uint64_t seed, int n_packets = 600) {
    sim::ScenarioConfig sc;
    sc.n_packets = n_packets;
    sc.seed = seed;
    sc.attack_intensity = 0.25;
    sc.bob_link = {{0, 3, 7}, {0.5, 0.3, 0.2}, 0.9999, 0};
    sc.eve_link = {{0, 2, 5, 9, 13}, {0.35, 0.25, 0.2, 0.12, 0.08}, 0.9999, 1};
    std::vector<TraceDataset> out;
    out.push_back(sim::synthesize_trace(sc));
    sc.seed = seed + 1;
    out.push_back(sim::synthesize_trace(sc));
    return out;
}

io::DatasetRefs refs_of(const std::vector<TraceDataset>& v) {
    io::DatasetRefs refs;
    for (const auto& ds : v)
        refs.push_back(&ds);
    return refs;
}

const prep::PreprocessConfig kPp{48, prep::Reduction::Mean, 5, 10};

} // namespace

TEST_CASE("enumerate_grid walks the product in odometer order") {
    HyperGrid grid;
    grid.family = ml::Family::Gnb;
    grid.axes = {{"a", {"1", "2"}}, {"b", {"x", "y", "z"}}};
    const auto specs = enumerate_grid(grid);
    REQUIRE(specs.size() == 6);
    CHECK(to_string(specs[0]) == "GaussianNB a=1 b=x");
    CHECK(to_string(specs[1]) == "GaussianNB a=1 b=y");
    CHECK(to_string(specs[2]) == "GaussianNB a=1 b=z");
    CHECK(to_string(specs[3]) == "GaussianNB a=2 b=x");
    CHECK(to_string(specs[5]) == "GaussianNB a=2 b=z");
}

TEST_CASE("the full sgd grid enumerates the published option-count product") {
    const auto grid = default_grid(ml::Family::Sgd);
    // Published option counts per axis: loss 5, penalty 4, alpha 5,
    // l1_ratio 5, max_iter 5, tol 5, learning_rate 4, eta0 4.
    const std::size_t counts[] = {5, 4, 5, 5, 5, 5, 4, 4};
    REQUIRE(grid.axes.size() == std::size(counts));
    std::size_t expected = 1;
    for (std::size_t a = 0; a < grid.axes.size(); ++a) {
        CHECK(grid.axes[a].second.size() == counts[a]);
        expected *= counts[a];
    }
    CHECK(expected == 200000);
    CHECK(grid_size(grid) == expected);
    const auto specs = enumerate_grid(grid);
    CHECK(specs.size() == expected);
    // spot checks: first config is all-first options, last is all-last
    CHECK(to_string(specs.front()) ==
          "SGDClassifier loss=hinge penalty=none alpha=1e-06 l1_ratio=0 max_iter=1 tol=1e-05 "
          "learning_rate=constant eta0=0.25");
    CHECK(to_string(specs.back()) ==
          "SGDClassifier loss=perceptron penalty=elasticnet alpha=1e-02 l1_ratio=1 "
          "max_iter=10000 tol=1e-01 learning_rate=adaptive eta0=1");
}

TEST_CASE("published grid sizes for the remaining families") {
    CHECK(grid_size(default_grid(ml::Family::Perceptron)) == 500);
    CHECK(grid_size(default_grid(ml::Family::PassiveAggressive)) == 250);
    CHECK(grid_size(default_grid(ml::Family::RandomForest)) == 1000);
    CHECK(grid_size(default_grid(ml::Family::KNeighbors)) == 500);
    CHECK(grid_size(default_grid(ml::Family::Svc)) == 2500);
    CHECK(grid_size(default_grid(ml::Family::Lda)) == 20);
    CHECK(grid_size(default_grid(ml::Family::Gnb)) == 1);
}

TEST_CASE("a single-axis grid reproduces its options") {
    HyperGrid grid;
    grid.family = ml::Family::Lda;
    grid.axes = {{"solver", {"svd", "lsqr"}}};
    const auto specs = enumerate_grid(grid);
    REQUIRE(specs.size() == 2);
    CHECK(*specs[0].find("solver") == "svd");
    CHECK(*specs[1].find("solver") == "lsqr");
}

TEST_CASE("an empty axis is rejected, an axis-free grid yields one spec") {
    HyperGrid bad;
    bad.axes = {{"a", {}}};
    CHECK_THROWS_AS(enumerate_grid(bad), std::invalid_argument);
    HyperGrid dup;
    dup.axes = {{"a", {"1"}}, {"a", {"2"}}};
    CHECK_THROWS_AS(enumerate_grid(dup), std::invalid_argument);
    HyperGrid none;
    none.family = ml::Family::Gnb;
    const auto specs = enumerate_grid(none);
    REQUIRE(specs.size() == 1);
    CHECK(specs[0].params.empty());
}

TEST_CASE("accuracy metric") {
    using L = TransmitterLabel;
    const std::vector<L> a = {L::Bob, L::Eve, L::Bob, L::Bob};
    const std::vector<L> b = {L::Bob, L::Eve, L::Eve, L::Bob};
    const std::vector<L> not_a = {L::Eve, L::Bob, L::Eve, L::Eve};
    CHECK(accuracy(a, a) == 1.0);
    CHECK(accuracy(a, not_a) == 0.0);
    CHECK(accuracy(b, a) == doctest::Approx(0.75));
    CHECK_THROWS_AS(accuracy(a, {L::Bob}), std::invalid_argument);
    CHECK_THROWS_AS(accuracy({}, {}), std::invalid_argument);
}

TEST_CASE("accuracy equals one minus normalized hamming distance") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.below(200));
        std::vector<TransmitterLabel> a(n), b(n);
        std::size_t hamming = 0;
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = rng.uniform() < 0.5 ? TransmitterLabel::Eve : TransmitterLabel::Bob;
            b[i] = rng.uniform() < 0.5 ? TransmitterLabel::Eve : TransmitterLabel::Bob;
            hamming += a[i] != b[i];
        }
        CHECK(accuracy(a, b) ==
              doctest::Approx(1.0 - static_cast<double>(hamming) / static_cast<double>(n)));
    }
}

TEST_CASE("score_config with the majority stub equals the eval label frequency") {
    const auto validation = make_validation(55);
    const FitFn majority_fit = [](const ml::ClassifierSpec&, const prep::FeatureMatrix& train,
                                  std::uint64_t) -> ml::ModelPtr {
        return std::make_unique<MajorityStub>(train.feature_dim(), majority_of(train.labels));
    };
    const double score =
        score_config(ml::parse_spec("GaussianNB"), refs_of(validation), kPp, 1, majority_fit);

    // Label-frequency oracle: recompute the majority-vote accuracy per
    // dataset straight from the eval labels.
    double expected = 0.0;
    for (const auto& ds : validation) {
        const auto pipe = prep::run_pipeline(ds, kPp);
        const TransmitterLabel maj = majority_of(pipe.train.labels);
        std::size_t hit = 0;
        for (const TransmitterLabel l : pipe.eval.labels)
            hit += l == maj;
        expected += static_cast<double>(hit) / static_cast<double>(pipe.eval.labels.size());
    }
    expected /= static_cast<double>(validation.size());
    CHECK(score == doctest::Approx(expected));
    CHECK(score == doctest::Approx(0.75).epsilon(0.05)); // P_AI = 0.25 traces
}

TEST_CASE("score_config with a perfect oracle stub scores 1") {
    const auto validation = make_validation(56);
    const FitFn oracle_fit = [](const ml::ClassifierSpec&, const prep::FeatureMatrix& train,
                                std::uint64_t) -> ml::ModelPtr {
        return std::make_unique<OracleStub>(train.feature_dim());
    };
    CHECK(score_config(ml::parse_spec("GaussianNB"), refs_of(validation), kPp, 1, oracle_fit) ==
          1.0);
}

TEST_CASE("a failing config is disqualified with score -1") {
    const auto validation = make_validation(57);
    const FitFn failing_fit = [](const ml::ClassifierSpec&, const prep::FeatureMatrix&,
                                 std::uint64_t) -> ml::ModelPtr {
        throw std::runtime_error("degenerate corner");
    };
    CHECK(score_config(ml::parse_spec("GaussianNB"), refs_of(validation), kPp, 1, failing_fit) ==
          kDisqualified);
}

TEST_CASE("grid search returns the planted perfect stub deterministically") {
    const auto validation = make_validation(58);
    // 12-config toy grid; the stub keyed mode=oracle is the plant.
    HyperGrid grid;
    grid.family = ml::Family::Gnb;
    grid.axes = {{"mode", {"majority", "oracle", "flipped"}}, {"style", {"a", "b", "c", "d"}}};
    const FitFn stub_fit = [](const ml::ClassifierSpec& spec, const prep::FeatureMatrix& train,
                              std::uint64_t) -> ml::ModelPtr {
        const std::string& mode = *spec.find("mode");
        if (mode == "oracle")
            return std::make_unique<OracleStub>(train.feature_dim());
        return std::make_unique<MajorityStub>(train.feature_dim(), majority_of(train.labels));
    };
    SearchOptions options;
    options.fit = stub_fit;
    const SearchResult result = grid_search(grid, refs_of(validation), kPp, 1, options);
    CHECK(result.best_score == 1.0);
    CHECK(*result.best_spec.find("mode") == "oracle");
    CHECK(*result.best_spec.find("style") == "a"); // first maximum in order
    CHECK(result.per_config_scores.size() == 12);

    // rerun: identical outcome
    const SearchResult again = grid_search(grid, refs_of(validation), kPp, 1, options);
    CHECK(to_string(again.best_spec) == to_string(result.best_spec));
    CHECK(again.best_score == result.best_score);
    for (std::size_t i = 0; i < 12; ++i)
        CHECK(again.per_config_scores[i].second == result.per_config_scores[i].second);

    // independent rescore of the winner agrees (no caching drift)
    CHECK(score_config(result.best_spec, refs_of(validation), kPp, 1, stub_fit) ==
          result.best_score);
}

TEST_CASE("extending a grid by dominated configs keeps the same winner") {
    const auto validation = make_validation(59);
    const FitFn stub_fit = [](const ml::ClassifierSpec& spec, const prep::FeatureMatrix& train,
                              std::uint64_t) -> ml::ModelPtr {
        if (*spec.find("mode") == "oracle")
            return std::make_unique<OracleStub>(train.feature_dim());
        return std::make_unique<MajorityStub>(train.feature_dim(), majority_of(train.labels));
    };
    HyperGrid small;
    small.family = ml::Family::Gnb;
    small.axes = {{"mode", {"majority", "oracle"}}};
    HyperGrid extended = small;
    extended.axes[0].second.push_back("weak"); // strictly dominated extra point
    SearchOptions options;
    options.fit = stub_fit;
    const auto a = grid_search(small, refs_of(validation), kPp, 1, options);
    const auto b = grid_search(extended, refs_of(validation), kPp, 1, options);
    CHECK(to_string(a.best_spec) == to_string(b.best_spec));
    CHECK(a.best_score == b.best_score);
}

TEST_CASE("grid_search throws when everything is disqualified") {
    const auto validation = make_validation(60);
    HyperGrid grid;
    grid.family = ml::Family::Gnb;
    grid.axes = {{"mode", {"x", "y"}}};
    SearchOptions options;
    options.fit = [](const ml::ClassifierSpec&, const prep::FeatureMatrix&,
                     std::uint64_t) -> ml::ModelPtr { throw std::runtime_error("nope"); };
    CHECK_THROWS_AS(grid_search(grid, refs_of(validation), kPp, 1, options),
                    std::runtime_error);
}

TEST_CASE("subsampling strides the enumeration deterministically") {
    HyperGrid grid;
    grid.family = ml::Family::Gnb;
    grid.axes = {{"mode", {"a", "b", "c", "d", "e", "f"}}};
    const auto validation = make_validation(61);
    SearchOptions options;
    options.subsample_stride = 3;
    options.fit = [](const ml::ClassifierSpec&, const prep::FeatureMatrix& train,
                     std::uint64_t) -> ml::ModelPtr {
        return std::make_unique<MajorityStub>(train.feature_dim(), TransmitterLabel::Bob);
    };
    const auto result = grid_search(grid, refs_of(validation), kPp, 1, options);
    REQUIRE(result.per_config_scores.size() == 2); // configs 0 and 3
    CHECK(*result.per_config_scores[0].first.find("mode") == "a");
    CHECK(*result.per_config_scores[1].first.find("mode") == "d");
}

TEST_CASE("the sgd search-result record carries the published parameter set") {
    const auto grid = default_grid(ml::Family::Sgd);
    const auto specs = enumerate_grid(grid);
    const std::vector<std::string> expected_keys = {"loss",     "penalty", "alpha",
                                                    "l1_ratio", "max_iter", "tol",
                                                    "learning_rate", "eta0"};
    REQUIRE(specs.front().params.size() == expected_keys.size());
    for (std::size_t i = 0; i < expected_keys.size(); ++i)
        CHECK(specs.front().params[i].first == expected_keys[i]);
    // the published optimum is one of the enumerated configs
    const std::string optimum = "SGDClassifier loss=log penalty=elasticnet alpha=1e-02 "
                                "l1_ratio=1 max_iter=10000 tol=1e-05 learning_rate=adaptive "
                                "eta0=0.5";
    CHECK(std::any_of(specs.begin(), specs.end(),
                      [&](const ml::ClassifierSpec& s) { return to_string(s) == optimum; }));
}

TEST_CASE("score and summary files carry one column per parameter") {
    SearchResult result;
    result.best_spec = ml::parse_spec("LinearDiscriminantAnalysis solver=svd tol=1e-05 "
                                      "shrinkage=none");
    result.best_score = 0.75;
    result.per_config_scores = {{result.best_spec, 0.75},
                                {ml::parse_spec("LinearDiscriminantAnalysis solver=lsqr "
                                                "tol=1e-04 shrinkage=auto"),
                                 0.5}};
    const auto dir = std::filesystem::temp_directory_path();
    const auto scores_path = dir / "chanauth_scores_test.csv";
    const auto best_path = dir / "chanauth_best_test.txt";
    write_scores_csv(result, scores_path);
    write_best_summary(result, best_path);
    std::ifstream in(scores_path);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "family,solver,tol,shrinkage,score");
    REQUIRE(std::getline(in, line));
    CHECK(line == "LinearDiscriminantAnalysis,svd,1e-05,none,0.75");
    REQUIRE(std::getline(in, line));
    CHECK(line == "LinearDiscriminantAnalysis,lsqr,1e-04,auto,0.5");
    std::ifstream best(best_path);
    REQUIRE(std::getline(best, line));
    CHECK(line == "LinearDiscriminantAnalysis solver=svd tol=1e-05 shrinkage=none");
    std::filesystem::remove(scores_path);
    std::filesystem::remove(best_path);
}

TEST_CASE("reference optima parse, validate, and cover the published families") {
    const auto optima = reference_optima();
    REQUIRE(optima.size() == 7);
    for (const auto& spec : optima)
        CHECK_NOTHROW(ml::validate_spec(spec));
    CHECK(optima[0].family == ml::Family::Sgd);
    CHECK(optima[6].family == ml::Family::Gnb);
}
