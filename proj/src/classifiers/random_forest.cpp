#include "chanauth/classifiers/random_forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chanauth/rng.hpp"

namespace chanauth::ml {

double gini_impurity(std::size_t n_bob, std::size_t n_eve) {
    const double n = static_cast<double>(n_bob + n_eve);
    if (n == 0.0)
        return 0.0;
    const double pb = static_cast<double>(n_bob) / n;
    const double pe = static_cast<double>(n_eve) / n;
    return 1.0 - pb * pb - pe * pe;
}

double entropy_impurity(std::size_t n_bob, std::size_t n_eve) {
    const double n = static_cast<double>(n_bob + n_eve);
    if (n == 0.0)
        return 0.0;
    double h = 0.0;
    for (std::size_t c : {n_bob, n_eve}) {
        if (c == 0)
            continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

namespace {

struct TreeNode {
    int feature = -1; ///< -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    TransmitterLabel leaf = TransmitterLabel::Bob;
};

struct Tree {
    std::vector<TreeNode> nodes;

    TransmitterLabel predict(const Eigen::RowVectorXd& x) const {
        int at = 0;
        while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
            const TreeNode& n = nodes[static_cast<std::size_t>(at)];
            at = x[n.feature] <= n.threshold ? n.left : n.right;
        }
        return nodes[static_cast<std::size_t>(at)].leaf;
    }
};

struct ForestSettings {
    int n_estimators = 1;
    bool entropy = false;
    int min_samples_split = 2;
    int min_samples_leaf = 1;
    int max_features = 0; ///< 0 = all
    bool bootstrap = true;
};

using Impurity = double (*)(std::size_t, std::size_t);

struct TreeBuilder {
    const Eigen::MatrixXd& x;
    const std::vector<TransmitterLabel>& labels;
    const ForestSettings& s;
    Impurity impurity;
    Rng& rng;
    Tree tree;

    std::size_t count_eve(const std::vector<Eigen::Index>& idx) const {
        std::size_t eve = 0;
        for (Eigen::Index i : idx)
            eve += labels[static_cast<std::size_t>(i)] == TransmitterLabel::Eve;
        return eve;
    }

    int make_leaf(std::size_t n_bob, std::size_t n_eve) {
        TreeNode node;
        node.leaf = n_eve > n_bob ? TransmitterLabel::Eve : TransmitterLabel::Bob;
        tree.nodes.push_back(node);
        return static_cast<int>(tree.nodes.size() - 1);
    }

    /// Draws the node's candidate feature subset (without replacement).
    std::vector<int> draw_features() {
        const int d = static_cast<int>(x.cols());
        const int want = s.max_features == 0 ? d : std::min(s.max_features, d);
        std::vector<int> pool(static_cast<std::size_t>(d));
        std::iota(pool.begin(), pool.end(), 0);
        if (want >= d)
            return pool;
        for (int i = 0; i < want; ++i) {
            const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(d - i)));
            std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        }
        pool.resize(static_cast<std::size_t>(want));
        return pool;
    }

    int grow(std::vector<Eigen::Index> idx) {
        const std::size_t n = idx.size();
        const std::size_t eve = count_eve(idx);
        const std::size_t bob = n - eve;
        if (eve == 0 || bob == 0 || n < static_cast<std::size_t>(s.min_samples_split))
            return make_leaf(bob, eve);

        const double parent_impurity = impurity(bob, eve);
        double best_gain = 0.0;
        int best_feature = -1;
        double best_threshold = 0.0;

        std::vector<std::pair<double, Eigen::Index>> order(n);
        for (const int feature : draw_features()) {
            for (std::size_t i = 0; i < n; ++i)
                order[i] = {x(idx[i], feature), idx[i]};
            std::sort(order.begin(), order.end());
            std::size_t left_eve = 0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                left_eve += labels[static_cast<std::size_t>(order[i].second)] ==
                            TransmitterLabel::Eve;
                if (order[i].first == order[i + 1].first)
                    continue; // no threshold separates equal values
                const std::size_t n_left = i + 1;
                const std::size_t n_right = n - n_left;
                if (n_left < static_cast<std::size_t>(s.min_samples_leaf) ||
                    n_right < static_cast<std::size_t>(s.min_samples_leaf))
                    continue;
                const std::size_t right_eve = eve - left_eve;
                const double child =
                    (static_cast<double>(n_left) * impurity(n_left - left_eve, left_eve) +
                     static_cast<double>(n_right) * impurity(n_right - right_eve, right_eve)) /
                    static_cast<double>(n);
                const double gain = parent_impurity - child;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = feature;
                    best_threshold = 0.5 * (order[i].first + order[i + 1].first);
                }
            }
        }

        if (best_feature < 0)
            return make_leaf(bob, eve);

        std::vector<Eigen::Index> left, right;
        for (Eigen::Index i : idx)
            (x(i, best_feature) <= best_threshold ? left : right).push_back(i);
        if (left.empty() || right.empty())
            return make_leaf(bob, eve); // numeric midpoint collapsed onto one side

        tree.nodes.emplace_back();
        const int at = static_cast<int>(tree.nodes.size() - 1);
        tree.nodes[static_cast<std::size_t>(at)].feature = best_feature;
        tree.nodes[static_cast<std::size_t>(at)].threshold = best_threshold;
        const int l = grow(std::move(left));
        const int r = grow(std::move(right));
        tree.nodes[static_cast<std::size_t>(at)].left = l;
        tree.nodes[static_cast<std::size_t>(at)].right = r;
        return at;
    }
};

class ForestModel final : public FittedModel {
  public:
    ForestModel(std::vector<Tree> trees, Eigen::Index dim)
        : trees_(std::move(trees)), dim_(dim) {}

    Family family() const override { return Family::RandomForest; }
    Eigen::Index input_dim() const override { return dim_; }

    std::vector<TransmitterLabel> predict(const prep::FeatureMatrix& eval) const override {
        std::vector<TransmitterLabel> out;
        out.reserve(static_cast<std::size_t>(eval.size()));
        for (Eigen::Index i = 0; i < eval.size(); ++i) {
            std::size_t eve = 0;
            for (const Tree& t : trees_)
                eve += t.predict(eval.rows.row(i)) == TransmitterLabel::Eve;
            out.push_back(2 * eve > trees_.size() ? TransmitterLabel::Eve
                                                  : TransmitterLabel::Bob);
        }
        return out;
    }

  private:
    std::vector<Tree> trees_;
    Eigen::Index dim_;
};

} // namespace

ModelPtr fit_random_forest(const ClassifierSpec& spec, const prep::FeatureMatrix& train,
                           std::uint64_t seed) {
    detail::require_two_classes(train, "random-forest");
    detail::require_finite(train, "random-forest");

    ForestSettings s;
    s.n_estimators = detail::param_int(spec, "n_estimators", 1);
    s.entropy = detail::param_str(spec, "criterion", "gini") == "entropy";
    s.min_samples_split = std::max(2, detail::param_int(spec, "min_samples_split", 2));
    s.min_samples_leaf = std::max(1, detail::param_int(spec, "min_samples_leaf", 1));
    s.bootstrap = detail::param_str(spec, "bootstrap", "true") == "true";
    const std::string mf = detail::param_str(spec, "max_features", "none");
    const double d = static_cast<double>(train.rows.cols());
    if (mf == "none")
        s.max_features = 0;
    else if (mf == "auto" || mf == "sqrt")
        s.max_features = static_cast<int>(std::ceil(std::sqrt(d)));
    else if (mf == "log2")
        s.max_features = std::max(1, static_cast<int>(std::ceil(std::log2(d))));
    if (s.n_estimators < 1)
        throw std::invalid_argument("n_estimators must be at least 1");

    const Eigen::Index n = train.size();
    const Impurity impurity = s.entropy ? entropy_impurity : gini_impurity;
    std::vector<Tree> trees;
    trees.reserve(static_cast<std::size_t>(s.n_estimators));
    for (int t = 0; t < s.n_estimators; ++t) {
        Rng rng(derive_seed(seed, 0xf03e5707c4a2b911ULL, static_cast<std::uint64_t>(t)));
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
        if (s.bootstrap) {
            for (auto& i : idx)
                i = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
        } else {
            std::iota(idx.begin(), idx.end(), Eigen::Index{0});
        }
        TreeBuilder builder{train.rows, train.labels, s, impurity, rng, {}};
        builder.grow(std::move(idx));
        trees.push_back(std::move(builder.tree));
    }
    return std::make_unique<ForestModel>(std::move(trees), train.rows.cols());
}

} // namespace chanauth::ml
