#include "chanauth/classifiers/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace chanauth::ml {

namespace {

/// Reduced Minkowski distance sum_d |a_d - b_d|^p, monotone in the true
/// distance. Summation runs in dimension order so every backend produces
/// bit-identical values for the same point pair.
double rdist(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b, int p) {
    double acc = 0.0;
    for (Eigen::Index d = 0; d < a.size(); ++d) {
        const double diff = std::abs(a[d] - b[d]);
        switch (p) {
        case 1: acc += diff; break;
        case 2: acc += diff * diff; break;
        default: acc += std::pow(diff, p); break;
        }
    }
    return acc;
}

/// Neighbour candidates ordered by (rdist, training index); the worst of
/// the current k sits on top.
struct Candidate {
    double r;
    Eigen::Index idx;
    bool operator<(const Candidate& o) const { return r < o.r || (r == o.r && idx < o.idx); }
};

class KBest {
  public:
    explicit KBest(std::size_t k) : k_(k) {}

    bool full() const { return heap_.size() == k_; }
    /// Largest accepted (rdist, idx); only valid when full.
    const Candidate& worst() const { return heap_.front(); }

    void offer(Candidate c) {
        if (!full()) {
            heap_.push_back(c);
            std::push_heap(heap_.begin(), heap_.end());
        } else if (c < heap_.front()) {
            std::pop_heap(heap_.begin(), heap_.end());
            heap_.back() = c;
            std::push_heap(heap_.begin(), heap_.end());
        }
    }

    /// Admits nodes whose lower bound equals the current worst distance:
    /// they may hold an equal-distance point with a smaller index.
    bool may_contain(double lower_bound_r) const {
        return !full() || lower_bound_r <= heap_.front().r;
    }

    std::vector<Candidate> sorted() && {
        std::sort(heap_.begin(), heap_.end());
        return std::move(heap_);
    }

  private:
    std::size_t k_;
    std::vector<Candidate> heap_;
};

struct SpaceNode {
    // kd split
    int split_dim = -1;
    double split_val = 0.0;
    // kd bounding box (exact, from the node's points)
    Eigen::VectorXd box_lo, box_hi;
    // ball
    Eigen::RowVectorXd centroid;
    double radius = 0.0;
    int left = -1, right = -1;
    std::vector<Eigen::Index> points; ///< leaf payload
};

enum class Backend { Brute, KdTree, BallTree };

class SpaceTree {
  public:
    SpaceTree(const Eigen::MatrixXd& x, int leaf_size, int p, bool ball)
        : x_(x), p_(p), ball_(ball) {
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(x.rows()));
        std::iota(idx.begin(), idx.end(), Eigen::Index{0});
        root_ = build(std::move(idx), std::max(1, leaf_size));
    }

    void query(const Eigen::RowVectorXd& q, KBest& best) const { search(root_, q, best); }

  private:
    int build(std::vector<Eigen::Index> idx, int leaf_size) {
        SpaceNode node;
        fill_bounds(node, idx);
        if (static_cast<int>(idx.size()) <= leaf_size) {
            node.points = std::move(idx);
            nodes_.push_back(std::move(node));
            return static_cast<int>(nodes_.size() - 1);
        }
        // Split on the dimension of largest spread at the median.
        int dim = 0;
        double spread = -1.0;
        for (Eigen::Index d = 0; d < x_.cols(); ++d) {
            const double s = node.box_hi[d] - node.box_lo[d];
            if (s > spread) {
                spread = s;
                dim = static_cast<int>(d);
            }
        }
        const auto mid = idx.begin() + static_cast<std::ptrdiff_t>(idx.size() / 2);
        std::nth_element(idx.begin(), mid, idx.end(), [&](Eigen::Index a, Eigen::Index b) {
            return x_(a, dim) < x_(b, dim) || (x_(a, dim) == x_(b, dim) && a < b);
        });
        node.split_dim = dim;
        node.split_val = x_(*mid, dim);
        std::vector<Eigen::Index> left(idx.begin(), mid);
        std::vector<Eigen::Index> right(mid, idx.end());
        if (left.empty() || right.empty()) { // all values equal: keep as leaf
            node.split_dim = -1;
            node.points = std::move(idx);
            nodes_.push_back(std::move(node));
            return static_cast<int>(nodes_.size() - 1);
        }
        nodes_.push_back(std::move(node));
        const int at = static_cast<int>(nodes_.size() - 1);
        const int l = build(std::move(left), leaf_size);
        const int r = build(std::move(right), leaf_size);
        nodes_[static_cast<std::size_t>(at)].left = l;
        nodes_[static_cast<std::size_t>(at)].right = r;
        return at;
    }

    void fill_bounds(SpaceNode& node, const std::vector<Eigen::Index>& idx) {
        node.box_lo = x_.row(idx.front()).transpose();
        node.box_hi = node.box_lo;
        Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(x_.cols());
        for (Eigen::Index i : idx) {
            node.box_lo = node.box_lo.cwiseMin(x_.row(i).transpose());
            node.box_hi = node.box_hi.cwiseMax(x_.row(i).transpose());
            sum += x_.row(i);
        }
        if (ball_) {
            node.centroid = sum / static_cast<double>(idx.size());
            double r = 0.0;
            for (Eigen::Index i : idx)
                r = std::max(r, true_dist(x_.row(i), node.centroid));
            node.radius = r;
        }
    }

    double true_dist(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) const {
        return std::pow(rdist(a, b, p_), 1.0 / static_cast<double>(p_));
    }

    /// A strict lower bound on the rdist of any point under the node. The
    /// geometric bound is deflated by a relative slack so floating-point
    /// rounding can never push it above the exact rdist of a contained
    /// point; ties at the k-th distance then stay visible to the search.
    static double deflate(double bound_r) {
        return std::max(0.0, bound_r * (1.0 - 1e-9) - 1e-300);
    }

    double lower_bound_r(const SpaceNode& node, const Eigen::RowVectorXd& q) const {
        if (ball_) {
            const double gap = std::max(0.0, true_dist(q, node.centroid) - node.radius);
            return deflate(std::pow(gap, static_cast<double>(p_)));
        }
        double acc = 0.0;
        for (Eigen::Index d = 0; d < q.size(); ++d) {
            const double gap = std::max({0.0, node.box_lo[d] - q[d], q[d] - node.box_hi[d]});
            switch (p_) {
            case 1: acc += gap; break;
            case 2: acc += gap * gap; break;
            default: acc += std::pow(gap, p_); break;
            }
        }
        return deflate(acc);
    }

    void search(int at, const Eigen::RowVectorXd& q, KBest& best) const {
        const SpaceNode& node = nodes_[static_cast<std::size_t>(at)];
        if (!best.may_contain(lower_bound_r(node, q)))
            return;
        if (node.split_dim < 0 && node.left < 0) {
            for (Eigen::Index i : node.points)
                best.offer({rdist(q, x_.row(i), p_), i});
            return;
        }
        // Nearer child first.
        const double dl = lower_bound_r(nodes_[static_cast<std::size_t>(node.left)], q);
        const double dr = lower_bound_r(nodes_[static_cast<std::size_t>(node.right)], q);
        if (dl <= dr) {
            search(node.left, q, best);
            search(node.right, q, best);
        } else {
            search(node.right, q, best);
            search(node.left, q, best);
        }
    }

    const Eigen::MatrixXd& x_;
    int p_;
    bool ball_;
    std::vector<SpaceNode> nodes_;
    int root_ = 0;
};

class KnnModel final : public FittedModel {
  public:
    KnnModel(Eigen::MatrixXd x, std::vector<TransmitterLabel> labels, int k, int p,
             Backend backend, int leaf_size)
        : x_(std::move(x)), labels_(std::move(labels)), k_(k), p_(p), backend_(backend) {
        if (backend_ != Backend::Brute)
            tree_ = std::make_unique<SpaceTree>(x_, leaf_size, p_, backend_ == Backend::BallTree);
    }

    Family family() const override { return Family::KNeighbors; }
    Eigen::Index input_dim() const override { return x_.cols(); }

    std::vector<TransmitterLabel> predict(const prep::FeatureMatrix& eval) const override {
        std::vector<TransmitterLabel> out;
        out.reserve(static_cast<std::size_t>(eval.size()));
        for (Eigen::Index i = 0; i < eval.size(); ++i)
            out.push_back(classify(eval.rows.row(i)));
        return out;
    }

  private:
    TransmitterLabel classify(const Eigen::RowVectorXd& q) const {
        KBest best(static_cast<std::size_t>(k_));
        if (backend_ == Backend::Brute) {
            for (Eigen::Index i = 0; i < x_.rows(); ++i)
                best.offer({rdist(q, x_.row(i), p_), i});
        } else {
            tree_->query(q, best);
        }
        const auto neighbours = std::move(best).sorted();
        std::size_t eve = 0;
        for (const Candidate& c : neighbours)
            eve += labels_[static_cast<std::size_t>(c.idx)] == TransmitterLabel::Eve;
        return 2 * eve > neighbours.size() ? TransmitterLabel::Eve : TransmitterLabel::Bob;
    }

    Eigen::MatrixXd x_;
    std::vector<TransmitterLabel> labels_;
    int k_;
    int p_;
    Backend backend_;
    std::unique_ptr<SpaceTree> tree_;
};

} // namespace

ModelPtr fit_knn(const ClassifierSpec& spec, const prep::FeatureMatrix& train, std::uint64_t) {
    detail::require_two_classes(train, "knn");
    detail::require_finite(train, "knn");

    const int k = detail::param_int(spec, "n_neighbors", 2);
    const int leaf_size = detail::param_int(spec, "leaf_size", 10);
    const int p = detail::param_int(spec, "p", 1);
    const std::string algorithm = detail::param_str(spec, "algorithm", "auto");
    if (k < 1)
        throw std::invalid_argument("n_neighbors must be at least 1");
    if (k > train.size())
        throw std::invalid_argument("n_neighbors exceeds the training size");
    if (p < 1)
        throw std::invalid_argument("p must be at least 1");

    Backend backend;
    if (algorithm == "brute")
        backend = Backend::Brute;
    else if (algorithm == "kd_tree")
        backend = Backend::KdTree;
    else if (algorithm == "ball_tree")
        backend = Backend::BallTree;
    else if (algorithm == "auto")
        backend = train.feature_dim() <= 20 ? Backend::KdTree : Backend::Brute;
    else
        throw std::invalid_argument("unknown knn algorithm '" + algorithm + "'");

    return std::make_unique<KnnModel>(train.rows, train.labels, k, p, backend, leaf_size);
}

} // namespace chanauth::ml
