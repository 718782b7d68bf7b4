#include "chanauth/preprocess.hpp"

#include <cmath>

namespace chanauth::prep {

FeatureMatrix windowize(const Eigen::MatrixXd& f_red, const std::vector<TransmitterLabel>& labels,
                        int window) {
    if (window < 0)
        throw std::invalid_argument("window must be nonnegative");
    const Eigen::Index n = f_red.rows();
    if (static_cast<std::size_t>(n) != labels.size())
        throw std::invalid_argument("windowize: rows/labels mismatch");
    if (n <= window)
        throw std::invalid_argument("windowize: need more than W samples");

    const Eigen::Index d = f_red.cols();
    const Eigen::Index w = window;
    FeatureMatrix fm;
    fm.rows.resize(n - w, d * (w + 1));
    fm.labels.reserve(static_cast<std::size_t>(n - w));
    for (Eigen::Index k = w; k < n; ++k) {
        for (Eigen::Index back = 0; back <= w; ++back)
            fm.rows.block(k - w, back * d, 1, d) = f_red.row(k - back);
        fm.labels.push_back(labels[static_cast<std::size_t>(k)]);
    }
    return fm;
}

std::pair<FeatureMatrix, FeatureMatrix> split_train_eval(const FeatureMatrix& fm,
                                                         Eigen::Index n_train) {
    if (n_train < 2)
        throw std::invalid_argument("n_train must be at least 2");
    if (n_train >= fm.size())
        throw std::invalid_argument("n_train must leave evaluation rows");

    FeatureMatrix train;
    train.rows = fm.rows.topRows(n_train);
    train.labels.assign(fm.labels.begin(), fm.labels.begin() + n_train);

    bool bob = false, eve = false;
    for (TransmitterLabel l : train.labels)
        (l == TransmitterLabel::Eve ? eve : bob) = true;
    if (!bob || !eve)
        throw SingleClassError("training split holds a single transmitter label");

    FeatureMatrix eval;
    eval.rows = fm.rows.bottomRows(fm.size() - n_train);
    eval.labels.assign(fm.labels.begin() + n_train, fm.labels.end());
    return {std::move(train), std::move(eval)};
}

NormStats fit_norm(const FeatureMatrix& train) {
    if (train.size() < 2)
        throw std::invalid_argument("fit_norm needs at least 2 rows");
    NormStats stats;
    stats.mean = train.rows.colwise().mean();
    const auto centered = train.rows.rowwise() - stats.mean.transpose();
    stats.std = (centered.array().square().colwise().mean()).sqrt();
    for (Eigen::Index j = 0; j < stats.std.size(); ++j)
        if (stats.std[j] < 1e-12)
            stats.std[j] = 1.0; // degenerate features pass through unscaled
    return stats;
}

FeatureMatrix apply_norm(FeatureMatrix fm, const NormStats& stats) {
    if (fm.feature_dim() != stats.mean.size() || fm.feature_dim() != stats.std.size())
        throw std::invalid_argument("apply_norm: feature dimension mismatch");
    fm.rows = (fm.rows.rowwise() - stats.mean.transpose()).array().rowwise() /
              stats.std.transpose().array();
    return fm;
}

PipelineOutput run_pipeline(const TraceDataset& ds, const PreprocessConfig& cfg) {
    const Eigen::MatrixXd reduced = reduce(magnitude(ds), cfg.m_red, cfg.reduction);
    FeatureMatrix windowed = windowize(reduced, ds.labels, cfg.window);
    auto [train, eval] = split_train_eval(windowed, cfg.n_train);
    PipelineOutput out;
    out.stats = fit_norm(train);
    out.train = apply_norm(std::move(train), out.stats);
    out.eval = apply_norm(std::move(eval), out.stats);
    return out;
}

} // namespace chanauth::prep
