#include "chanauth/classifiers/gnb.hpp"

#include <cmath>

namespace chanauth::ml {

Eigen::Matrix2Xd GnbModel::joint_log_likelihood(const Eigen::MatrixXd& rows) const {
    const Eigen::Index n = rows.rows();
    Eigen::Matrix2Xd jll(2, n);
    for (int c = 0; c < 2; ++c) {
        const double norm_const =
            -0.5 * (variances_.row(c).array() * 2.0 * M_PI).log().sum();
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto diff = rows.row(i) - means_.row(c);
            const double quad =
                (diff.array().square() / variances_.row(c).array()).sum();
            jll(c, i) = log_priors_[c] + norm_const - 0.5 * quad;
        }
    }
    return jll;
}

std::vector<TransmitterLabel> GnbModel::predict(const prep::FeatureMatrix& eval) const {
    const Eigen::Matrix2Xd jll = joint_log_likelihood(eval.rows);
    std::vector<TransmitterLabel> out;
    out.reserve(static_cast<std::size_t>(eval.size()));
    for (Eigen::Index i = 0; i < eval.size(); ++i)
        out.push_back(jll(1, i) > jll(0, i) ? TransmitterLabel::Eve : TransmitterLabel::Bob);
    return out;
}

Eigen::MatrixX2d GnbModel::posteriors(const Eigen::MatrixXd& rows) const {
    const Eigen::Matrix2Xd jll = joint_log_likelihood(rows);
    Eigen::MatrixX2d post(rows.rows(), 2);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        const double m = std::max(jll(0, i), jll(1, i));
        const double p0 = std::exp(jll(0, i) - m);
        const double p1 = std::exp(jll(1, i) - m);
        post(i, 0) = p0 / (p0 + p1);
        post(i, 1) = p1 / (p0 + p1);
    }
    return post;
}

ModelPtr fit_gnb(const prep::FeatureMatrix& train, std::uint64_t) {
    detail::require_two_classes(train, "gnb");
    detail::require_finite(train, "gnb");

    const Eigen::Index d = train.feature_dim();
    Eigen::MatrixXd means = Eigen::MatrixXd::Zero(2, d);
    Eigen::MatrixXd variances = Eigen::MatrixXd::Zero(2, d);
    Eigen::Vector2d counts = Eigen::Vector2d::Zero();
    for (Eigen::Index i = 0; i < train.size(); ++i) {
        const int c = train.labels[static_cast<std::size_t>(i)] == TransmitterLabel::Eve;
        means.row(c) += train.rows.row(i);
        counts[c] += 1.0;
    }
    means.row(0) /= counts[0];
    means.row(1) /= counts[1];
    for (Eigen::Index i = 0; i < train.size(); ++i) {
        const int c = train.labels[static_cast<std::size_t>(i)] == TransmitterLabel::Eve;
        variances.row(c) += (train.rows.row(i) - means.row(c)).array().square().matrix();
    }
    variances.row(0) /= counts[0];
    variances.row(1) /= counts[1];

    // Floor: 1e-9 times the largest overall feature variance, or 1e-9
    // outright when every feature is constant.
    const Eigen::RowVectorXd overall_mean = train.rows.colwise().mean();
    const double max_var =
        (train.rows.rowwise() - overall_mean).array().square().colwise().mean().maxCoeff();
    const double floor = 1e-9 * (max_var > 0.0 ? max_var : 1.0);
    variances.array() += floor;

    Eigen::Vector2d log_priors;
    const double n = counts.sum();
    log_priors << std::log(counts[0] / n), std::log(counts[1] / n);
    return std::make_unique<GnbModel>(std::move(means), std::move(variances),
                                      std::move(log_priors));
}

ModelPtr fit_gnb(const ClassifierSpec&, const prep::FeatureMatrix& train, std::uint64_t seed) {
    return fit_gnb(train, seed);
}

} // namespace chanauth::ml
