#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "chanauth/classifiers/model.hpp"

namespace chanauth::ml {

class GnbModel final : public FittedModel {
  public:
    GnbModel(Eigen::MatrixXd means, Eigen::MatrixXd variances, Eigen::Vector2d log_priors)
        : means_(std::move(means)), variances_(std::move(variances)),
          log_priors_(std::move(log_priors)) {}

    Family family() const override { return Family::Gnb; }
    Eigen::Index input_dim() const override { return means_.cols(); }
    std::vector<TransmitterLabel> predict(const prep::FeatureMatrix& eval) const override;

    /// P(Bob|x), P(Eve|x) per row; each pair sums to 1.
    Eigen::MatrixX2d posteriors(const Eigen::MatrixXd& rows) const;

  private:
    Eigen::Matrix2Xd joint_log_likelihood(const Eigen::MatrixXd& rows) const;

    Eigen::MatrixXd means_;     ///< 2 x d, row 0 Bob, row 1 Eve
    Eigen::MatrixXd variances_; ///< 2 x d, floored
    Eigen::Vector2d log_priors_;
};

/// Gaussian naive Bayes with per-class, per-feature likelihoods and
/// empirical priors. Variances are floored by 1e-9 times the largest
/// overall feature variance (or 1e-9 outright when all features are
/// constant), so scores stay finite.
ModelPtr fit_gnb(const prep::FeatureMatrix& train, std::uint64_t seed = 0);
ModelPtr fit_gnb(const ClassifierSpec& spec, const prep::FeatureMatrix& train,
                 std::uint64_t seed = 0);

} // namespace chanauth::ml
