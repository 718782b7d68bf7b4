#pragma once

#include <cstdint>
#include <stdexcept>

#include "chanauth/classifiers/model.hpp"

namespace chanauth::ml {

/// Raised by the lsqr solver without shrinkage when the pooled covariance
/// is rank deficient at the configured tolerance.
class SingularCovarianceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Linear discriminant with pooled (population) within-class covariance and
/// empirical class priors. Decision: sign of w'x + b with
/// w = Sigma^-1 (mu_eve - mu_bob), b = -(mu_bob+mu_eve)'w/2 + log(pi_e/pi_b).
///
/// solver=svd factorizes the class-centered data and inverts through the
/// rank-truncated pseudoinverse (singular directions with s <= tol*s_max are
/// dropped), so it stays finite on degenerate data; shrinkage is ignored on
/// this path. solver=lsqr solves Sigma w = (mu_eve - mu_bob) by least
/// squares; with shrinkage=none a rank-deficient Sigma raises
/// SingularCovarianceError, with shrinkage=auto the Ledoit-Wolf shrunken
/// covariance is used instead.
ModelPtr fit_lda(const ClassifierSpec& spec, const prep::FeatureMatrix& train,
                 std::uint64_t seed = 0);

/// Ledoit-Wolf shrinkage coefficient for rows already centered per class.
double ledoit_wolf_shrinkage(const Eigen::MatrixXd& centered);

} // namespace chanauth::ml
