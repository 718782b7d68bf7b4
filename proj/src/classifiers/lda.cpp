#include "chanauth/classifiers/lda.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "chanauth/classifiers/linear.hpp"

namespace chanauth::ml {

double ledoit_wolf_shrinkage(const Eigen::MatrixXd& centered) {
    const auto n = static_cast<double>(centered.rows());
    const auto d = static_cast<double>(centered.cols());
    if (centered.rows() < 2)
        return 0.0;
    const Eigen::MatrixXd x2 = centered.array().square();
    const Eigen::MatrixXd gram = centered.transpose() * centered; // n * S
    const double emp_trace = x2.sum() / n;                        // trace(S)
    const double mu = emp_trace / d;

    double delta = (gram.array().square().sum()) / (n * n);
    delta = (delta - 2.0 * mu * emp_trace + d * mu * mu) / d;

    double beta = (x2.transpose() * x2).sum();
    beta = (beta / n - gram.array().square().sum() / (n * n)) / (d * n);

    if (delta <= 0.0 || beta <= 0.0)
        return 0.0;
    return std::min(beta / delta, 1.0);
}

namespace {

struct ClassStats {
    Eigen::VectorXd mu_bob;
    Eigen::VectorXd mu_eve;
    Eigen::Index n_bob = 0;
    Eigen::Index n_eve = 0;
    Eigen::MatrixXd centered; ///< rows minus their class mean
};

ClassStats class_stats(const prep::FeatureMatrix& train) {
    const Eigen::Index n = train.size();
    const Eigen::Index d = train.feature_dim();
    ClassStats st;
    st.mu_bob = Eigen::VectorXd::Zero(d);
    st.mu_eve = Eigen::VectorXd::Zero(d);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (train.labels[static_cast<std::size_t>(i)] == TransmitterLabel::Eve) {
            st.mu_eve += train.rows.row(i).transpose();
            ++st.n_eve;
        } else {
            st.mu_bob += train.rows.row(i).transpose();
            ++st.n_bob;
        }
    }
    st.mu_bob /= static_cast<double>(st.n_bob);
    st.mu_eve /= static_cast<double>(st.n_eve);
    st.centered.resize(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& mu = train.labels[static_cast<std::size_t>(i)] == TransmitterLabel::Eve
                             ? st.mu_eve
                             : st.mu_bob;
        st.centered.row(i) = train.rows.row(i) - mu.transpose();
    }
    return st;
}

} // namespace

ModelPtr fit_lda(const ClassifierSpec& spec, const prep::FeatureMatrix& train, std::uint64_t) {
    detail::require_two_classes(train, "lda");
    detail::require_finite(train, "lda");

    const std::string solver = detail::param_str(spec, "solver", "svd");
    const double tol = detail::param_double(spec, "tol", 1e-5);
    const bool shrink = detail::param_str(spec, "shrinkage", "none") == "auto";
    if (solver != "svd" && solver != "lsqr")
        throw std::invalid_argument("lda solver must be svd or lsqr");

    const ClassStats st = class_stats(train);
    const Eigen::VectorXd diff = st.mu_eve - st.mu_bob;
    const auto n = static_cast<double>(train.size());
    const double log_prior_ratio =
        std::log(static_cast<double>(st.n_eve) / static_cast<double>(st.n_bob));

    Eigen::VectorXd w;
    if (solver == "svd") {
        // Pooled covariance through the data factorization; singular
        // directions below the rank tolerance are truncated. Shrinkage is
        // not used on this path.
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(st.centered / std::sqrt(n),
                                              Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::VectorXd& s = svd.singularValues();
        const double cutoff = s.size() > 0 ? tol * s[0] : 0.0;
        Eigen::VectorXd inv_s2 = Eigen::VectorXd::Zero(s.size());
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s[i] > cutoff && s[i] > 0.0)
                inv_s2[i] = 1.0 / (s[i] * s[i]);
        w = svd.matrixV() * inv_s2.asDiagonal() * (svd.matrixV().transpose() * diff);
    } else {
        Eigen::MatrixXd sigma = (st.centered.transpose() * st.centered) / n;
        if (shrink) {
            const double delta = ledoit_wolf_shrinkage(st.centered);
            const double mu = sigma.trace() / static_cast<double>(sigma.rows());
            sigma = (1.0 - delta) * sigma;
            sigma.diagonal().array() += delta * mu;
            if (mu < 1e-18)
                sigma.diagonal().array() += 1e-12; // fully degenerate data
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma,
                                                               Eigen::EigenvaluesOnly);
            const double max_ev = eig.eigenvalues().cwiseAbs().maxCoeff();
            const double min_ev = eig.eigenvalues().minCoeff();
            if (max_ev <= 0.0 || min_ev <= tol * max_ev)
                throw SingularCovarianceError(
                    "pooled covariance is rank deficient at tol; use shrinkage=auto");
        }
        w = sigma.colPivHouseholderQr().solve(diff);
    }

    const double b = -0.5 * (st.mu_bob + st.mu_eve).dot(w) + log_prior_ratio;
    return std::make_unique<LinearModel>(Family::Lda, std::move(w), b);
}

} // namespace chanauth::ml
