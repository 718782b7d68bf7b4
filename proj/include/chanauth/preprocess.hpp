#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "chanauth/dataset.hpp"
#include "chanauth/types.hpp"

namespace chanauth::prep {

enum class Reduction { Sample, Mean };

struct PreprocessConfig {
    Eigen::Index m_red = 48;             ///< target feature dimension, must divide M
    Reduction reduction = Reduction::Mean;
    int window = 5;                      ///< W previous samples appended to each row
    Eigen::Index n_train = 10;           ///< training rows, counted post-window
};

/// Windowed feature rows with aligned labels.
struct FeatureMatrix {
    Eigen::MatrixXd rows;                 ///< n x feature_dim
    std::vector<TransmitterLabel> labels; ///< n

    Eigen::Index size() const { return rows.rows(); }
    Eigen::Index feature_dim() const { return rows.cols(); }
};

/// Per-feature training statistics; degenerate stds are replaced by 1.
struct NormStats {
    Eigen::VectorXd mean;
    Eigen::VectorXd std;
};

/// |H| elementwise.
template <typename Derived>
Eigen::MatrixXd magnitude(const Eigen::MatrixBase<Derived>& gains) {
    return gains.cwiseAbs().template cast<double>();
}

inline Eigen::MatrixXd magnitude(const TraceDataset& ds) { return ds.gains.cwiseAbs(); }

namespace detail {
inline void require_divisor(Eigen::Index m, Eigen::Index m_red) {
    if (m_red <= 0 || m % m_red != 0)
        throw std::invalid_argument("m_red " + std::to_string(m_red) +
                                    " does not divide feature dimension " + std::to_string(m));
}
} // namespace detail

/// Keeps every (M/m_red)-th column: F_red(k, l) = F(k, l*M/m_red).
template <typename Derived>
auto reduce_sample(const Eigen::MatrixBase<Derived>& f, Eigen::Index m_red)
    -> Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> {
    detail::require_divisor(f.cols(), m_red);
    const Eigen::Index stride = f.cols() / m_red;
    return f(Eigen::all, Eigen::seq(0, f.cols() - 1, stride));
}

/// Averages disjoint blocks of M/m_red adjacent columns.
template <typename Derived>
auto reduce_mean(const Eigen::MatrixBase<Derived>& f, Eigen::Index m_red)
    -> Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> {
    detail::require_divisor(f.cols(), m_red);
    const Eigen::Index block = f.cols() / m_red;
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(f.rows(), m_red);
    for (Eigen::Index l = 0; l < m_red; ++l)
        out.col(l) = f.middleCols(l * block, block).rowwise().mean();
    return out;
}

template <typename Derived>
auto reduce(const Eigen::MatrixBase<Derived>& f, Eigen::Index m_red, Reduction method) {
    return method == Reduction::Sample ? reduce_sample(f, m_red).eval()
                                       : reduce_mean(f, m_red).eval();
}

/// Row k of the output concatenates the reduced samples at times
/// k, k-1, ..., k-W (newest first) and carries the label at time k.
/// The first W samples have no full history and are dropped.
FeatureMatrix windowize(const Eigen::MatrixXd& f_red, const std::vector<TransmitterLabel>& labels,
                        int window);

/// First n_train rows (time order) train, the rest evaluate. Throws
/// SingleClassError when the training rows hold only one label.
std::pair<FeatureMatrix, FeatureMatrix> split_train_eval(const FeatureMatrix& fm,
                                                         Eigen::Index n_train);

/// Per-feature mean and population standard deviation of the training rows;
/// stds below 1e-12 are replaced by 1.
NormStats fit_norm(const FeatureMatrix& train);

/// (x - mean) / std per feature; labels pass through.
FeatureMatrix apply_norm(FeatureMatrix fm, const NormStats& stats);

struct PipelineOutput {
    FeatureMatrix train;
    FeatureMatrix eval;
    NormStats stats;
};

/// magnitude -> reduce -> windowize -> split -> normalize with the training
/// statistics applied to both splits.
PipelineOutput run_pipeline(const TraceDataset& ds, const PreprocessConfig& cfg);

} // namespace chanauth::prep
