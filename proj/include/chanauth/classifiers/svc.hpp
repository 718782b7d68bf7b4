#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "chanauth/classifiers/model.hpp"

namespace chanauth::ml {

enum class Kernel { Linear, Poly, Rbf, Sigmoid };
Kernel kernel_from_name(std::string_view name);

/// k(x, z) with gamma = 1/d and r = 0:
///   linear x'z; poly (gamma x'z)^degree; rbf exp(-gamma ||x-z||^2);
///   sigmoid tanh(gamma x'z).
double kernel_value(Kernel kernel, double gamma, int degree, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& z);

class SvcModel final : public FittedModel {
  public:
    SvcModel(Kernel kernel, double gamma, int degree, Eigen::MatrixXd support,
             Eigen::VectorXd dual_coef, double bias, std::vector<double> objective_history,
             double kkt_gap)
        : kernel_(kernel), gamma_(gamma), degree_(degree), support_(std::move(support)),
          dual_coef_(std::move(dual_coef)), bias_(bias),
          objective_history_(std::move(objective_history)), kkt_gap_(kkt_gap) {}

    Family family() const override { return Family::Svc; }
    Eigen::Index input_dim() const override { return support_.cols(); }
    std::vector<TransmitterLabel> predict(const prep::FeatureMatrix& eval) const override;

    double decision(const Eigen::VectorXd& x) const;
    double bias() const { return bias_; }
    /// Rows of the training set with nonzero alpha.
    const Eigen::MatrixXd& support_vectors() const { return support_; }
    /// alpha_i * y_i per support vector.
    const Eigen::VectorXd& dual_coef() const { return dual_coef_; }
    /// Dual objective after initialization and after each optimization pass.
    const std::vector<double>& dual_objective_history() const { return objective_history_; }
    /// Final violation gap b_low - b_up; below tol when the solver converged
    /// rather than hitting its pass budget.
    double kkt_gap() const { return kkt_gap_; }

  private:
    Kernel kernel_;
    double gamma_;
    int degree_;
    Eigen::MatrixXd support_;
    Eigen::VectorXd dual_coef_;
    double bias_;
    std::vector<double> objective_history_;
    double kkt_gap_;
};

/// Soft-margin SVM solved in the dual by SMO pairwise updates on the
/// maximal KKT-violating pair. One pass is up to n pair updates; the solver
/// stops when the violation gap falls below tol or after max_iter passes.
/// Each pair subproblem is solved exactly, so the dual objective never
/// decreases.
ModelPtr fit_svc(const ClassifierSpec& spec, const prep::FeatureMatrix& train,
                 std::uint64_t seed = 0);

} // namespace chanauth::ml
