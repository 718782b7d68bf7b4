#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chanauth/classifiers/model.hpp"
#include "chanauth/preprocess.hpp"

namespace chanauth::ml {

enum class Loss { Hinge, Log, ModifiedHuber, SquaredHinge, Perceptron };
enum class Penalty { None, L2, L1, ElasticNet };
enum class LearningRate { Constant, Optimal, InvScaling, Adaptive };

Loss loss_from_name(std::string_view name);
Penalty penalty_from_name(std::string_view name);
LearningRate learning_rate_from_name(std::string_view name);

/// Loss value and dL/df at margin z = y*f. Exposed for the objective tests.
double loss_value(Loss loss, double z);
double loss_derivative(Loss loss, double y, double f);

/// All linear models share this decision function: sign(w'x + b), with 0
/// mapping to Bob.
class LinearModel final : public FittedModel {
  public:
    LinearModel(Family family, Eigen::VectorXd w, double b)
        : family_(family), w_(std::move(w)), b_(b) {}

    Family family() const override { return family_; }
    Eigen::Index input_dim() const override { return w_.size(); }
    std::vector<TransmitterLabel> predict(const prep::FeatureMatrix& eval) const override;

    const Eigen::VectorXd& weights() const { return w_; }
    double bias() const { return b_; }
    double decision(const Eigen::VectorXd& x) const { return w_.dot(x) + b_; }

  private:
    Family family_;
    Eigen::VectorXd w_;
    double b_;
};

/// Regularized-training-error minimization by per-sample subgradient steps
/// in natural (time) order, one epoch per max_iter unit.
///
/// Objective: mean loss + alpha * R(w), with R_l2 = ||w||^2/2,
/// R_l1 = ||w||_1, elasticnet the l1_ratio mix; the bias is unregularized.
/// Schedules: constant eta0; invscaling eta0/t^0.5; optimal 1/(alpha(t+t0))
/// with the usual t0 heuristic; adaptive starts at eta0, divides by 5 each
/// epoch the objective fails to improve by tol and stops once eta < 1e-6.
/// Non-adaptive schedules stop early when the epoch improvement drops
/// below tol.
ModelPtr fit_sgd(const ClassifierSpec& spec, const prep::FeatureMatrix& train,
                 std::uint64_t seed = 0);

/// SGD with perceptron loss and constant unit learning rate; keeps the
/// penalty machinery of fit_sgd.
ModelPtr fit_perceptron(const ClassifierSpec& spec, const prep::FeatureMatrix& train,
                        std::uint64_t seed = 0);

/// Online passive-aggressive updates over the bias-augmented input
/// [x; 1]: with l = max(0, 1 - y f(x)) and q = ||x||^2 + 1,
///   hinge          tau = min(C, l / q)        (PA-I)
///   squared_hinge  tau = l / (q + 1/(2C))     (PA-II)
/// then w += tau y x, b += tau y. An unclamped update restores margin 1
/// exactly. Stops early when the epoch mean loss improves by less than tol.
ModelPtr fit_passive_aggressive(const ClassifierSpec& spec, const prep::FeatureMatrix& train,
                                std::uint64_t seed = 0);

} // namespace chanauth::ml
