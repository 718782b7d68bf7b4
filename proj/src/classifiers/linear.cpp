#include "chanauth/classifiers/linear.hpp"

#include <cmath>
#include <limits>

namespace chanauth::ml {

Loss loss_from_name(std::string_view name) {
    if (name == "hinge") return Loss::Hinge;
    if (name == "log") return Loss::Log;
    if (name == "modified_huber") return Loss::ModifiedHuber;
    if (name == "squared_hinge") return Loss::SquaredHinge;
    if (name == "perceptron") return Loss::Perceptron;
    throw std::invalid_argument("unknown loss '" + std::string(name) + "'");
}

Penalty penalty_from_name(std::string_view name) {
    if (name == "none") return Penalty::None;
    if (name == "l2") return Penalty::L2;
    if (name == "l1") return Penalty::L1;
    if (name == "elasticnet") return Penalty::ElasticNet;
    throw std::invalid_argument("unknown penalty '" + std::string(name) + "'");
}

LearningRate learning_rate_from_name(std::string_view name) {
    if (name == "constant") return LearningRate::Constant;
    if (name == "optimal") return LearningRate::Optimal;
    if (name == "invscaling") return LearningRate::InvScaling;
    if (name == "adaptive") return LearningRate::Adaptive;
    throw std::invalid_argument("unknown learning_rate '" + std::string(name) + "'");
}

double loss_value(Loss loss, double z) {
    switch (loss) {
    case Loss::Hinge: return std::max(0.0, 1.0 - z);
    case Loss::Perceptron: return std::max(0.0, -z);
    case Loss::SquaredHinge: {
        const double g = std::max(0.0, 1.0 - z);
        return g * g;
    }
    case Loss::Log:
        // log(1 + e^-z), overflow-safe
        return z > -50.0 ? std::log1p(std::exp(-z)) : -z;
    case Loss::ModifiedHuber: {
        if (z >= -1.0) {
            const double g = std::max(0.0, 1.0 - z);
            return g * g;
        }
        return -4.0 * z;
    }
    }
    return 0.0;
}

double loss_derivative(Loss loss, double y, double f) {
    const double z = y * f;
    switch (loss) {
    case Loss::Hinge: return z < 1.0 ? -y : 0.0;
    case Loss::Perceptron: return z <= 0.0 ? -y : 0.0;
    case Loss::SquaredHinge: return z < 1.0 ? -2.0 * y * (1.0 - z) : 0.0;
    case Loss::Log: return z > -50.0 ? -y / (1.0 + std::exp(z)) : -y;
    case Loss::ModifiedHuber:
        if (z >= -1.0)
            return z < 1.0 ? -2.0 * y * (1.0 - z) : 0.0;
        return -4.0 * y;
    }
    return 0.0;
}

std::vector<TransmitterLabel> LinearModel::predict(const prep::FeatureMatrix& eval) const {
    std::vector<TransmitterLabel> out;
    out.reserve(static_cast<std::size_t>(eval.size()));
    const Eigen::VectorXd scores = eval.rows * w_ + Eigen::VectorXd::Constant(eval.size(), b_);
    for (Eigen::Index i = 0; i < scores.size(); ++i)
        out.push_back(sign_label(scores[i]));
    return out;
}

namespace {

struct SgdSettings {
    Loss loss = Loss::Hinge;
    Penalty penalty = Penalty::None;
    double alpha = 1e-6;
    double l1_ratio = 0.0;
    int max_iter = 1;
    double tol = 1e-5;
    LearningRate schedule = LearningRate::Constant;
    double eta0 = 0.25;
};

double penalty_value(Penalty penalty, double l1_ratio, const Eigen::VectorXd& w) {
    switch (penalty) {
    case Penalty::None: return 0.0;
    case Penalty::L2: return 0.5 * w.squaredNorm();
    case Penalty::L1: return w.lpNorm<1>();
    case Penalty::ElasticNet:
        return l1_ratio * w.lpNorm<1>() + (1.0 - l1_ratio) * 0.5 * w.squaredNorm();
    }
    return 0.0;
}

void add_penalty_gradient(Penalty penalty, double l1_ratio, double scale,
                          const Eigen::VectorXd& w, Eigen::VectorXd& grad) {
    switch (penalty) {
    case Penalty::None: return;
    case Penalty::L2: grad += scale * w; return;
    case Penalty::L1: grad += scale * w.array().sign().matrix(); return;
    case Penalty::ElasticNet:
        grad += (scale * l1_ratio) * w.array().sign().matrix();
        grad += (scale * (1.0 - l1_ratio)) * w;
        return;
    }
}

double objective(const SgdSettings& s, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                 const Eigen::VectorXd& w, double b) {
    const Eigen::VectorXd f = x * w + Eigen::VectorXd::Constant(x.rows(), b);
    double loss_sum = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        loss_sum += loss_value(s.loss, y[i] * f[i]);
    return loss_sum / static_cast<double>(x.rows()) +
           s.alpha * penalty_value(s.penalty, s.l1_ratio, w);
}

/// t0 heuristic for the optimal schedule, derived from a typical weight
/// scale so the first steps neither explode nor stall.
double optimal_t0(const SgdSettings& s) {
    const double alpha = std::max(s.alpha, 1e-12);
    const double typw = std::sqrt(1.0 / std::sqrt(alpha));
    const double d = std::abs(loss_derivative(s.loss, 1.0, -typw));
    const double initial_eta0 = typw / std::max(1.0, d);
    return 1.0 / (initial_eta0 * alpha);
}

ModelPtr run_sgd(Family family, const SgdSettings& s, const prep::FeatureMatrix& train) {
    detail::require_two_classes(train, "sgd");
    detail::require_finite(train, "sgd");

    const Eigen::MatrixXd& x = train.rows;
    Eigen::VectorXd y(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        y[i] = label_sign(train.labels[static_cast<std::size_t>(i)]);

    Eigen::VectorXd w = Eigen::VectorXd::Zero(x.cols());
    double b = 0.0;
    double eta = s.eta0;
    const double t0 = s.schedule == LearningRate::Optimal ? optimal_t0(s) : 0.0;
    const double alpha_eff = std::max(s.alpha, 1e-12);
    long t = 1;
    double prev_obj = objective(s, x, y, w, b);
    Eigen::VectorXd grad(x.cols());

    for (int epoch = 0; epoch < s.max_iter; ++epoch) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            double step = eta;
            if (s.schedule == LearningRate::InvScaling)
                step = s.eta0 / std::sqrt(static_cast<double>(t));
            else if (s.schedule == LearningRate::Optimal)
                step = 1.0 / (alpha_eff * (static_cast<double>(t) + t0));
            const double f = w.dot(x.row(i)) + b;
            const double g = loss_derivative(s.loss, y[i], f);
            grad.setZero();
            if (g != 0.0)
                grad = g * x.row(i).transpose();
            add_penalty_gradient(s.penalty, s.l1_ratio, s.alpha, w, grad);
            w -= step * grad;
            b -= step * g;
            ++t;
        }
        const double obj = objective(s, x, y, w, b);
        const double improvement = prev_obj - obj;
        prev_obj = obj;
        if (s.schedule == LearningRate::Adaptive) {
            if (improvement < s.tol) {
                eta /= 5.0;
                if (eta < 1e-6)
                    break;
            }
        } else if (improvement < s.tol) {
            break;
        }
    }
    return std::make_unique<LinearModel>(family, std::move(w), b);
}

} // namespace

ModelPtr fit_sgd(const ClassifierSpec& spec, const prep::FeatureMatrix& train, std::uint64_t) {
    SgdSettings s;
    s.loss = loss_from_name(detail::param_str(spec, "loss", "hinge"));
    s.penalty = penalty_from_name(detail::param_str(spec, "penalty", "none"));
    s.alpha = detail::param_double(spec, "alpha", 1e-6);
    s.l1_ratio = detail::param_double(spec, "l1_ratio", 0.0);
    s.max_iter = detail::param_int(spec, "max_iter", 1);
    s.tol = detail::param_double(spec, "tol", 1e-5);
    s.schedule = learning_rate_from_name(detail::param_str(spec, "learning_rate", "constant"));
    s.eta0 = detail::param_double(spec, "eta0", 0.25);
    if (s.alpha < 0.0)
        throw std::invalid_argument("alpha must be nonnegative");
    if (s.l1_ratio < 0.0 || s.l1_ratio > 1.0)
        throw std::invalid_argument("l1_ratio must lie in [0, 1]");
    return run_sgd(Family::Sgd, s, train);
}

ModelPtr fit_perceptron(const ClassifierSpec& spec, const prep::FeatureMatrix& train,
                        std::uint64_t) {
    SgdSettings s;
    s.loss = Loss::Perceptron;
    s.penalty = penalty_from_name(detail::param_str(spec, "penalty", "none"));
    s.alpha = detail::param_double(spec, "alpha", 1e-6);
    s.l1_ratio = s.penalty == Penalty::ElasticNet ? 0.15 : 0.0;
    s.max_iter = detail::param_int(spec, "max_iter", 1);
    s.tol = detail::param_double(spec, "tol", 1e-5);
    s.schedule = LearningRate::Constant;
    s.eta0 = 1.0;
    return run_sgd(Family::Perceptron, s, train);
}

ModelPtr fit_passive_aggressive(const ClassifierSpec& spec, const prep::FeatureMatrix& train,
                                std::uint64_t) {
    detail::require_two_classes(train, "passive-aggressive");
    detail::require_finite(train, "passive-aggressive");

    const double c = detail::param_double(spec, "C", 0.01);
    const int max_iter = detail::param_int(spec, "max_iter", 1);
    const double tol = detail::param_double(spec, "tol", 1e-5);
    const std::string loss = detail::param_str(spec, "loss", "hinge");
    if (c < 0.0)
        throw std::invalid_argument("C must be nonnegative");
    const bool squared = loss == "squared_hinge";
    if (!squared && loss != "hinge")
        throw std::invalid_argument("passive-aggressive loss must be hinge or squared_hinge");

    const Eigen::MatrixXd& x = train.rows;
    Eigen::VectorXd y(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        y[i] = label_sign(train.labels[static_cast<std::size_t>(i)]);

    Eigen::VectorXd w = Eigen::VectorXd::Zero(x.cols());
    double b = 0.0;
    double prev_mean_loss = std::numeric_limits<double>::infinity();
    for (int epoch = 0; epoch < max_iter; ++epoch) {
        double loss_sum = 0.0;
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const double f = w.dot(x.row(i)) + b;
            const double l = std::max(0.0, 1.0 - y[i] * f);
            loss_sum += squared ? l * l : l;
            if (l <= 0.0)
                continue;
            const double q = x.row(i).squaredNorm() + 1.0; // bias-augmented norm
            double tau;
            if (squared)
                tau = c > 0.0 ? l / (q + 1.0 / (2.0 * c)) : 0.0;
            else
                tau = std::min(c, l / q);
            w += (tau * y[i]) * x.row(i).transpose();
            b += tau * y[i];
        }
        const double mean_loss = loss_sum / static_cast<double>(x.rows());
        if (prev_mean_loss - mean_loss < tol)
            break;
        prev_mean_loss = mean_loss;
    }
    return std::make_unique<LinearModel>(Family::PassiveAggressive, std::move(w), b);
}

} // namespace chanauth::ml
