#include "chanauth/classifiers/svc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chanauth::ml {

Kernel kernel_from_name(std::string_view name) {
    if (name == "linear") return Kernel::Linear;
    if (name == "poly") return Kernel::Poly;
    if (name == "rbf") return Kernel::Rbf;
    if (name == "sigmoid") return Kernel::Sigmoid;
    throw std::invalid_argument("unknown kernel '" + std::string(name) + "'");
}

double kernel_value(Kernel kernel, double gamma, int degree, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& z) {
    switch (kernel) {
    case Kernel::Linear: return x.dot(z);
    case Kernel::Poly: return std::pow(gamma * x.dot(z), degree);
    case Kernel::Rbf: return std::exp(-gamma * (x - z).squaredNorm());
    case Kernel::Sigmoid: return std::tanh(gamma * x.dot(z));
    }
    return 0.0;
}

double SvcModel::decision(const Eigen::VectorXd& x) const {
    double f = bias_;
    for (Eigen::Index i = 0; i < support_.rows(); ++i)
        f += dual_coef_[i] * kernel_value(kernel_, gamma_, degree_, support_.row(i), x);
    return f;
}

std::vector<TransmitterLabel> SvcModel::predict(const prep::FeatureMatrix& eval) const {
    std::vector<TransmitterLabel> out;
    out.reserve(static_cast<std::size_t>(eval.size()));
    for (Eigen::Index i = 0; i < eval.size(); ++i)
        out.push_back(sign_label(decision(eval.rows.row(i))));
    return out;
}

namespace {

struct Smo {
    const Eigen::MatrixXd& k; ///< kernel matrix
    const Eigen::VectorXd& y;
    double c;
    double tol;

    Eigen::VectorXd alpha;
    Eigen::VectorXd g; ///< g_i = sum_j alpha_j y_j K_ij (decision without bias)

    explicit Smo(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& labels, double c_,
                 double tol_)
        : k(kernel), y(labels), c(c_), tol(tol_), alpha(Eigen::VectorXd::Zero(labels.size())),
          g(Eigen::VectorXd::Zero(labels.size())) {}

    /// b values that would put sample i exactly on its margin.
    double f_value(Eigen::Index i) const { return y[i] - g[i]; }

    /// Constraint sets for the bias: lower holds indices forcing b >= F_i,
    /// upper those forcing b <= F_i; free vectors belong to both.
    bool in_lower(Eigen::Index i) const {
        const bool at_zero = alpha[i] <= 0.0;
        const bool at_c = alpha[i] >= c;
        if (!at_zero && !at_c)
            return true;
        return (at_zero && y[i] > 0.0) || (at_c && y[i] < 0.0);
    }
    bool in_upper(Eigen::Index i) const {
        const bool at_zero = alpha[i] <= 0.0;
        const bool at_c = alpha[i] >= c;
        if (!at_zero && !at_c)
            return true;
        return (at_zero && y[i] < 0.0) || (at_c && y[i] > 0.0);
    }

    /// Maximal violating pair and the KKT gap b_low - b_up.
    struct Violation {
        double gap;
        Eigen::Index i_low;
        Eigen::Index i_up;
    };

    Violation max_violation() const {
        double b_low = -std::numeric_limits<double>::infinity();
        double b_up = std::numeric_limits<double>::infinity();
        Eigen::Index i_low = -1, i_up = -1;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double f = f_value(i);
            if (in_lower(i) && f > b_low) {
                b_low = f;
                i_low = i;
            }
            if (in_upper(i) && f < b_up) {
                b_up = f;
                i_up = i;
            }
        }
        return {b_low - b_up, i_low, i_up};
    }

    /// Exact two-variable subproblem on (i, j); returns false on no progress.
    bool take_step(Eigen::Index i, Eigen::Index j) {
        if (i == j || i < 0 || j < 0)
            return false;
        const double ai_old = alpha[i];
        const double aj_old = alpha[j];
        double lo, hi;
        if (y[i] != y[j]) {
            lo = std::max(0.0, aj_old - ai_old);
            hi = std::min(c, c + aj_old - ai_old);
        } else {
            lo = std::max(0.0, ai_old + aj_old - c);
            hi = std::min(c, ai_old + aj_old);
        }
        if (hi - lo < 1e-15)
            return false;
        const double ei = g[i] - y[i];
        const double ej = g[j] - y[j];
        const double eta = k(i, i) + k(j, j) - 2.0 * k(i, j);
        double aj_new;
        if (eta > 1e-12) {
            aj_new = std::clamp(aj_old + y[j] * (ei - ej) / eta, lo, hi);
        } else {
            // Flat direction: take the endpoint with the better objective.
            // Along the constraint line the objective is linear with slope
            // y_j (E_i - E_j) in alpha_j.
            const double slope = y[j] * (ei - ej);
            if (slope > 0.0)
                aj_new = hi;
            else if (slope < 0.0)
                aj_new = lo;
            else
                return false;
        }
        if (std::abs(aj_new - aj_old) < 1e-14)
            return false;
        const double ai_new = ai_old + y[i] * y[j] * (aj_old - aj_new);
        alpha[i] = ai_new;
        alpha[j] = aj_new;
        const double di = (ai_new - ai_old) * y[i];
        const double dj = (aj_new - aj_old) * y[j];
        g += di * k.col(i) + dj * k.col(j);
        return true;
    }

};

} // namespace

ModelPtr fit_svc(const ClassifierSpec& spec, const prep::FeatureMatrix& train, std::uint64_t) {
    detail::require_two_classes(train, "svc");
    detail::require_finite(train, "svc");

    const double c = detail::param_double(spec, "C", 0.01);
    const Kernel kernel = kernel_from_name(detail::param_str(spec, "kernel", "linear"));
    const int degree = detail::param_int(spec, "degree", 1);
    const double tol = detail::param_double(spec, "tol", 1e-5);
    const int max_iter = detail::param_int(spec, "max_iter", 1);
    if (c <= 0.0)
        throw std::invalid_argument("C must be positive");

    const Eigen::MatrixXd& x = train.rows;
    const Eigen::Index n = x.rows();
    const double gamma = 1.0 / static_cast<double>(x.cols());
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i)
        y[i] = label_sign(train.labels[static_cast<std::size_t>(i)]);

    Eigen::MatrixXd kmat(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j)
            kmat(i, j) = kmat(j, i) = kernel_value(kernel, gamma, degree, x.row(i), x.row(j));

    Smo smo(kmat, y, c, tol);
    std::vector<double> history;
    const auto objective = [&] {
        return smo.alpha.sum() - 0.5 * smo.alpha.dot(y.cwiseProduct(smo.g));
    };
    history.push_back(objective());

    for (int pass = 0; pass < max_iter; ++pass) {
        bool progressed = false;
        for (Eigen::Index step = 0; step < n; ++step) {
            const auto v = smo.max_violation();
            if (v.gap < tol)
                break;
            if (!smo.take_step(v.i_low, v.i_up))
                break;
            progressed = true;
        }
        history.push_back(objective());
        if (!progressed || smo.max_violation().gap < tol)
            break;
    }

    // Bias: average margin over free support vectors, else the midpoint of
    // the feasible window.
    const double margin = 1e-10 * std::max(1.0, c);
    double f_sum = 0.0;
    int f_count = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (smo.alpha[i] > margin && smo.alpha[i] < c - margin) {
            f_sum += smo.f_value(i);
            ++f_count;
        }
    }
    double bias;
    if (f_count > 0) {
        bias = f_sum / f_count;
    } else {
        const auto v = smo.max_violation();
        const double b_low = v.i_low >= 0 ? smo.f_value(v.i_low) : 0.0;
        const double b_up = v.i_up >= 0 ? smo.f_value(v.i_up) : 0.0;
        bias = 0.5 * (b_low + b_up);
    }

    std::vector<Eigen::Index> sv;
    for (Eigen::Index i = 0; i < n; ++i)
        if (smo.alpha[i] > margin)
            sv.push_back(i);
    Eigen::MatrixXd support(static_cast<Eigen::Index>(sv.size()), x.cols());
    Eigen::VectorXd dual(static_cast<Eigen::Index>(sv.size()));
    for (std::size_t s = 0; s < sv.size(); ++s) {
        support.row(static_cast<Eigen::Index>(s)) = x.row(sv[s]);
        dual[static_cast<Eigen::Index>(s)] = smo.alpha[sv[s]] * y[sv[s]];
    }
    return std::make_unique<SvcModel>(kernel, gamma, degree, std::move(support), std::move(dual),
                                      bias, std::move(history), smo.max_violation().gap);
}

} // namespace chanauth::ml
