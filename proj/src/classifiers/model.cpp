#include "chanauth/classifiers/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chanauth/classifiers/gnb.hpp"
#include "chanauth/classifiers/knn.hpp"
#include "chanauth/classifiers/lda.hpp"
#include "chanauth/classifiers/linear.hpp"
#include "chanauth/classifiers/random_forest.hpp"
#include "chanauth/classifiers/svc.hpp"
#include "chanauth/numeric_io.hpp"

namespace chanauth::ml {

std::string_view family_name(Family family) {
    switch (family) {
    case Family::Sgd: return "SGDClassifier";
    case Family::Perceptron: return "Perceptron";
    case Family::PassiveAggressive: return "PassiveAgressiveClassifier";
    case Family::RandomForest: return "RandomForestClassifier";
    case Family::KNeighbors: return "KNeighborsClassifier";
    case Family::Svc: return "SVC";
    case Family::Lda: return "LinearDiscriminantAnalysis";
    case Family::Gnb: return "GaussianNB";
    }
    return "?";
}

std::optional<Family> family_from_name(std::string_view name) {
    for (Family f : kAllFamilies)
        if (name == family_name(f))
            return f;
    if (name == "PassiveAggressiveClassifier")
        return Family::PassiveAggressive;
    if (name == "SGD")
        return Family::Sgd;
    if (name == "RF")
        return Family::RandomForest;
    if (name == "KNN")
        return Family::KNeighbors;
    if (name == "LDA")
        return Family::Lda;
    if (name == "GNB")
        return Family::Gnb;
    return std::nullopt;
}

const std::string* ClassifierSpec::find(std::string_view key) const {
    for (const auto& [k, v] : params)
        if (k == key)
            return &v;
    return nullptr;
}

void ClassifierSpec::set(std::string_view key, std::string value) {
    for (auto& [k, v] : params) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    params.emplace_back(std::string(key), std::move(value));
}

std::string to_string(const ClassifierSpec& spec) {
    std::string out{family_name(spec.family)};
    for (const auto& [k, v] : spec.params) {
        out += ' ';
        out += k;
        out += '=';
        out += v;
    }
    return out;
}

ClassifierSpec parse_spec(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string token;
    if (!(in >> token))
        throw std::invalid_argument("empty classifier spec");
    const auto family = family_from_name(token);
    if (!family)
        throw std::invalid_argument("unknown classifier family '" + token + "'");
    ClassifierSpec spec;
    spec.family = *family;
    while (in >> token) {
        const std::size_t eq = token.find('=');
        if (eq == std::string::npos || eq == 0)
            throw std::invalid_argument("bad spec token '" + token + "', expected key=value");
        spec.params.emplace_back(token.substr(0, eq), token.substr(eq + 1));
    }
    return spec;
}

namespace {

struct ParamDef {
    std::string_view name;
    bool numeric;
    std::vector<std::string_view> options; ///< categorical options, or the numeric grid points
};

const std::vector<ParamDef>& family_params(Family family) {
    static const std::vector<ParamDef> sgd = {
        {"loss", false, {"hinge", "log", "modified_huber", "squared_hinge", "perceptron"}},
        {"penalty", false, {"none", "l2", "l1", "elasticnet"}},
        {"alpha", true, {"1e-06", "1e-05", "1e-04", "1e-03", "1e-02"}},
        {"l1_ratio", true, {"0", "0.25", "0.5", "0.75", "1"}},
        {"max_iter", true, {"1", "10", "100", "1000", "10000"}},
        {"tol", true, {"1e-05", "1e-04", "1e-03", "1e-02", "1e-01"}},
        {"learning_rate", false, {"constant", "optimal", "invscaling", "adaptive"}},
        {"eta0", true, {"0.25", "0.5", "0.75", "1"}},
    };
    static const std::vector<ParamDef> perceptron = {
        {"penalty", false, {"none", "l2", "l1", "elasticnet"}},
        {"alpha", true, {"1e-06", "1e-05", "1e-04", "1e-03", "1e-02"}},
        {"max_iter", true, {"1", "10", "100", "1000", "10000"}},
        {"tol", true, {"1e-05", "1e-04", "1e-03", "1e-02", "1e-01"}},
    };
    static const std::vector<ParamDef> pa = {
        {"C", true, {"0.01", "0.1", "1", "10", "100"}},
        {"max_iter", true, {"1", "10", "100", "1000", "10000"}},
        {"tol", true, {"1e-05", "1e-04", "1e-03", "1e-02", "1e-01"}},
        {"loss", false, {"hinge", "squared_hinge"}},
    };
    static const std::vector<ParamDef> forest = {
        {"n_estimators", true, {"1", "10", "100", "1000", "10000"}},
        {"criterion", false, {"gini", "entropy"}},
        {"min_samples_split", true, {"1", "2", "3", "4", "5"}},
        {"min_samples_leaf", true, {"1", "2", "3", "4", "5"}},
        {"max_features", false, {"none", "auto", "sqrt", "log2"}},
        {"bootstrap", false, {"true", "false"}}, // extension: the memorization mode
    };
    static const std::vector<ParamDef> knn = {
        {"n_neighbors", true, {"2", "4", "6", "8", "10"}},
        {"algorithm", false, {"auto", "ball_tree", "kd_tree", "brute"}},
        {"leaf_size", true, {"10", "20", "30", "40", "50"}},
        {"p", true, {"1", "2", "3", "4", "5"}},
    };
    static const std::vector<ParamDef> svc = {
        {"C", true, {"0.01", "0.1", "1", "10", "100"}},
        {"kernel", false, {"linear", "poly", "rbf", "sigmoid"}},
        {"degree", true, {"1", "2", "3", "4", "5"}},
        {"tol", true, {"1e-05", "1e-04", "1e-03", "1e-02", "1e-01"}},
        {"max_iter", true, {"1", "10", "100", "1000", "10000"}},
    };
    static const std::vector<ParamDef> lda = {
        {"solver", false, {"svd", "lsqr"}},
        {"tol", true, {"1e-05", "1e-04", "1e-03", "1e-02", "1e-01"}},
        {"shrinkage", false, {"none", "auto"}},
    };
    static const std::vector<ParamDef> gnb = {};

    switch (family) {
    case Family::Sgd: return sgd;
    case Family::Perceptron: return perceptron;
    case Family::PassiveAggressive: return pa;
    case Family::RandomForest: return forest;
    case Family::KNeighbors: return knn;
    case Family::Svc: return svc;
    case Family::Lda: return lda;
    case Family::Gnb: return gnb;
    }
    return gnb;
}

} // namespace

void validate_spec(const ClassifierSpec& spec) {
    const auto& defs = family_params(spec.family);
    for (const auto& [key, value] : spec.params) {
        const auto def = std::find_if(defs.begin(), defs.end(),
                                      [&, k = key](const ParamDef& d) { return d.name == k; });
        if (def == defs.end())
            throw std::invalid_argument("unknown parameter '" + key + "' for " +
                                        std::string(family_name(spec.family)));
        if (def->numeric) {
            const auto v = parse_double(value);
            if (!v || !std::isfinite(*v))
                throw std::invalid_argument("parameter '" + key + "' needs a finite number, got '" +
                                            value + "'");
        } else if (std::find(def->options.begin(), def->options.end(), value) ==
                   def->options.end()) {
            throw std::invalid_argument("parameter '" + key + "' does not allow value '" + value +
                                        "'");
        }
    }
}

ModelPtr fit_model(const ClassifierSpec& spec, const prep::FeatureMatrix& train,
                   std::uint64_t seed) {
    validate_spec(spec);
    switch (spec.family) {
    case Family::Sgd: return fit_sgd(spec, train, seed);
    case Family::Perceptron: return fit_perceptron(spec, train, seed);
    case Family::PassiveAggressive: return fit_passive_aggressive(spec, train, seed);
    case Family::RandomForest: return fit_random_forest(spec, train, seed);
    case Family::KNeighbors: return fit_knn(spec, train, seed);
    case Family::Svc: return fit_svc(spec, train, seed);
    case Family::Lda: return fit_lda(spec, train, seed);
    case Family::Gnb: return fit_gnb(spec, train, seed);
    }
    throw std::invalid_argument("unknown classifier family");
}

std::vector<TransmitterLabel> predict(const FittedModel& model, const prep::FeatureMatrix& eval) {
    if (eval.size() > 0 && eval.feature_dim() != model.input_dim())
        throw std::invalid_argument("predict: feature dimension mismatch (" +
                                    std::to_string(eval.feature_dim()) + " vs fitted " +
                                    std::to_string(model.input_dim()) + ")");
    return model.predict(eval);
}

namespace detail {

double param_double(const ClassifierSpec& spec, std::string_view key, double fallback) {
    const std::string* raw = spec.find(key);
    if (!raw)
        return fallback;
    const auto v = parse_double(*raw);
    if (!v || !std::isfinite(*v))
        throw std::invalid_argument("parameter '" + std::string(key) + "': bad number '" + *raw +
                                    "'");
    return *v;
}

int param_int(const ClassifierSpec& spec, std::string_view key, int fallback) {
    const double v = param_double(spec, key, static_cast<double>(fallback));
    return static_cast<int>(std::llround(v));
}

std::string param_str(const ClassifierSpec& spec, std::string_view key,
                      std::string_view fallback) {
    const std::string* raw = spec.find(key);
    return raw ? *raw : std::string(fallback);
}

void require_two_classes(const prep::FeatureMatrix& train, std::string_view who) {
    bool bob = false, eve = false;
    for (TransmitterLabel l : train.labels)
        (l == TransmitterLabel::Eve ? eve : bob) = true;
    if (!bob || !eve)
        throw SingleClassError(std::string(who) + ": training set holds a single class");
}

void require_finite(const prep::FeatureMatrix& train, std::string_view who) {
    if (!train.rows.allFinite())
        throw std::invalid_argument(std::string(who) + ": non-finite training features");
}

} // namespace detail

} // namespace chanauth::ml
