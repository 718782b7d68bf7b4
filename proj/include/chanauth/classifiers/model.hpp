#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "chanauth/preprocess.hpp"
#include "chanauth/types.hpp"

namespace chanauth::ml {

enum class Family : std::uint8_t {
    Sgd,
    Perceptron,
    PassiveAggressive,
    RandomForest,
    KNeighbors,
    Svc,
    Lda,
    Gnb,
};

inline constexpr Family kAllFamilies[] = {
    Family::Sgd,         Family::Perceptron, Family::PassiveAggressive, Family::RandomForest,
    Family::KNeighbors,  Family::Svc,        Family::Lda,               Family::Gnb,
};

/// Canonical display name ("SGDClassifier", "PassiveAgressiveClassifier", ...).
std::string_view family_name(Family family);

/// Inverse of family_name; also accepts the double-g spelling
/// "PassiveAggressiveClassifier" and "GNB"/"LDA"/"KNN" shorthands.
std::optional<Family> family_from_name(std::string_view name);

/// A classifier family plus one point of its hyperparameter space.
/// Values are kept as strings in the config-file spelling; numeric values
/// are parsed on use.
struct ClassifierSpec {
    Family family = Family::Sgd;
    std::vector<std::pair<std::string, std::string>> params;

    const std::string* find(std::string_view key) const;
    void set(std::string_view key, std::string value);
};

/// "Family key=value key=value ..." with params in declaration order.
std::string to_string(const ClassifierSpec& spec);

/// Parses the serialized form above. Throws std::invalid_argument on an
/// unknown family or a malformed token.
ClassifierSpec parse_spec(std::string_view text);

/// Checks every key against the family's declared parameter set and every
/// categorical value against its declared options. Numeric parameters
/// accept any finite value (the declared options are the grid-search
/// points, not a domain restriction). Throws std::invalid_argument.
void validate_spec(const ClassifierSpec& spec);

class FittedModel {
  public:
    virtual ~FittedModel() = default;

    virtual Family family() const = 0;
    virtual Eigen::Index input_dim() const = 0;
    virtual std::vector<TransmitterLabel> predict(const prep::FeatureMatrix& eval) const = 0;
};

using ModelPtr = std::unique_ptr<FittedModel>;

/// Validates the spec and dispatches to the family's fit routine. The seed
/// feeds the stochastic families (forest bootstrap); deterministic fits
/// accept and ignore it.
ModelPtr fit_model(const ClassifierSpec& spec, const prep::FeatureMatrix& train,
                   std::uint64_t seed = 0);

/// One label per eval row. Throws std::invalid_argument on a feature
/// dimension mismatch.
std::vector<TransmitterLabel> predict(const FittedModel& model, const prep::FeatureMatrix& eval);

namespace detail {
/// Shared param-parsing helpers for the family fit routines.
double param_double(const ClassifierSpec& spec, std::string_view key, double fallback);
int param_int(const ClassifierSpec& spec, std::string_view key, int fallback);
std::string param_str(const ClassifierSpec& spec, std::string_view key, std::string_view fallback);
void require_two_classes(const prep::FeatureMatrix& train, std::string_view who);
void require_finite(const prep::FeatureMatrix& train, std::string_view who);
} // namespace detail

} // namespace chanauth::ml
