#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "chanauth/classifiers/model.hpp"

namespace chanauth::ml {

/// Gini impurity of a two-class node given per-class counts.
double gini_impurity(std::size_t n_bob, std::size_t n_eve);
/// Shannon entropy in bits.
double entropy_impurity(std::size_t n_bob, std::size_t n_eve);

/// CART forest. Each tree grows on a bootstrap resample (disable with
/// bootstrap=false); at every node the best (feature, threshold) over a
/// fresh random feature subset is chosen by impurity decrease. Nodes stop
/// on purity, min_samples_split, min_samples_leaf, or zero decrease.
/// Prediction is the majority vote across trees; ties go to Bob.
///
/// min_samples_split=1 is normalized to 2 (a 1-sample node cannot split).
/// max_features: none = all, auto/sqrt = ceil(sqrt(d)), log2 = ceil(log2(d)).
ModelPtr fit_random_forest(const ClassifierSpec& spec, const prep::FeatureMatrix& train,
                           std::uint64_t seed = 0);

} // namespace chanauth::ml
