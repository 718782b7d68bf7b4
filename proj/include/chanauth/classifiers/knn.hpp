#pragma once

#include <cstdint>

#include "chanauth/classifiers/model.hpp"

namespace chanauth::ml {

/// k-nearest-neighbour classifier under the Minkowski-p metric.
///
/// Backends: brute, kd_tree, ball_tree (both exact, leaf_size bounds their
/// leaves), auto = kd_tree when d <= 20 else brute. Neighbours are ordered
/// by (distance, training index), so equal distances resolve identically in
/// every backend; vote ties go to Bob. Throws when n_neighbors exceeds the
/// training size.
ModelPtr fit_knn(const ClassifierSpec& spec, const prep::FeatureMatrix& train,
                 std::uint64_t seed = 0);

} // namespace chanauth::ml
