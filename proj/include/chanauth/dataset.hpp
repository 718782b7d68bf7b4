#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chanauth/types.hpp"

namespace chanauth {

/// One time-ordered trace of per-packet channel estimates with transmitter
/// labels. Record k lives in gains.row(k) / labels[k]; record indices are
/// contiguous from zero by construction.
struct TraceDataset {
    Eigen::Index m = 0;                          ///< active subcarriers per record
    Eigen::MatrixXcd gains;                      ///< n_records x m
    std::vector<TransmitterLabel> labels;        ///< n_records
    std::map<std::string, std::string> metadata; ///< scenario, seed, period, ...

    Eigen::Index size() const { return gains.rows(); }

    /// Fraction of records labelled Eve; 0 for an empty trace.
    double eve_fraction() const;
};

/// Throws std::invalid_argument when shapes disagree, entries are
/// non-finite, or m is negative.
void validate(const TraceDataset& ds);

} // namespace chanauth
