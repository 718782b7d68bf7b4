#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chanauth/dataset.hpp"

namespace chanauth::io {

enum class ParseErrorKind {
    Io,              ///< file could not be opened / written
    MalformedHeader, ///< missing or bad '#m=' header, stray header line
    RaggedRow,       ///< wrong field count for the declared m
    UnknownLabel,    ///< label token other than B / E
    NonFiniteValue,  ///< unparsable or non-finite numeric field
    BadIndex,        ///< record indices not contiguous from 0
};

std::string_view to_string(ParseErrorKind kind);

class ParseError : public std::runtime_error {
  public:
    ParseError(ParseErrorKind kind, const std::string& where, std::size_t line,
               const std::string& detail);

    ParseErrorKind kind() const { return kind_; }
    std::size_t line() const { return line_; }

  private:
    ParseErrorKind kind_;
    std::size_t line_;
};

/// Trace CSV grammar:
///   header lines '#key=value', first line mandatory '#m=<int>';
///   then one record per line 'k,label,re_0,im_0,...,re_{m-1},im_{m-1}'
///   with label B or E and floats at 17 significant digits.
/// save -> load -> save is byte-identical.
std::string trace_to_string(const TraceDataset& ds);
TraceDataset trace_from_string(std::string_view text, const std::string& name = "<memory>");

void save_trace(const TraceDataset& ds, const std::filesystem::path& path);
TraceDataset load_trace(const std::filesystem::path& path);

/// Trace files of a directory in lexicographic name order; this order
/// defines dataset order for partitioning.
std::vector<std::filesystem::path> list_trace_files(const std::filesystem::path& dir);

enum class PartitionPolicy { Ordered, SeededShuffle };

/// A collection of traces split into validation and testing sets.
struct TraceCollection {
    std::vector<TraceDataset> datasets;
    std::vector<std::size_t> validation; ///< indices into datasets
    std::vector<std::size_t> testing;    ///< complement, in order
};

/// Ordered: the first l_valid datasets validate, the rest test.
/// SeededShuffle: a deterministic permutation of the indices is drawn from
/// shuffle_seed before the same ordered cut is applied.
TraceCollection partition_collection(std::vector<TraceDataset> datasets, std::size_t l_valid,
                                     PartitionPolicy policy, std::uint64_t shuffle_seed = 0);

/// Borrowed views over a subset of a collection's datasets.
using DatasetRefs = std::vector<const TraceDataset*>;
DatasetRefs select(const TraceCollection& collection, const std::vector<std::size_t>& indices);

} // namespace chanauth::io
