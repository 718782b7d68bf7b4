#include "chanauth/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "chanauth/numeric_io.hpp"
#include "chanauth/rng.hpp"

namespace chanauth {

double TraceDataset::eve_fraction() const {
    if (labels.empty())
        return 0.0;
    const auto eve = std::count(labels.begin(), labels.end(), TransmitterLabel::Eve);
    return static_cast<double>(eve) / static_cast<double>(labels.size());
}

void validate(const TraceDataset& ds) {
    if (ds.m < 0)
        throw std::invalid_argument("trace m must be nonnegative");
    if (ds.gains.rows() != static_cast<Eigen::Index>(ds.labels.size()))
        throw std::invalid_argument("trace gains/labels row count mismatch");
    if (ds.size() > 0 && ds.gains.cols() != ds.m)
        throw std::invalid_argument("trace gain vectors do not match declared m");
    if (!ds.gains.allFinite())
        throw std::invalid_argument("trace contains non-finite gains");
}

} // namespace chanauth

namespace chanauth::io {

std::string_view to_string(ParseErrorKind kind) {
    switch (kind) {
    case ParseErrorKind::Io: return "io";
    case ParseErrorKind::MalformedHeader: return "malformed-header";
    case ParseErrorKind::RaggedRow: return "ragged-row";
    case ParseErrorKind::UnknownLabel: return "unknown-label";
    case ParseErrorKind::NonFiniteValue: return "non-finite-value";
    case ParseErrorKind::BadIndex: return "bad-index";
    }
    return "unknown";
}

ParseError::ParseError(ParseErrorKind kind, const std::string& where, std::size_t line,
                       const std::string& detail)
    : std::runtime_error(where + ":" + std::to_string(line) + ": " +
                         std::string(to_string(kind)) + ": " + detail),
      kind_(kind), line_(line) {}

std::string trace_to_string(const TraceDataset& ds) {
    validate(ds);
    std::string out;
    out += "#m=" + std::to_string(ds.m) + "\n";
    for (const auto& [key, value] : ds.metadata) {
        if (key == "m")
            continue; // the mandatory first header owns this key
        out += "#" + key + "=" + value + "\n";
    }
    for (Eigen::Index k = 0; k < ds.size(); ++k) {
        out += std::to_string(k);
        out += ',';
        out += label_token(ds.labels[static_cast<std::size_t>(k)]);
        for (Eigen::Index l = 0; l < ds.m; ++l) {
            const Complex g = ds.gains(k, l);
            out += ',';
            out += format_double_17(g.real());
            out += ',';
            out += format_double_17(g.imag());
        }
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

} // namespace

TraceDataset trace_from_string(std::string_view text, const std::string& name) {
    TraceDataset ds;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool have_m = false;
    bool in_records = false;
    std::vector<TransmitterLabel> labels;
    std::vector<Complex> values;

    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty())
            continue;

        if (line.front() == '#') {
            if (in_records)
                throw ParseError(ParseErrorKind::MalformedHeader, name, line_no,
                                 "header line after records");
            const std::size_t eq = line.find('=');
            if (eq == std::string_view::npos)
                throw ParseError(ParseErrorKind::MalformedHeader, name, line_no,
                                 "header line without '='");
            const std::string key(line.substr(1, eq - 1));
            const std::string value(line.substr(eq + 1));
            if (!have_m) {
                if (key != "m")
                    throw ParseError(ParseErrorKind::MalformedHeader, name, line_no,
                                     "first header must be #m=<int>");
                const auto m = parse_int(value);
                if (!m || *m < 0)
                    throw ParseError(ParseErrorKind::MalformedHeader, name, line_no,
                                     "bad m value '" + value + "'");
                ds.m = static_cast<Eigen::Index>(*m);
                have_m = true;
            } else if (key == "m") {
                throw ParseError(ParseErrorKind::MalformedHeader, name, line_no,
                                 "duplicate #m header");
            } else {
                ds.metadata[key] = value;
            }
            continue;
        }

        if (!have_m)
            throw ParseError(ParseErrorKind::MalformedHeader, name, line_no,
                             "record before #m header");
        in_records = true;
        const auto fields = split(line, ',');
        const std::size_t expected = 2 + 2 * static_cast<std::size_t>(ds.m);
        if (fields.size() != expected)
            throw ParseError(ParseErrorKind::RaggedRow, name, line_no,
                             "expected " + std::to_string(expected) + " fields, got " +
                                 std::to_string(fields.size()));
        const auto k = parse_int(fields[0]);
        if (!k || *k != static_cast<long long>(labels.size()))
            throw ParseError(ParseErrorKind::BadIndex, name, line_no,
                             "record index must be " + std::to_string(labels.size()));
        if (fields[1] == "B")
            labels.push_back(TransmitterLabel::Bob);
        else if (fields[1] == "E")
            labels.push_back(TransmitterLabel::Eve);
        else
            throw ParseError(ParseErrorKind::UnknownLabel, name, line_no,
                             "unknown label token '" + std::string(fields[1]) + "'");
        for (Eigen::Index l = 0; l < ds.m; ++l) {
            const auto re = parse_double(fields[2 + 2 * static_cast<std::size_t>(l)]);
            const auto im = parse_double(fields[3 + 2 * static_cast<std::size_t>(l)]);
            if (!re || !im || !std::isfinite(*re) || !std::isfinite(*im))
                throw ParseError(ParseErrorKind::NonFiniteValue, name, line_no,
                                 "gain " + std::to_string(l) + " is not a finite number");
            values.emplace_back(*re, *im);
        }
    }

    if (!have_m)
        throw ParseError(ParseErrorKind::MalformedHeader, name, line_no, "missing #m header");

    const auto n = static_cast<Eigen::Index>(labels.size());
    ds.gains.resize(n, ds.m);
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index l = 0; l < ds.m; ++l)
            ds.gains(k, l) = values[static_cast<std::size_t>(k * ds.m + l)];
    ds.labels = std::move(labels);
    validate(ds);
    return ds;
}

void save_trace(const TraceDataset& ds, const std::filesystem::path& path) {
    const std::string text = trace_to_string(ds);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ParseError(ParseErrorKind::Io, path.string(), 0, "cannot open for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out)
        throw ParseError(ParseErrorKind::Io, path.string(), 0, "write failed");
}

TraceDataset load_trace(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError(ParseErrorKind::Io, path.string(), 0, "cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return trace_from_string(ss.str(), path.string());
}

std::vector<std::filesystem::path> list_trace_files(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw ParseError(ParseErrorKind::Io, dir.string(), 0, "not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
    return files;
}

TraceCollection partition_collection(std::vector<TraceDataset> datasets, std::size_t l_valid,
                                     PartitionPolicy policy, std::uint64_t shuffle_seed) {
    if (l_valid >= datasets.size())
        throw std::invalid_argument("l_valid must be smaller than the number of datasets");
    std::vector<std::size_t> order(datasets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (policy == PartitionPolicy::SeededShuffle) {
        Rng rng(shuffle_seed);
        for (std::size_t i = order.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng.below(i));
            std::swap(order[i - 1], order[j]);
        }
    }
    TraceCollection collection;
    collection.datasets = std::move(datasets);
    collection.validation.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(l_valid));
    collection.testing.assign(order.begin() + static_cast<std::ptrdiff_t>(l_valid), order.end());
    return collection;
}

DatasetRefs select(const TraceCollection& collection, const std::vector<std::size_t>& indices) {
    DatasetRefs refs;
    refs.reserve(indices.size());
    for (std::size_t idx : indices)
        refs.push_back(&collection.datasets.at(idx));
    return refs;
}

} // namespace chanauth::io
