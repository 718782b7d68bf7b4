#include "chanauth/config_file.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "chanauth/grid_search.hpp"
#include "chanauth/numeric_io.hpp"

namespace chanauth::cfg {

namespace {

std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string_view::npos)
        return {};
    const auto end = s.find_last_not_of(" \t");
    return std::string(s.substr(begin, end - begin + 1));
}

} // namespace

const std::string* RawConfig::find(const std::string& section, const std::string& key) const {
    const auto sec = sections.find(section);
    if (sec == sections.end())
        return nullptr;
    const std::string* last = nullptr;
    for (const auto& [k, v] : sec->second)
        if (k == key)
            last = &v;
    return last;
}

std::vector<std::string> RawConfig::find_all(const std::string& section,
                                             const std::string& key) const {
    std::vector<std::string> out;
    const auto sec = sections.find(section);
    if (sec == sections.end())
        return out;
    for (const auto& [k, v] : sec->second)
        if (k == key)
            out.push_back(v);
    return out;
}

RawConfig parse_ini(const std::string& text, const std::string& name) {
    RawConfig raw;
    std::string section;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#' || stripped.front() == ';')
            continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']')
                throw ConfigError(name + ":" + std::to_string(line_no) + ": unterminated section");
            section = trim(stripped.substr(1, stripped.size() - 2));
            raw.sections.try_emplace(section);
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(name + ":" + std::to_string(line_no) + ": expected key=value");
        raw.sections[section].emplace_back(trim(stripped.substr(0, eq)),
                                           trim(stripped.substr(eq + 1)));
    }
    return raw;
}

RawConfig load_ini(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_ini(ss.str(), path.string());
}

namespace {

double as_double(const std::string& value, const std::string& where) {
    const auto v = parse_double(value);
    if (!v)
        throw ConfigError(where + ": bad number '" + value + "'");
    return *v;
}

long long as_int(const std::string& value, const std::string& where) {
    const auto v = parse_int(value);
    if (!v)
        throw ConfigError(where + ": bad integer '" + value + "'");
    return *v;
}

std::vector<double> as_double_list(const std::string& value, const std::string& where) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string tok;
    while (std::getline(ss, tok, ','))
        out.push_back(as_double(trim(tok), where));
    if (out.empty())
        throw ConfigError(where + ": empty list");
    return out;
}

std::vector<int> as_int_list(const std::string& value, const std::string& where) {
    std::vector<int> out;
    for (double v : as_double_list(value, where))
        out.push_back(static_cast<int>(v));
    return out;
}

struct SectionReader {
    const RawConfig& raw;
    std::string section;
    std::set<std::string> known;

    const std::string* get(const std::string& key) {
        known.insert(key);
        return raw.find(section, key);
    }

    bool read(const std::string& key, double& out) {
        if (const auto* v = get(key)) {
            out = as_double(*v, section + "." + key);
            return true;
        }
        return false;
    }
    bool read(const std::string& key, int& out) {
        if (const auto* v = get(key)) {
            out = static_cast<int>(as_int(*v, section + "." + key));
            return true;
        }
        return false;
    }
    bool read(const std::string& key, std::uint64_t& out) {
        if (const auto* v = get(key)) {
            const auto i = as_int(*v, section + "." + key);
            if (i < 0)
                throw ConfigError(section + "." + key + ": must be nonnegative");
            out = static_cast<std::uint64_t>(i);
            return true;
        }
        return false;
    }
    bool read(const std::string& key, std::string& out) {
        if (const auto* v = get(key)) {
            out = *v;
            return true;
        }
        return false;
    }

    void finish() const {
        const auto sec = raw.sections.find(section);
        if (sec == raw.sections.end())
            return;
        for (const auto& [k, v] : sec->second)
            if (!known.count(k))
                throw ConfigError("unknown key '" + k + "' in section [" + section + "]");
    }
};

void read_link(SectionReader& r, const std::string& prefix, sim::LinkModel& link) {
    if (const auto* v = r.get(prefix + "_tap_delays"))
        link.tap_delays = as_int_list(*v, r.section + "." + prefix + "_tap_delays");
    if (const auto* v = r.get(prefix + "_tap_powers"))
        link.tap_powers = as_double_list(*v, r.section + "." + prefix + "_tap_powers");
    r.read(prefix + "_temporal_correlation", link.temporal_correlation);
    r.read(prefix + "_seed", link.seed);
}

} // namespace

HarnessConfig default_config() {
    HarnessConfig hc;
    hc.scenario.m_subcarriers = 48;
    hc.scenario.fft_size = 64;
    hc.scenario.n_packets = 5000;
    hc.scenario.attack_intensity = 0.25;
    hc.scenario.noise_std = 0.05;
    hc.scenario.packet_period_ms = 10.0;
    hc.scenario.n_train_hint = 10;
    hc.scenario.seed = 1;
    hc.scenario.bob_link = {{0, 3, 7}, {0.5, 0.3, 0.2}, 0.9999999, 0};
    hc.scenario.eve_link = {{0, 2, 5, 9, 13}, {0.35, 0.25, 0.2, 0.12, 0.08}, 0.9999999, 1};
    hc.l_total = 10;
    hc.l_valid = 2;
    hc.preprocess = {48, prep::Reduction::Mean, 5, 10};
    hc.grid_families.assign(std::begin(ml::kAllFamilies), std::end(ml::kAllFamilies));
    hc.sweep.variable = harness::SweepVariable::AttackIntensity;
    hc.sweep.values = harness::default_sweep_values(hc.sweep.variable);
    hc.sweep.repetitions = 3;
    hc.sweep.scenario = hc.scenario;
    hc.sweep.preprocess = hc.preprocess;
    hc.sweep.l_total = hc.l_total;
    hc.sweep.l_valid = hc.l_valid;
    return hc;
}

HarnessConfig resolve_config(const RawConfig& raw) {
    HarnessConfig hc = default_config();

    for (const auto& [name, entries] : raw.sections) {
        static const std::set<std::string> allowed = {"scenario", "collection", "preprocess",
                                                      "gridsearch", "sweep"};
        if (!allowed.count(name))
            throw ConfigError("unknown config section [" + name + "]");
        (void)entries;
    }

    {
        SectionReader r{raw, "scenario", {}};
        r.read("m_subcarriers", hc.scenario.m_subcarriers);
        r.read("fft_size", hc.scenario.fft_size);
        r.read("n_packets", hc.scenario.n_packets);
        r.read("attack_intensity", hc.scenario.attack_intensity);
        r.read("noise_std", hc.scenario.noise_std);
        r.read("packet_period_ms", hc.scenario.packet_period_ms);
        r.read("n_train_hint", hc.scenario.n_train_hint);
        r.read("seed", hc.scenario.seed);
        read_link(r, "bob", hc.scenario.bob_link);
        read_link(r, "eve", hc.scenario.eve_link);
        r.finish();
    }
    {
        SectionReader r{raw, "collection", {}};
        r.read("l_total", hc.l_total);
        r.read("l_valid", hc.l_valid);
        std::string policy;
        if (r.read("partition", policy)) {
            if (policy == "ordered")
                hc.partition = io::PartitionPolicy::Ordered;
            else if (policy == "seeded-shuffle")
                hc.partition = io::PartitionPolicy::SeededShuffle;
            else
                throw ConfigError("collection.partition must be ordered or seeded-shuffle");
        }
        r.read("shuffle_seed", hc.shuffle_seed);
        r.finish();
    }
    {
        SectionReader r{raw, "preprocess", {}};
        int m_red = static_cast<int>(hc.preprocess.m_red);
        if (r.read("m_red", m_red))
            hc.preprocess.m_red = m_red;
        std::string reduction;
        if (r.read("reduction", reduction)) {
            if (reduction == "sample")
                hc.preprocess.reduction = prep::Reduction::Sample;
            else if (reduction == "mean")
                hc.preprocess.reduction = prep::Reduction::Mean;
            else
                throw ConfigError("preprocess.reduction must be sample or mean");
        }
        r.read("window", hc.preprocess.window);
        int n_train = static_cast<int>(hc.preprocess.n_train);
        if (r.read("n_train", n_train))
            hc.preprocess.n_train = n_train;
        r.finish();
    }
    {
        SectionReader r{raw, "gridsearch", {}};
        std::string families;
        if (r.read("families", families)) {
            hc.grid_families.clear();
            std::stringstream ss(families);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                const auto fam = ml::family_from_name(trim(tok));
                if (!fam)
                    throw ConfigError("gridsearch.families: unknown family '" + trim(tok) + "'");
                hc.grid_families.push_back(*fam);
            }
            if (hc.grid_families.empty())
                throw ConfigError("gridsearch.families: empty list");
        }
        r.finish();
    }
    {
        SectionReader r{raw, "sweep", {}};
        hc.sweep_section_present = raw.sections.count("sweep") > 0;
        std::string variable;
        bool have_values = false;
        if (r.read("variable", variable)) {
            const auto v = harness::sweep_variable_from_name(variable);
            if (!v)
                throw ConfigError("sweep.variable: unknown variable '" + variable + "'");
            hc.sweep.variable = *v;
            hc.sweep.values = harness::default_sweep_values(*v);
        }
        if (const auto* v = r.get("values")) {
            hc.sweep.values = as_double_list(*v, "sweep.values");
            have_values = true;
        }
        (void)have_values;
        r.read("repetitions", hc.sweep.repetitions);
        for (const std::string& spec_text : raw.find_all("sweep", "classifier")) {
            try {
                auto spec = ml::parse_spec(spec_text);
                ml::validate_spec(spec);
                hc.sweep.classifiers.push_back(std::move(spec));
            } catch (const std::exception& e) {
                throw ConfigError(std::string("sweep.classifier: ") + e.what());
            }
        }
        r.known.insert("classifier");
        r.finish();
    }

    hc.sweep.scenario = hc.scenario;
    hc.sweep.preprocess = hc.preprocess;
    hc.sweep.l_total = hc.l_total;
    hc.sweep.l_valid = hc.l_valid;
    hc.sweep.partition = hc.partition;
    hc.sweep.shuffle_seed = hc.shuffle_seed;
    hc.sweep.seed = hc.scenario.seed;
    return hc;
}

} // namespace chanauth::cfg
