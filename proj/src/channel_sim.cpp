#include "chanauth/channel_sim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "chanauth/numeric_io.hpp"

namespace chanauth::sim {

namespace {

constexpr std::uint64_t kBobStream = 0xb0b11f4a90d3c2e1ULL;
constexpr std::uint64_t kEveStream = 0xe7e55c3b18f6a9d4ULL;
constexpr std::uint64_t kScheduleStream = 0x5c4ed01e2b7f8a63ULL;
constexpr std::uint64_t kNoiseStream = 0x401535aa6c9d0e17ULL;
constexpr int kMaxScheduleRetries = 1000;

} // namespace

void validate(const LinkModel& model, int fft_size) {
    if (model.tap_delays.empty())
        throw std::invalid_argument("link model needs at least one tap");
    if (model.tap_delays.size() != model.tap_powers.size())
        throw std::invalid_argument("tap_delays and tap_powers length mismatch");
    double sum = 0.0;
    for (double p : model.tap_powers) {
        if (!(p > 0.0))
            throw std::invalid_argument("tap powers must be strictly positive");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("tap powers must sum to 1, got " + format_double_shortest(sum));
    int prev = -1;
    for (int d : model.tap_delays) {
        if (d <= prev)
            throw std::invalid_argument("tap delays must be strictly increasing");
        if (d < 0 || d >= fft_size)
            throw std::invalid_argument("tap delay " + std::to_string(d) +
                                        " outside [0, fft_size)");
        prev = d;
    }
    if (!(model.temporal_correlation >= 0.0 && model.temporal_correlation <= 1.0))
        throw std::invalid_argument("temporal_correlation must lie in [0, 1]");
}

void validate(const ScenarioConfig& config) {
    if (config.fft_size <= 0)
        throw std::invalid_argument("fft_size must be positive");
    if (config.m_subcarriers <= 0 || config.m_subcarriers > config.fft_size)
        throw std::invalid_argument("m_subcarriers must lie in [1, fft_size]");
    if (config.n_packets < 2)
        throw std::invalid_argument("n_packets must be at least 2");
    if (!(config.attack_intensity > 0.0 && config.attack_intensity < 1.0))
        throw std::invalid_argument("attack_intensity must be strictly between 0 and 1");
    if (config.noise_std < 0.0)
        throw std::invalid_argument("noise_std must be nonnegative");
    if (config.n_train_hint < 0)
        throw std::invalid_argument("n_train_hint must be nonnegative");
    validate(config.bob_link, config.fft_size);
    validate(config.eve_link, config.fft_size);
}

LinkState init_link(const LinkModel& model) {
    // Delay bounds against the FFT grid are checked where a grid exists;
    // here the grid-free invariants are enforced.
    int max_delay = 0;
    for (int d : model.tap_delays)
        max_delay = std::max(max_delay, d);
    validate(model, max_delay + 1);
    LinkState state;
    state.rng = Rng(model.seed);
    state.packet_index = 0;
    const auto n = static_cast<Eigen::Index>(model.tap_powers.size());
    state.taps.resize(n);
    for (Eigen::Index t = 0; t < n; ++t)
        state.taps[t] = state.rng.complex_gaussian(model.tap_powers[static_cast<std::size_t>(t)]);
    return state;
}

LinkState evolve_link(const LinkState& state, const LinkModel& model) {
    if (state.taps.size() != static_cast<Eigen::Index>(model.tap_powers.size()))
        throw std::invalid_argument("link state does not match model tap count");
    LinkState next = state;
    const double rho = model.temporal_correlation;
    const double innovation = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    for (Eigen::Index t = 0; t < next.taps.size(); ++t) {
        const Complex w =
            next.rng.complex_gaussian(model.tap_powers[static_cast<std::size_t>(t)]);
        next.taps[t] = rho * state.taps[t] + innovation * w;
    }
    next.packet_index = state.packet_index + 1;
    return next;
}

std::vector<int> active_bins(int m, int fft_size) {
    if (m <= 0 || m > fft_size)
        throw std::invalid_argument("active_bins: m must lie in [1, fft_size]");
    std::vector<int> bins;
    bins.reserve(static_cast<std::size_t>(m));
    if (m == fft_size) {
        for (int b = 0; b < fft_size; ++b)
            bins.push_back(b);
        return bins;
    }
    const int below = (m + 1) / 2; // negative side gets the extra bin for odd m
    const int above = m / 2;
    for (int b = -below; b <= -1; ++b)
        bins.push_back(b);
    for (int b = 1; b <= above; ++b)
        bins.push_back(b);
    return bins;
}

ChannelEstimate freq_response(const LinkState& state, const LinkModel& model,
                              const ScenarioConfig& config) {
    const auto bins = active_bins(config.m_subcarriers, config.fft_size);
    ChannelEstimate gains(static_cast<Eigen::Index>(bins.size()));
    const double base = -2.0 * M_PI / static_cast<double>(config.fft_size);
    for (std::size_t l = 0; l < bins.size(); ++l) {
        Complex acc{0.0, 0.0};
        for (Eigen::Index t = 0; t < state.taps.size(); ++t) {
            const double phase =
                base * static_cast<double>(model.tap_delays[static_cast<std::size_t>(t)]) *
                static_cast<double>(bins[l]);
            acc += state.taps[t] * Complex{std::cos(phase), std::sin(phase)};
        }
        gains[static_cast<Eigen::Index>(l)] = acc;
    }
    return gains;
}

ChannelEstimate add_estimation_noise(const ChannelEstimate& h, double noise_std, Rng& rng) {
    if (noise_std < 0.0)
        throw std::invalid_argument("noise_std must be nonnegative");
    ChannelEstimate out(h.size());
    for (Eigen::Index l = 0; l < h.size(); ++l) {
        const double re = rng.gaussian() * noise_std;
        const double im = rng.gaussian() * noise_std;
        out[l] = h[l] + Complex{re, im};
    }
    return out;
}

TraceDataset synthesize_trace(const ScenarioConfig& config) {
    validate(config);
    const int n = config.n_packets;

    // Attack schedule: i.i.d. Bernoulli(P_AI), redrawn until the first
    // n_train_hint packets contain both labels.
    Rng schedule_rng(derive_seed(config.seed, kScheduleStream));
    std::vector<TransmitterLabel> labels(static_cast<std::size_t>(n));
    const int hint = std::min(config.n_train_hint, n);
    bool ok = false;
    for (int attempt = 0; attempt < kMaxScheduleRetries && !ok; ++attempt) {
        bool bob = false, eve = false;
        for (int k = 0; k < n; ++k) {
            const bool is_eve = schedule_rng.uniform() < config.attack_intensity;
            labels[static_cast<std::size_t>(k)] =
                is_eve ? TransmitterLabel::Eve : TransmitterLabel::Bob;
            if (k < hint)
                (is_eve ? eve : bob) = true;
        }
        ok = hint < 2 || (bob && eve);
    }
    if (!ok)
        throw std::runtime_error("synthesize_trace: could not draw a schedule with both labels "
                                 "in the first " +
                                 std::to_string(hint) + " packets");

    LinkModel bob_model = config.bob_link;
    LinkModel eve_model = config.eve_link;
    bob_model.seed = derive_seed(config.seed, kBobStream, config.bob_link.seed);
    eve_model.seed = derive_seed(config.seed, kEveStream, config.eve_link.seed);
    LinkState bob = init_link(bob_model);
    LinkState eve = init_link(eve_model);
    Rng noise_rng(derive_seed(config.seed, kNoiseStream));

    TraceDataset ds;
    ds.m = config.m_subcarriers;
    ds.gains.resize(n, ds.m);
    ds.labels = labels;
    for (int k = 0; k < n; ++k) {
        bob = evolve_link(bob, bob_model);
        eve = evolve_link(eve, eve_model);
        const bool is_eve = labels[static_cast<std::size_t>(k)] == TransmitterLabel::Eve;
        const LinkState& chosen = is_eve ? eve : bob;
        const LinkModel& chosen_model = is_eve ? eve_model : bob_model;
        ds.gains.row(k) =
            add_estimation_noise(freq_response(chosen, chosen_model, config), config.noise_std,
                                 noise_rng)
                .transpose();
    }

    ds.metadata["scenario"] = "synthetic";
    ds.metadata["seed"] = std::to_string(config.seed);
    ds.metadata["attack_intensity"] = format_double_shortest(config.attack_intensity);
    ds.metadata["noise_std"] = format_double_shortest(config.noise_std);
    ds.metadata["packet_period_ms"] = format_double_shortest(config.packet_period_ms);
    ds.metadata["fft_size"] = std::to_string(config.fft_size);
    return ds;
}

} // namespace chanauth::sim
