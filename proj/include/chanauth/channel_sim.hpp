#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "chanauth/dataset.hpp"
#include "chanauth/rng.hpp"
#include "chanauth/types.hpp"

namespace chanauth::sim {

/// Tapped-delay-line Rayleigh link. Between packets each tap follows a
/// first-order Gauss-Markov recursion whose coefficient stands in for the
/// channel coherence time: 1 freezes the channel, 0 redraws it per packet.
struct LinkModel {
    std::vector<int> tap_delays;        ///< strictly increasing, < fft_size
    std::vector<double> tap_powers;     ///< mean linear powers, > 0, sum to 1
    double temporal_correlation = 1.0;  ///< AR(1) coefficient in [0, 1]
    std::uint64_t seed = 0;
};

/// Throws std::invalid_argument on violated invariants.
void validate(const LinkModel& model, int fft_size);

/// Current tap gains of one link plus the stream that evolves them.
struct LinkState {
    Eigen::VectorXcd taps;
    int packet_index = 0;
    Rng rng{0};
};

struct ScenarioConfig {
    int m_subcarriers = 48;
    int fft_size = 64;
    int n_packets = 5000;
    double attack_intensity = 0.25; ///< fraction of packets injected by Eve, in (0,1)
    double noise_std = 0.05;        ///< per-component std of the estimation error
    LinkModel bob_link;
    LinkModel eve_link;
    double packet_period_ms = 10.0; ///< metadata only
    int n_train_hint = 10;          ///< first packets guaranteed to hold both labels
    std::uint64_t seed = 0;
};

void validate(const ScenarioConfig& config);

/// Draws the initial tap gains, each circularly symmetric complex Gaussian
/// with variance equal to the tap's mean power. Deterministic in model.seed.
LinkState init_link(const LinkModel& model);

/// One packet step: h' = rho*h + sqrt(1-rho^2)*w with w drawn at the tap's
/// power, preserving the stationary distribution for any rho.
LinkState evolve_link(const LinkState& state, const LinkModel& model);

/// Active-subcarrier bins of the fft_size grid, in increasing frequency
/// order. For m < fft_size this is the contiguous block around DC with DC
/// excluded ({-m/2..-1, 1..m/2} for even m); for m == fft_size all bins
/// 0..fft_size-1 in natural DFT order. Negative entries alias bin+fft_size.
std::vector<int> active_bins(int m, int fft_size);

/// Frequency response on the active bins: gains[l] = sum_t h_t *
/// exp(-j*2*pi*d_t*bin_l/fft_size).
ChannelEstimate freq_response(const LinkState& state, const LinkModel& model,
                              const ScenarioConfig& config);

/// Estimate = response + noise, noise i.i.d. complex Gaussian with the given
/// per-component standard deviation.
ChannelEstimate add_estimation_noise(const ChannelEstimate& h, double noise_std, Rng& rng);

/// Synthesizes a full labelled trace. Both links evolve every packet; the
/// transmitter is Eve with probability attack_intensity, i.i.d. per packet.
/// The Bernoulli schedule is redrawn (bounded retries) until the first
/// n_train_hint packets contain at least one packet of each label.
/// Fully deterministic in config.seed.
TraceDataset synthesize_trace(const ScenarioConfig& config);

} // namespace chanauth::sim
