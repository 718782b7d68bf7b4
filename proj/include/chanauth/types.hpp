#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>

#include <Eigen/Dense>

namespace chanauth {

/// Origin hypothesis for one received packet: Bob is the legitimate
/// transmitter (H0), Eve the spoofing attacker (H1).
enum class TransmitterLabel : std::uint8_t { Bob = 0, Eve = 1 };

/// Fixed sign encoding shared by every classifier: Bob -> -1, Eve -> +1.
inline constexpr double label_sign(TransmitterLabel l) {
    return l == TransmitterLabel::Eve ? 1.0 : -1.0;
}

/// Decision sign -> label. Zero resolves to Bob: the detector never flags
/// a packet on a tie.
inline constexpr TransmitterLabel sign_label(double s) {
    return s > 0.0 ? TransmitterLabel::Eve : TransmitterLabel::Bob;
}

inline constexpr char label_token(TransmitterLabel l) {
    return l == TransmitterLabel::Eve ? 'E' : 'B';
}

using Complex = std::complex<double>;

/// Per-subcarrier complex channel gains of one packet (length M).
using ChannelEstimate = Eigen::VectorXcd;

/// Thrown when an operation that needs both transmitter classes sees
/// only one of them (e.g. a single-class training split).
class SingleClassError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace chanauth
