#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "mrham/types.hpp"

namespace mrham {

// Phase of the oscillatory term in the fast step response; the atan2 branch
// makes the response vanish exactly at t = 0.
inline double phase_offset(const FastDynamics& fast) {
    return std::atan2(-fast.damped_frequency, -fast.decay_rate) - std::acos(-1.0) / 2.0;
}

// Unit step response of the fast block:
// k * [1 + sqrt(alpha^2 + omega^2)/omega * cos(omega t + phi) * exp(-alpha t)].
inline double step_response_fast(const FastDynamics& fast, double t) {
    if (!(t >= 0.0))
        throw std::invalid_argument("step_response_fast: t must be >= 0");
    const double a = fast.decay_rate;
    const double w = fast.damped_frequency;
    const double amp = std::sqrt(a * a + w * w) / w;
    const double phi = phase_offset(fast);
    return fast.gain * (1.0 + amp * std::cos(w * t + phi) * std::exp(-a * t));
}

// Unit step response of the slow block:
// z0/s0 - (z0 - s0)/s0 * exp(-s0 t); starts at 1, settles at z0/s0.
inline double step_response_slow(const SlowDynamics& slow, double t) {
    if (!(t >= 0.0))
        throw std::invalid_argument("step_response_slow: t must be >= 0");
    const double s0 = slow.pole;
    const double z0 = slow.zero;
    return z0 / s0 - (z0 - s0) / s0 * std::exp(-s0 * t);
}

struct FrequencyPoint {
    double magnitude = 0.0;
    double phase = 0.0;  // radians
};

struct FrequencyResponse {
    std::vector<double> omega;  // rad/s
    std::vector<FrequencyPoint> fast;
    std::vector<FrequencyPoint> slow;
    std::vector<FrequencyPoint> total;
};

inline std::complex<double> fast_transfer(const FastDynamics& fast, std::complex<double> s) {
    const double a = fast.decay_rate;
    const double w = fast.damped_frequency;
    const double w2 = a * a + w * w;
    return fast.gain * w2 / (s * s + 2.0 * a * s + w2);
}

inline std::complex<double> slow_transfer(const SlowDynamics& slow, std::complex<double> s) {
    return (s + slow.zero) / (s + slow.pole);
}

inline FrequencyResponse frequency_response(const FastDynamics& fast, const SlowDynamics& slow,
                                            const std::vector<double>& frequencies) {
    fast.validate();
    slow.validate();
    for (double w : frequencies)
        if (!(w > 0.0) || !std::isfinite(w))
            throw std::invalid_argument("frequency_response: frequencies must be positive");

    FrequencyResponse out;
    out.omega = frequencies;
    out.fast.reserve(frequencies.size());
    out.slow.reserve(frequencies.size());
    out.total.reserve(frequencies.size());
    for (double w : frequencies) {
        const std::complex<double> s(0.0, w);
        const auto gf = fast_transfer(fast, s);
        const auto gs = slow_transfer(slow, s);
        const auto gt = gf * gs;
        out.fast.push_back({std::abs(gf), std::arg(gf)});
        out.slow.push_back({std::abs(gs), std::arg(gs)});
        out.total.push_back({std::abs(gt), std::arg(gt)});
    }
    return out;
}

}  // namespace mrham
