#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mrham/types.hpp"

namespace mrham {

// Strictly proper third-order transfer function
//   G(s) = (b1 s + b0) / (s^3 + a2 s^2 + a1 s + a0),
// the shape of both the fast*slow product and the single-TF baseline model.
struct ThirdOrderTf {
    double b1 = 0.0;
    double b0 = 0.0;
    double a2 = 0.0;
    double a1 = 0.0;
    double a0 = 0.0;

    static ThirdOrderTf from_blocks(const FastDynamics& fast, const SlowDynamics& slow) {
        const double a = fast.decay_rate;
        const double w = fast.damped_frequency;
        const double s0 = slow.pole;
        const double w2 = a * a + w * w;
        const double num = fast.gain * w2;
        return {num, num * slow.zero, 2.0 * a + s0, w2 + 2.0 * a * s0, w2 * s0};
    }

    double dc_gain() const { return b0 / a0; }

    // Routh-Hurwitz conditions for all roots in the open left half-plane.
    bool is_stable() const { return a2 > 0.0 && a0 > 0.0 && a2 * a1 > a0; }
};

namespace detail {

// One classical RK4 step of the controllable canonical realization
//   x1' = x2, x2' = x3, x3' = -a0 x1 - a1 x2 - a2 x3 + w,  y = b0 x1 + b1 x2.
inline std::array<double, 3> rk4_step(const ThirdOrderTf& tf, const std::array<double, 3>& x,
                                      double w, double h) {
    auto deriv = [&](const std::array<double, 3>& s) -> std::array<double, 3> {
        return {s[1], s[2], -tf.a0 * s[0] - tf.a1 * s[1] - tf.a2 * s[2] + w};
    };
    const auto k1 = deriv(x);
    const auto k2 = deriv({x[0] + 0.5 * h * k1[0], x[1] + 0.5 * h * k1[1], x[2] + 0.5 * h * k1[2]});
    const auto k3 = deriv({x[0] + 0.5 * h * k2[0], x[1] + 0.5 * h * k2[1], x[2] + 0.5 * h * k2[2]});
    const auto k4 = deriv({x[0] + h * k3[0], x[1] + h * k3[1], x[2] + h * k3[2]});
    return {x[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            x[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            x[2] + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])};
}

}  // namespace detail

// State that holds the output at `output` under a constant drive; requires a
// nonzero b0 (true for every valid block product).
inline std::array<double, 3> steady_state(const ThirdOrderTf& tf, double output) {
    if (tf.b0 == 0.0)
        throw std::invalid_argument("steady_state: b0 must be nonzero");
    return {output / tf.b0, 0.0, 0.0};
}

// Fixed-step RK4 with zero-order hold: output sample m is taken before
// drive[m] acts over [t_m, t_{m+1}), so a step record re-based at a switch
// starts at exactly zero. Each sample interval is cut into equal sub-steps
// no longer than step_limit.
inline std::vector<double> simulate_linear(const ThirdOrderTf& tf, const std::vector<double>& drive,
                                           double sample_period, double step_limit,
                                           std::array<double, 3> state) {
    if (drive.empty())
        throw std::invalid_argument("simulate_linear: empty drive");
    if (!(sample_period > 0.0) || !(step_limit > 0.0))
        throw std::invalid_argument("simulate_linear: periods must be positive");
    const int substeps = std::max(1, static_cast<int>(std::ceil(sample_period / step_limit - 1e-12)));
    const double h = sample_period / substeps;

    std::vector<double> out(drive.size());
    for (std::size_t m = 0; m < drive.size(); ++m) {
        out[m] = tf.b0 * state[0] + tf.b1 * state[1];
        for (int i = 0; i < substeps; ++i)
            state = detail::rk4_step(tf, state, drive[m], h);
    }
    return out;
}

inline double step_limit_for(const FastDynamics& fast, const SlowDynamics& slow) {
    const double rate = std::max({fast.decay_rate, fast.damped_frequency, slow.pole});
    return std::min(1e-3, 0.05 / rate);
}

// Drives the full model: u -> f(u) -> fast*slow product -> y (global
// coordinates, includes the p_0 offset). The dynamic state starts in steady
// state at initial_output.
inline TimeSeries simulate(const HammersteinModel& model, const TimeSeries& input,
                           double initial_output) {
    model.validate();
    input.validate();
    const ThirdOrderTf tf = ThirdOrderTf::from_blocks(model.fast, model.slow);
    const double y0 = model.offset();

    std::vector<double> drive(input.values.size());
    for (std::size_t i = 0; i < drive.size(); ++i)
        drive[i] = eval_nonlinearity(model.nonlinearity, input.values[i]) - y0;

    auto local = simulate_linear(tf, drive, input.sample_period,
                                 step_limit_for(model.fast, model.slow),
                                 steady_state(tf, initial_output - y0));
    for (double& v : local)
        v += y0;
    return {input.sample_period, std::move(local)};
}

}  // namespace mrham
