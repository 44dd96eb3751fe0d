#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mrham/types.hpp"

namespace mrham {

// Voltage levels applied back to back, each held for hold_period.
struct StepSchedule {
    std::vector<double> levels;  // volts
    double hold_period = 0.0;    // seconds

    void validate() const {
        if (levels.size() < 2)
            throw std::invalid_argument("step schedule: needs at least 2 levels");
        if (!(hold_period > 0.0) || !std::isfinite(hold_period))
            throw std::invalid_argument("step schedule: hold period must be positive");
        for (double v : levels)
            if (!std::isfinite(v))
                throw std::invalid_argument("step schedule: non-finite level");
    }
};

// Alternating max-spread pattern over [-12, 12] V: 0, +12, -12, +10.8, -10.8,
// ..., +1.2, -1.2. 21 levels, 20 switches, every consecutive pair distinct.
inline StepSchedule default_step_schedule(double hold_period = 20.0) {
    StepSchedule schedule;
    schedule.hold_period = hold_period;
    schedule.levels.push_back(0.0);
    for (int i = 0; i < 10; ++i) {
        const double amp = 12.0 - 1.2 * i;
        schedule.levels.push_back(amp);
        schedule.levels.push_back(-amp);
    }
    return schedule;
}

inline TimeSeries make_step_excitation(const StepSchedule& schedule, double sample_period) {
    schedule.validate();
    if (!(sample_period > 0.0) || !std::isfinite(sample_period))
        throw std::invalid_argument("make_step_excitation: sample period must be positive");
    // Rounding the hold to whole samples keeps the duration error under one sample.
    const long hold_samples = std::lround(schedule.hold_period / sample_period);
    if (hold_samples < 1)
        throw std::invalid_argument("make_step_excitation: hold period shorter than one sample");

    TimeSeries out;
    out.sample_period = sample_period;
    out.values.reserve(schedule.levels.size() * static_cast<std::size_t>(hold_samples));
    for (double level : schedule.levels)
        out.values.insert(out.values.end(), static_cast<std::size_t>(hold_samples), level);
    return out;
}

// One extracted step response, re-based so the first sample is zero.
struct StepRecord {
    double u_pre = 0.0;           // volts
    double u_post = 0.0;          // volts
    double sample_period = 0.0;   // seconds
    std::vector<double> delta_y;  // millimeters, delta_y[0] == 0

    double duration() const {
        return static_cast<double>(delta_y.size()) * sample_period;
    }

    void validate() const {
        if (!(sample_period > 0.0) || !std::isfinite(sample_period))
            throw std::invalid_argument("step record: sample period must be positive");
        if (delta_y.empty() || delta_y.front() != 0.0)
            throw std::invalid_argument("step record: first sample must be zero");
        if (u_pre == u_post)
            throw std::invalid_argument("step record: pre and post voltages must differ");
    }
};

// Steady-state curve as sorted (voltage, displacement) points.
struct StaticPoint {
    double voltage = 0.0;       // volts
    double displacement = 0.0;  // millimeters
};

struct StaticCharacteristic {
    std::vector<StaticPoint> points;

    void validate() const {
        if (points.empty())
            throw std::invalid_argument("static characteristic: empty");
        for (std::size_t i = 1; i < points.size(); ++i)
            if (!(points[i].voltage > points[i - 1].voltage))
                throw std::invalid_argument("static characteristic: voltages must increase");
    }
};

// Cuts the response at input discontinuities (|du| > 1e-6 V). Each record
// runs from its switch to the next one and keeps the post-switch level;
// records held for min_hold or less are dropped.
inline std::vector<StepRecord> split_steps(const TimeSeries& input, const TimeSeries& output,
                                           double min_hold) {
    input.validate();
    output.validate();
    if (input.values.size() != output.values.size())
        throw std::invalid_argument("split_steps: series lengths differ");
    if (std::abs(input.sample_period - output.sample_period) >
        1e-12 * std::max(input.sample_period, output.sample_period))
        throw std::invalid_argument("split_steps: series sample periods differ");
    if (!(min_hold > 0.0))
        throw std::invalid_argument("split_steps: min_hold must be positive");

    const auto& u = input.values;
    const auto& y = output.values;
    std::vector<std::size_t> switches;
    for (std::size_t i = 1; i < u.size(); ++i)
        if (std::abs(u[i] - u[i - 1]) > 1e-6)
            switches.push_back(i);

    std::vector<StepRecord> records;
    for (std::size_t s = 0; s < switches.size(); ++s) {
        const std::size_t begin = switches[s];
        const std::size_t end = (s + 1 < switches.size()) ? switches[s + 1] : u.size();
        if (static_cast<double>(end - begin) * input.sample_period <= min_hold)
            continue;
        StepRecord rec;
        rec.u_pre = u[begin - 1];
        rec.u_post = u[begin];
        rec.sample_period = input.sample_period;
        rec.delta_y.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i)
            rec.delta_y.push_back(y[i] - y[begin]);
        records.push_back(std::move(rec));
    }
    return records;
}

// Averages the tail of each record to one (u_post, Y) point. Global y is
// rebuilt by chaining record deltas from y_offset, which assumes the records
// are consecutive segments of one response. Duplicate voltages are merged by
// averaging.
inline StaticCharacteristic steady_state_points(const std::vector<StepRecord>& records,
                                                double averaging_window, double y_offset) {
    if (records.empty())
        throw std::invalid_argument("steady_state_points: no records");
    if (!(averaging_window > 0.0))
        throw std::invalid_argument("steady_state_points: window must be positive");

    std::vector<StaticPoint> raw;
    raw.reserve(records.size());
    double base = y_offset;
    for (const auto& rec : records) {
        rec.validate();
        if (!(averaging_window < rec.duration()))
            throw std::invalid_argument("steady_state_points: window not shorter than record");
        const auto n = rec.delta_y.size();
        auto count = static_cast<std::size_t>(averaging_window / rec.sample_period);
        count = std::clamp<std::size_t>(count, 1, n);
        double sum = 0.0;
        for (std::size_t i = n - count; i < n; ++i)
            sum += base + rec.delta_y[i];
        raw.push_back({rec.u_post, sum / static_cast<double>(count)});
        base += rec.delta_y.back();
    }

    std::sort(raw.begin(), raw.end(),
              [](const StaticPoint& a, const StaticPoint& b) { return a.voltage < b.voltage; });

    StaticCharacteristic out;
    for (std::size_t i = 0; i < raw.size();) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < raw.size() && std::abs(raw[j].voltage - raw[i].voltage) <= 1e-9)
            sum += raw[j++].displacement;
        out.points.push_back({raw[i].voltage, sum / static_cast<double>(j - i)});
        i = j;
    }
    out.validate();
    return out;
}

// Adds zero-mean Gaussian noise from a deterministic engine; identical
// (series, sigma, seed) inputs give identical output.
inline TimeSeries add_noise(const TimeSeries& series, double sigma, std::uint64_t seed) {
    series.validate();
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("add_noise: sigma must be >= 0");
    if (sigma == 0.0)
        return series;

    TimeSeries out = series;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, sigma);
    for (double& v : out.values)
        v += dist(rng);
    return out;
}

// Linear frequency sweep f0 -> f1 over the duration, centered on `center`.
inline TimeSeries make_chirp(double f0_hz, double f1_hz, double duration, double amplitude,
                             double sample_period, double center = 0.0) {
    if (!(f0_hz > 0.0) || !(f1_hz > 0.0) || !(duration > 0.0) || !(sample_period > 0.0))
        throw std::invalid_argument("make_chirp: parameters must be positive");
    const auto n = static_cast<std::size_t>(std::lround(duration / sample_period)) + 1;
    if (n < 2)
        throw std::invalid_argument("make_chirp: too few samples");

    const double pi = std::acos(-1.0);
    TimeSeries out;
    out.sample_period = sample_period;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * sample_period;
        const double phase = 2.0 * pi * (f0_hz * t + 0.5 * (f1_hz - f0_hz) * t * t / duration);
        out.values[i] = center + amplitude * std::sin(phase);
    }
    return out;
}

}  // namespace mrham
