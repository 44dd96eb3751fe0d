#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mrham {

// Static map from coil voltage to steady-state membrane displacement,
// y = sum_k p_k u^k. Coefficients are stored in ascending powers p_0..p_p.
struct PolynomialNonlinearity {
    std::vector<double> coefficients;

    int order() const { return static_cast<int>(coefficients.size()) - 1; }

    double offset() const { return coefficients.empty() ? 0.0 : coefficients.front(); }

    void validate() const {
        if (coefficients.empty())
            throw std::invalid_argument("polynomial: needs at least one coefficient");
        for (double c : coefficients)
            if (!std::isfinite(c))
                throw std::invalid_argument("polynomial: non-finite coefficient");
    }
};

inline double eval_nonlinearity(const PolynomialNonlinearity& f, double u) {
    if (!std::isfinite(u))
        throw std::invalid_argument("eval_nonlinearity: non-finite input");
    double acc = 0.0;
    for (auto it = f.coefficients.rbegin(); it != f.coefficients.rend(); ++it)
        acc = acc * u + *it;
    return acc;
}

// Under-damped second-order block with unit-free gain, poles at -alpha +- j*omega.
struct FastDynamics {
    double gain = 0.0;              // dimensionless, nonzero
    double decay_rate = 0.0;        // alpha, 1/s, positive
    double damped_frequency = 0.0;  // omega, rad/s, positive

    void validate() const {
        if (!std::isfinite(gain) || gain == 0.0)
            throw std::invalid_argument("fast dynamics: gain must be finite and nonzero");
        if (!(decay_rate > 0.0) || !std::isfinite(decay_rate))
            throw std::invalid_argument("fast dynamics: decay rate must be positive");
        if (!(damped_frequency > 0.0) || !std::isfinite(damped_frequency))
            throw std::invalid_argument("fast dynamics: damped frequency must be positive");
    }
};

// First-order lead-lag block (s + zero)/(s + pole); stable and minimum-phase.
struct SlowDynamics {
    double pole = 0.0;  // s0, 1/s, positive
    double zero = 0.0;  // z0, 1/s, positive

    void validate() const {
        if (!(pole > 0.0) || !std::isfinite(pole))
            throw std::invalid_argument("slow dynamics: pole must be positive");
        if (!(zero > 0.0) || !std::isfinite(zero))
            throw std::invalid_argument("slow dynamics: zero must be positive");
    }
};

// Static nonlinearity followed by the fast and slow linear blocks in series.
// The blocks are constrained to unit combined static gain so the polynomial
// alone fixes steady-state output.
struct HammersteinModel {
    PolynomialNonlinearity nonlinearity;
    FastDynamics fast;
    SlowDynamics slow;

    double offset() const { return nonlinearity.offset(); }

    void validate() const {
        nonlinearity.validate();
        fast.validate();
        slow.validate();
        const double gain = fast.gain * slow.zero / slow.pole;
        if (std::abs(gain - 1.0) > 1e-9)
            throw std::invalid_argument("model: combined static gain must be 1");
    }
};

// Uniformly sampled signal; sample i sits at t = i * sample_period.
struct TimeSeries {
    double sample_period = 0.0;  // seconds, positive
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double time(std::size_t i) const { return static_cast<double>(i) * sample_period; }
    double duration() const {
        return values.empty() ? 0.0 : static_cast<double>(values.size() - 1) * sample_period;
    }

    void validate() const {
        if (!(sample_period > 0.0) || !std::isfinite(sample_period))
            throw std::invalid_argument("time series: sample period must be positive");
        if (values.size() < 2)
            throw std::invalid_argument("time series: needs at least 2 samples");
    }
};

}  // namespace mrham
