#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mrham/optimize.hpp"
#include "mrham/polyfit.hpp"
#include "mrham/response.hpp"
#include "mrham/signal.hpp"
#include "mrham/simulate.hpp"
#include "mrham/types.hpp"

namespace mrham {

// Identification could not produce a usable model (too few valid records).
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The best baseline candidate violates the stability constraint.
struct StabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input and measured series do not share a sample grid.
struct GridMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FitReport {
    double fit_percent = 0.0;
    double residual_l1 = 0.0;  // mean absolute error
    double residual_l2 = 0.0;  // root mean squared error
};

inline FitReport fit_report(const std::vector<double>& measured,
                            const std::vector<double>& predicted) {
    if (measured.size() != predicted.size() || measured.empty())
        throw std::invalid_argument("fit_report: size mismatch");
    const auto n = static_cast<double>(measured.size());
    double mean = 0.0;
    for (double v : measured)
        mean += v;
    mean /= n;

    double abs_sum = 0.0, sq_sum = 0.0, dev_sum = 0.0;
    for (std::size_t i = 0; i < measured.size(); ++i) {
        const double e = measured[i] - predicted[i];
        abs_sum += std::abs(e);
        sq_sum += e * e;
        const double d = measured[i] - mean;
        dev_sum += d * d;
    }

    FitReport report;
    report.residual_l1 = abs_sum / n;
    report.residual_l2 = std::sqrt(sq_sum / n);
    const double num = std::sqrt(sq_sum);
    const double den = std::sqrt(dev_sum);
    double ratio;
    if (den > 0.0)
        ratio = num / den;
    else
        ratio = (num == 0.0) ? 0.0 : std::numeric_limits<double>::infinity();
    report.fit_percent = 100.0 * (1.0 - ratio);
    return report;
}

namespace detail {

// Frequency of the dominant DFT bin of the mean-removed signal; falls back to
// one cycle per window when no bin stands out.
inline double dominant_frequency(const std::vector<double>& values, std::size_t count,
                                 double sample_period) {
    count = std::min(count, values.size());
    const double pi = std::acos(-1.0);
    if (count < 4)
        return 2.0 * pi / (static_cast<double>(std::max<std::size_t>(count, 2)) * sample_period);

    double mean = 0.0;
    for (std::size_t i = 0; i < count; ++i)
        mean += values[i];
    mean /= static_cast<double>(count);

    std::size_t best_bin = 0;
    double best_mag = 0.0;
    for (std::size_t bin = 1; bin <= count / 2; ++bin) {
        double re = 0.0, im = 0.0;
        const double wstep = 2.0 * pi * static_cast<double>(bin) / static_cast<double>(count);
        for (std::size_t i = 0; i < count; ++i) {
            const double v = values[i] - mean;
            re += v * std::cos(wstep * static_cast<double>(i));
            im -= v * std::sin(wstep * static_cast<double>(i));
        }
        const double mag = re * re + im * im;
        if (mag > best_mag) {
            best_mag = mag;
            best_bin = bin;
        }
    }
    if (best_bin == 0 || best_mag <= 0.0)
        return 2.0 * pi / (static_cast<double>(count) * sample_period);
    return 2.0 * pi * static_cast<double>(best_bin) /
           (static_cast<double>(count) * sample_period);
}

}  // namespace detail

struct FastFit {
    bool ok = false;
    double gain = 0.0;
    double decay_rate = 0.0;
    double damped_frequency = 0.0;
    double residual = std::numeric_limits<double>::infinity();
    std::string note;
};

// Fits the oscillatory step-response shape to the first fast_window seconds
// of the record by a mean-absolute-error simplex search. Restarts run over
// the full deterministic grid gain x decay x frequency-multiple, with the
// frequency seeded from the dominant DFT bin of the window.
inline FastFit fit_fast_single(const StepRecord& record, double delta_v, double fast_window,
                               const OptimizerSettings& settings) {
    record.validate();
    settings.validate();
    if (delta_v == 0.0)
        throw std::invalid_argument("fit_fast_single: delta_v must be nonzero");
    if (!(fast_window > 0.0))
        throw std::invalid_argument("fit_fast_single: window must be positive");

    FastFit fit;
    const double dt = record.sample_period;
    const auto count = static_cast<std::size_t>(fast_window / dt + 1e-9) + 1;
    if (count > record.delta_y.size()) {
        fit.note = "record shorter than the fast window";
        return fit;
    }

    const auto& dy = record.delta_y;
    auto objective = [&](const std::vector<double>& p) {
        const double k = p[0], a = p[1], w = p[2];
        if (!(a > 0.0) || !(w > 0.0))
            return 1e12;
        const double amp = std::sqrt(a * a + w * w) / w;
        const double phi = std::atan2(-w, -a) - std::acos(-1.0) / 2.0;
        double sum = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            const double t = static_cast<double>(i) * dt;
            const double eta = k * (1.0 + amp * std::cos(w * t + phi) * std::exp(-a * t));
            sum += std::abs(eta * delta_v - dy[i]);
        }
        return sum / static_cast<double>(count);
    };

    const double w_seed = detail::dominant_frequency(dy, count, dt);
    bool any_converged = false;
    SimplexResult best;
    best.value = std::numeric_limits<double>::infinity();
    for (double k0 : {0.5, 1.0, 1.5}) {
        for (double a0 : {10.0, 50.0, 100.0}) {
            for (double wm : {0.5, 1.0, 2.0}) {
                const double w0 = wm * w_seed;
                const auto r = nelder_mead(objective, {k0, a0, w0},
                                           {0.2 * k0, 0.2 * a0, 0.1 * w0},
                                           settings.tolerance, settings.max_iterations);
                any_converged = any_converged || r.converged;
                if (r.value < best.value)
                    best = r;
            }
        }
    }

    if (!any_converged) {
        fit.note = "no restart reached the stop tolerance";
        return fit;
    }
    if (std::abs(best.x[0]) < 1e-6) {
        fit.note = "degenerate fit: gain collapsed to zero";
        return fit;
    }
    fit.ok = true;
    fit.gain = best.x[0];
    fit.decay_rate = best.x[1];
    fit.damped_frequency = best.x[2];
    fit.residual = best.value;
    return fit;
}

struct SlowFit {
    bool ok = false;
    double pole = 0.0;
    double residual = std::numeric_limits<double>::infinity();
    std::string note;
};

// Fits the relaxation pole over the whole record. The lead-lag zero is tied
// to the pole by the unit-gain constraint (z0 = s0/k), so the search is
// scalar: a log grid brackets the minimum, golden section narrows it, and a
// short simplex polish finishes.
inline SlowFit fit_slow_single(const StepRecord& record, double delta_v, double k,
                               const OptimizerSettings& settings) {
    record.validate();
    settings.validate();
    if (delta_v == 0.0)
        throw std::invalid_argument("fit_slow_single: delta_v must be nonzero");
    if (k == 0.0)
        throw std::invalid_argument("fit_slow_single: k must be nonzero");

    const double dt = record.sample_period;
    const auto& dy = record.delta_y;
    const double inv_k = 1.0 / k;
    auto objective = [&](double s0) {
        if (!(s0 > 0.0))
            return 1e12;
        double sum = 0.0;
        for (std::size_t i = 0; i < dy.size(); ++i) {
            const double t = static_cast<double>(i) * dt;
            const double eta = inv_k - (inv_k - 1.0) * std::exp(-s0 * t);
            sum += std::abs(eta * k * delta_v - dy[i]);
        }
        return sum / static_cast<double>(dy.size());
    };

    constexpr int kGridCount = 48;
    std::vector<double> grid(kGridCount), values(kGridCount);
    const double lo = 1e-3, hi = 10.0;
    for (int i = 0; i < kGridCount; ++i) {
        grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (kGridCount - 1));
        values[i] = objective(grid[i]);
    }

    SlowFit fit;
    const auto min_it = std::min_element(values.begin(), values.end());
    const auto max_it = std::max_element(values.begin(), values.end());
    if (*max_it - *min_it <= 1e-12 * (1.0 + std::abs(*min_it))) {
        fit.note = "pole not identifiable: residual is flat";
        return fit;
    }
    const auto idx = static_cast<std::size_t>(min_it - values.begin());
    if (idx == 0 || idx + 1 == grid.size()) {
        fit.note = "no interior minimum inside the search range";
        return fit;
    }

    const double coarse = golden_section(objective, grid[idx - 1], grid[idx + 1], 1e-12);
    auto wrapped = [&](const std::vector<double>& p) { return objective(p[0]); };
    const auto polish = nelder_mead(wrapped, {coarse}, {std::max(coarse * 1e-3, 1e-9)},
                                    settings.tolerance, settings.max_iterations);

    fit.ok = true;
    fit.pole = polish.x[0];
    fit.residual = polish.value;
    return fit;
}

struct PerRecordEstimates {
    std::vector<double> gains;
    std::vector<double> decay_rates;
    std::vector<double> damped_frequencies;
    std::vector<double> slow_poles;
    std::vector<int> record_ids;
};

struct AggregatedParams {
    double gain = 0.0;
    double decay_rate = 0.0;
    double damped_frequency = 0.0;
    double slow_pole = 0.0;
};

namespace detail {

inline double median(std::vector<double> v) {
    if (v.empty())
        throw std::invalid_argument("median: empty list");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

inline AggregatedParams aggregate_median(const PerRecordEstimates& estimates) {
    return {detail::median(estimates.gains), detail::median(estimates.decay_rates),
            detail::median(estimates.damped_frequencies), detail::median(estimates.slow_poles)};
}

// Ties the lead-lag zero to the pole so the combined static gain is one.
inline SlowDynamics close_constraint(double k, double s0) {
    if (!(k > 0.0))
        throw std::invalid_argument("close_constraint: k must be positive");
    SlowDynamics slow{s0, s0 / k};
    slow.validate();
    return slow;
}

namespace detail {

inline std::array<std::complex<double>, 3> cubic_roots(double a2, double a1, double a0) {
    using C = std::complex<double>;
    const double p = a1 - a2 * a2 / 3.0;
    const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
    const C disc = C(q * q / 4.0 + p * p * p / 27.0, 0.0);
    const C sq = std::sqrt(disc);
    C operand = C(-q / 2.0) + sq;
    if (std::abs(operand) < std::abs(C(-q / 2.0) - sq))
        operand = C(-q / 2.0) - sq;

    std::array<C, 3> roots;
    if (std::abs(operand) == 0.0) {
        roots.fill(C(-a2 / 3.0, 0.0));
        return roots;
    }
    const C c = std::pow(operand, 1.0 / 3.0);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < 3; ++i) {
        const C rot = std::polar(1.0, 2.0 * pi * i / 3.0);
        const C y = rot * c - C(p / 3.0) / (rot * c);
        roots[i] = y - C(a2 / 3.0, 0.0);
    }
    return roots;
}

}  // namespace detail

// Unit step response of the transfer function on a uniform grid, by partial
// fractions over the cubic roots. Near-degenerate root layouts fall back to
// the RK4 engine.
inline std::vector<double> step_response_grid(const ThirdOrderTf& tf, std::size_t count,
                                              double sample_period) {
    if (count == 0 || !(sample_period > 0.0))
        throw std::invalid_argument("step_response_grid: bad grid");
    using C = std::complex<double>;
    const auto roots = detail::cubic_roots(tf.a2, tf.a1, tf.a0);

    double root_scale = 1.0;
    for (const auto& r : roots)
        root_scale = std::max(root_scale, std::abs(r));
    bool degenerate = false;
    std::array<C, 3> residues;
    for (int i = 0; i < 3; ++i) {
        const C l = roots[i];
        const C dp = 3.0 * l * l + 2.0 * tf.a2 * l + tf.a1;
        if (std::abs(l) < 1e-12 * root_scale || std::abs(dp) < 1e-10 * root_scale * root_scale) {
            degenerate = true;
            break;
        }
        residues[i] = (tf.b1 * l + tf.b0) / (l * dp);
    }
    if (degenerate) {
        const double limit = std::min(1e-3, 0.05 / root_scale);
        return simulate_linear(tf, std::vector<double>(count, 1.0), sample_period, limit,
                               {0.0, 0.0, 0.0});
    }

    const double steady = tf.b0 / tf.a0;
    std::array<C, 3> factor, term;
    for (int i = 0; i < 3; ++i) {
        factor[i] = std::exp(roots[i] * sample_period);
        term[i] = residues[i];
    }
    // The residues sum to -steady (relative degree two), so the response
    // starts at zero; cancel the round-off of that identity explicitly.
    const double start_error = steady + (term[0] + term[1] + term[2]).real();
    std::vector<double> out(count);
    for (std::size_t m = 0; m < count; ++m) {
        out[m] = steady + (term[0] + term[1] + term[2]).real() - start_error;
        for (int i = 0; i < 3; ++i)
            term[i] *= factor[i];
    }
    return out;
}

struct RecordDiagnostic {
    int index = 0;
    double u_pre = 0.0;
    double u_post = 0.0;
    double gain = 0.0;
    double decay_rate = 0.0;
    double damped_frequency = 0.0;
    double slow_pole = 0.0;
    double residual_fast = std::numeric_limits<double>::infinity();
    double residual_slow = std::numeric_limits<double>::infinity();
    bool excluded = false;
    std::string note;
};

struct IdentificationResult {
    HammersteinModel model;
    PerRecordEstimates estimates;
    std::vector<FitReport> reports;  // per record, against the assembled model
    std::vector<RecordDiagnostic> diagnostics;
    int degree = 0;
    std::vector<std::pair<int, double>> degree_fits;
};

// Three-step identification: fit the static polynomial, fit the fast block
// per record and take medians, fit the slow pole per record with the median
// gain and take the median, then close the unit-gain constraint.
inline IdentificationResult identify(const std::vector<StepRecord>& records,
                                     const StaticCharacteristic& statics,
                                     const std::vector<int>& degree_candidates,
                                     double fast_window, const OptimizerSettings& settings) {
    if (records.empty())
        throw FitError("identify: no records");
    statics.validate();
    settings.validate();

    IdentificationResult result;
    const auto selection = select_degree(statics, degree_candidates);
    result.degree = selection.degree;
    result.degree_fits = selection.fits;
    result.model.nonlinearity = fit_static(statics, selection.degree);

    const auto n = records.size();
    std::vector<double> delta_v(n);
    std::vector<FastFit> fast_fits(n);
    result.diagnostics.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        auto& diag = result.diagnostics[j];
        diag.index = static_cast<int>(j);
        diag.u_pre = records[j].u_pre;
        diag.u_post = records[j].u_post;
        delta_v[j] = eval_nonlinearity(result.model.nonlinearity, records[j].u_post) -
                     eval_nonlinearity(result.model.nonlinearity, records[j].u_pre);
        if (delta_v[j] == 0.0) {
            diag.excluded = true;
            diag.note = "zero predicted step amplitude";
            continue;
        }
        fast_fits[j] = fit_fast_single(records[j], delta_v[j], fast_window, settings);
        diag.gain = fast_fits[j].gain;
        diag.decay_rate = fast_fits[j].decay_rate;
        diag.damped_frequency = fast_fits[j].damped_frequency;
        diag.residual_fast = fast_fits[j].residual;
        if (!fast_fits[j].ok) {
            diag.excluded = true;
            diag.note = fast_fits[j].note;
        }
    }

    std::vector<double> gains, decays, freqs;
    for (std::size_t j = 0; j < n; ++j) {
        if (fast_fits[j].ok) {
            gains.push_back(fast_fits[j].gain);
            decays.push_back(fast_fits[j].decay_rate);
            freqs.push_back(fast_fits[j].damped_frequency);
        }
    }
    if (gains.size() < 3)
        throw FitError("identify: fewer than 3 records with a valid fast fit");
    const double k_med = detail::median(gains);
    const double a_med = detail::median(decays);
    const double w_med = detail::median(freqs);

    std::vector<SlowFit> slow_fits(n);
    std::vector<double> poles;
    for (std::size_t j = 0; j < n; ++j) {
        if (!fast_fits[j].ok)
            continue;
        slow_fits[j] = fit_slow_single(records[j], delta_v[j], k_med, settings);
        auto& diag = result.diagnostics[j];
        diag.slow_pole = slow_fits[j].pole;
        diag.residual_slow = slow_fits[j].residual;
        if (slow_fits[j].ok) {
            poles.push_back(slow_fits[j].pole);
        } else {
            diag.excluded = true;
            diag.note = slow_fits[j].note;
        }
    }
    if (poles.empty())
        throw FitError("identify: no record with a valid slow fit");
    const double s0_med = detail::median(poles);

    result.model.fast = {k_med, a_med, w_med};
    result.model.slow = close_constraint(k_med, s0_med);
    result.model.validate();

    for (std::size_t j = 0; j < n; ++j) {
        if (fast_fits[j].ok && slow_fits[j].ok) {
            result.estimates.gains.push_back(fast_fits[j].gain);
            result.estimates.decay_rates.push_back(fast_fits[j].decay_rate);
            result.estimates.damped_frequencies.push_back(fast_fits[j].damped_frequency);
            result.estimates.slow_poles.push_back(slow_fits[j].pole);
            result.estimates.record_ids.push_back(static_cast<int>(j));
        }
    }

    const auto tf = ThirdOrderTf::from_blocks(result.model.fast, result.model.slow);
    result.reports.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        auto eta = step_response_grid(tf, records[j].delta_y.size(), records[j].sample_period);
        for (double& v : eta)
            v *= delta_v[j];
        result.reports.push_back(fit_report(records[j].delta_y, eta));
    }
    return result;
}

struct BaselineResult {
    ThirdOrderTf tf;
    FitReport report;
};

// One configuration's data: its records and the static curve that converts
// voltage steps into drive amplitudes for them.
struct BaselineGroup {
    std::vector<StepRecord> records;
    StaticCharacteristic statics;
};

// Output-error fit of one third-order transfer function shared across all
// groups' records, as the flat alternative to the staged two-timescale
// model. Each group's static curve supplies its records' drive amplitudes.
// Initial points come from the staged fit expanded to the product form,
// plus deterministic perturbations of it.
inline BaselineResult fit_baseline(const std::vector<BaselineGroup>& groups,
                                   const OptimizerSettings& settings) {
    if (groups.empty())
        throw FitError("fit_baseline: no groups");
    settings.validate();

    std::vector<const StepRecord*> used;
    std::vector<double> delta_v;
    double dt = 0.0;
    std::size_t longest = 0;
    for (const auto& group : groups) {
        group.statics.validate();
        const int degree = std::min<int>(3, static_cast<int>(group.statics.points.size()) - 1);
        const auto poly = fit_static(group.statics, degree);
        for (const auto& rec : group.records) {
            rec.validate();
            if (dt == 0.0)
                dt = rec.sample_period;
            if (std::abs(rec.sample_period - dt) > 1e-12 * dt)
                throw std::invalid_argument("fit_baseline: records must share a sample period");
            const double dv = eval_nonlinearity(poly, rec.u_post) -
                              eval_nonlinearity(poly, rec.u_pre);
            if (dv == 0.0)
                continue;
            used.push_back(&rec);
            delta_v.push_back(dv);
            longest = std::max(longest, rec.delta_y.size());
        }
    }
    if (used.empty())
        throw FitError("fit_baseline: no records with a nonzero step amplitude");

    // Staged two-timescale estimates seed the search.
    double k0 = 1.0, a0 = 50.0, w0 = 100.0, s00 = 0.1;
    {
        double shortest = used.front()->duration();
        for (const auto* rec : used)
            shortest = std::min(shortest, rec->duration());
        const double window = std::min(0.3, 0.5 * shortest);
        std::vector<double> gains, decays, freqs, poles;
        for (std::size_t j = 0; j < used.size(); ++j) {
            const auto fast = fit_fast_single(*used[j], delta_v[j], window, settings);
            if (!fast.ok)
                continue;
            gains.push_back(fast.gain);
            decays.push_back(fast.decay_rate);
            freqs.push_back(fast.damped_frequency);
        }
        if (!gains.empty()) {
            k0 = detail::median(gains);
            a0 = detail::median(decays);
            w0 = detail::median(freqs);
            for (std::size_t j = 0; j < used.size(); ++j) {
                const auto slow = fit_slow_single(*used[j], delta_v[j], k0, settings);
                if (slow.ok)
                    poles.push_back(slow.pole);
            }
            if (!poles.empty())
                s00 = detail::median(poles);
        }
    }
    ThirdOrderTf seed{0.0, 0.0, 0.0, 0.0, 0.0};
    if (k0 > 0.0 && s00 > 0.0) {
        seed = ThirdOrderTf::from_blocks({k0, a0, w0}, close_constraint(k0, s00));
    } else {
        seed = ThirdOrderTf::from_blocks({1.0, a0, w0}, {s00 > 0.0 ? s00 : 0.1,
                                                         s00 > 0.0 ? s00 : 0.1});
    }

    auto objective = [&](const std::vector<double>& p) {
        const ThirdOrderTf tf{p[0], p[1], p[2], p[3], p[4]};
        if (!tf.is_stable()) {
            const double violation = std::max({0.0, -tf.a2, -tf.a0, tf.a0 - tf.a2 * tf.a1});
            return 1e18 * (1.0 + violation);
        }
        const auto eta = step_response_grid(tf, longest, dt);
        double sum = 0.0;
        for (std::size_t j = 0; j < used.size(); ++j) {
            const auto& dy = used[j]->delta_y;
            for (std::size_t i = 0; i < dy.size(); ++i) {
                const double e = delta_v[j] * eta[i] - dy[i];
                sum += e * e;
            }
        }
        return sum;
    };

    const std::vector<double> x0{seed.b1, seed.b0, seed.a2, seed.a1, seed.a0};
    const double patterns[4] = {1.2, 0.8, 1.4, 0.65};
    SimplexResult best;
    best.value = std::numeric_limits<double>::infinity();
    for (int r = 0; r < settings.restarts; ++r) {
        std::vector<double> start = x0;
        if (r > 0)
            for (std::size_t d = 0; d < start.size(); ++d)
                start[d] *= patterns[(r + static_cast<int>(d)) % 4];
        std::vector<double> steps(start.size());
        for (std::size_t d = 0; d < start.size(); ++d)
            steps[d] = 0.1 * std::abs(start[d]) + 1e-6;
        const auto run = nelder_mead(objective, start, steps, settings.tolerance,
                                     settings.max_iterations);
        if (run.value < best.value)
            best = run;
    }
    {
        // Final polish with a tighter simplex around the winner.
        std::vector<double> steps(best.x.size());
        for (std::size_t d = 0; d < best.x.size(); ++d)
            steps[d] = 0.01 * std::abs(best.x[d]) + 1e-9;
        const auto run = nelder_mead(objective, best.x, steps, settings.tolerance,
                                     settings.max_iterations);
        if (run.value < best.value)
            best = run;
    }

    BaselineResult result;
    result.tf = {best.x[0], best.x[1], best.x[2], best.x[3], best.x[4]};
    if (!result.tf.is_stable())
        throw StabilityError("fit_baseline: best candidate is unstable");

    std::vector<double> measured, predicted;
    const auto eta = step_response_grid(result.tf, longest, dt);
    for (std::size_t j = 0; j < used.size(); ++j) {
        const auto& dy = used[j]->delta_y;
        for (std::size_t i = 0; i < dy.size(); ++i) {
            measured.push_back(dy[i]);
            predicted.push_back(delta_v[j] * eta[i]);
        }
    }
    result.report = fit_report(measured, predicted);
    return result;
}

inline BaselineResult fit_baseline(const std::vector<StepRecord>& records,
                                   const StaticCharacteristic& statics,
                                   const OptimizerSettings& settings) {
    return fit_baseline(std::vector<BaselineGroup>{{records, statics}}, settings);
}

// Simulates the model over the input and scores it against the measurement.
inline FitReport validate_model(const HammersteinModel& model, const TimeSeries& input,
                                const TimeSeries& measured) {
    model.validate();
    input.validate();
    measured.validate();
    if (input.values.size() != measured.values.size() ||
        std::abs(input.sample_period - measured.sample_period) >
            1e-12 * std::max(input.sample_period, measured.sample_period))
        throw GridMismatchError("validate: input and measurement grids differ");

    const auto predicted = simulate(model, input, measured.values.front());
    return fit_report(measured.values, predicted.values);
}

}  // namespace mrham
