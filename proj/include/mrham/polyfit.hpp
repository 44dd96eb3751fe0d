#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mrham/signal.hpp"
#include "mrham/types.hpp"

namespace mrham {

namespace detail {

// Householder QR least squares for the (rows x cols) design matrix `a` and
// right-hand side `b`, rows >= cols. `a` and `b` are consumed in place.
// Throws when R is numerically singular.
inline std::vector<double> qr_solve(std::vector<std::vector<double>>& a, std::vector<double>& b) {
    const std::size_t rows = a.size();
    const std::size_t cols = a.front().size();

    for (std::size_t j = 0; j < cols; ++j) {
        double norm = 0.0;
        for (std::size_t i = j; i < rows; ++i)
            norm += a[i][j] * a[i][j];
        norm = std::sqrt(norm);
        if (norm == 0.0)
            throw std::invalid_argument("qr_solve: rank-deficient system");
        const double alpha = a[j][j] > 0.0 ? -norm : norm;

        // Householder vector v stored in column j below the diagonal.
        std::vector<double> v(rows - j);
        v[0] = a[j][j] - alpha;
        for (std::size_t i = j + 1; i < rows; ++i)
            v[i - j] = a[i][j];
        double vnorm2 = 0.0;
        for (double x : v)
            vnorm2 += x * x;
        a[j][j] = alpha;
        for (std::size_t i = j + 1; i < rows; ++i)
            a[i][j] = 0.0;
        if (vnorm2 == 0.0)
            continue;

        for (std::size_t c = j + 1; c < cols; ++c) {
            double dot = 0.0;
            for (std::size_t i = j; i < rows; ++i)
                dot += v[i - j] * a[i][c];
            const double f = 2.0 * dot / vnorm2;
            for (std::size_t i = j; i < rows; ++i)
                a[i][c] -= f * v[i - j];
        }
        double dot = 0.0;
        for (std::size_t i = j; i < rows; ++i)
            dot += v[i - j] * b[i];
        const double f = 2.0 * dot / vnorm2;
        for (std::size_t i = j; i < rows; ++i)
            b[i] -= f * v[i - j];
    }

    double diag_max = 0.0;
    for (std::size_t j = 0; j < cols; ++j)
        diag_max = std::max(diag_max, std::abs(a[j][j]));
    std::vector<double> x(cols);
    for (std::size_t jj = cols; jj-- > 0;) {
        if (std::abs(a[jj][jj]) <= 1e-12 * diag_max)
            throw std::invalid_argument("qr_solve: rank-deficient system");
        double sum = b[jj];
        for (std::size_t c = jj + 1; c < cols; ++c)
            sum -= a[jj][c] * x[c];
        x[jj] = sum / a[jj][jj];
    }
    return x;
}

}  // namespace detail

// Least-squares polynomial fit of the static curve. The voltages are scaled
// by their largest magnitude before building the Vandermonde matrix so the
// QR factors stay well conditioned up to degree ~6.
inline PolynomialNonlinearity fit_static(const StaticCharacteristic& statics, int degree) {
    statics.validate();
    if (degree < 1)
        throw std::invalid_argument("fit_static: degree must be >= 1");
    const std::size_t n = statics.points.size();
    const auto m = static_cast<std::size_t>(degree) + 1;
    if (n < m)
        throw std::invalid_argument("fit_static: not enough points for the degree");

    double scale = 0.0;
    for (const auto& pt : statics.points)
        scale = std::max(scale, std::abs(pt.voltage));
    if (scale == 0.0)
        scale = 1.0;

    std::vector<std::vector<double>> a(n, std::vector<double>(m));
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
        double p = 1.0;
        for (std::size_t j = 0; j < m; ++j) {
            a[i][j] = p;
            p *= statics.points[i].voltage / scale;
        }
        b[i] = statics.points[i].displacement;
    }

    auto x = detail::qr_solve(a, b);
    double unscale = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
        x[j] *= unscale;
        unscale /= scale;
    }
    return {std::move(x)};
}

inline double sum_squared_residual(const StaticCharacteristic& statics,
                                   const PolynomialNonlinearity& f) {
    double sse = 0.0;
    for (const auto& pt : statics.points) {
        const double e = eval_nonlinearity(f, pt.voltage) - pt.displacement;
        sse += e * e;
    }
    return sse;
}

struct DegreeSelection {
    int degree = 0;
    std::vector<std::pair<int, double>> fits;  // (degree, sum of squared residuals)
};

// Parsimony rule: smallest degree whose residual is within 5% of the best.
// Residuals below a rounding-level floor count as exact ties, so noiseless
// data selects the true degree instead of chasing 1e-26 improvements.
inline DegreeSelection select_degree(const StaticCharacteristic& statics,
                                     const std::vector<int>& degrees) {
    if (degrees.empty())
        throw std::invalid_argument("select_degree: no candidate degrees");

    double y_scale = 0.0;
    for (const auto& pt : statics.points)
        y_scale = std::max(y_scale, std::abs(pt.displacement));
    const double floor = static_cast<double>(statics.points.size()) *
                         (1e-12 * y_scale) * (1e-12 * y_scale);

    DegreeSelection out;
    double best = std::numeric_limits<double>::infinity();
    for (int d : degrees) {
        // Candidates that would need more coefficients than there are points
        // are silently skipped so a short static table still fits what it can.
        if (d < 1 || static_cast<std::size_t>(d) + 1 > statics.points.size())
            continue;
        const double sse = sum_squared_residual(statics, fit_static(statics, d));
        out.fits.emplace_back(d, sse);
        best = std::min(best, sse);
    }
    if (out.fits.empty())
        throw std::invalid_argument("select_degree: no feasible candidate degrees");

    int chosen = 0;
    bool found = false;
    for (const auto& [d, sse] : out.fits) {
        if (sse <= 1.05 * best || sse <= floor) {
            if (!found || d < chosen) {
                chosen = d;
                found = true;
            }
        }
    }
    out.degree = chosen;
    return out;
}

}  // namespace mrham
