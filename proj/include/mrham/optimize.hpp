#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace mrham {

struct OptimizerSettings {
    double tolerance = 1e-10;  // objective-spread stop
    int max_iterations = 5000;
    int restarts = 8;

    void validate() const {
        if (!(tolerance > 0.0))
            throw std::invalid_argument("optimizer settings: tolerance must be positive");
        if (max_iterations < 1)
            throw std::invalid_argument("optimizer settings: max_iterations must be >= 1");
        if (restarts < 1)
            throw std::invalid_argument("optimizer settings: restarts must be >= 1");
    }
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Nelder-Mead downhill simplex with the standard coefficients
// (reflect 1, expand 2, contract 0.5, shrink 0.5). Stops when the objective
// spread over the simplex falls under tolerance * (1 + |best|).
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                 const std::vector<double>& x0,
                                 const std::vector<double>& initial_step, double tolerance,
                                 int max_iterations) {
    const std::size_t n = x0.size();
    if (n == 0 || initial_step.size() != n)
        throw std::invalid_argument("nelder_mead: bad start point");

    std::vector<std::vector<double>> pts(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i)
        pts[i + 1][i] += initial_step[i];
    std::vector<double> vals(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        vals[i] = f(pts[i]);

    std::vector<std::size_t> order(n + 1);
    SimplexResult result;
    int iter = 0;
    for (; iter < max_iterations; ++iter) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front(), worst = order.back();
        const std::size_t second_worst = order[n - 1];

        if (vals[worst] - vals[best] <= tolerance * (1.0 + std::abs(vals[best]))) {
            result.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst)
                continue;
            for (std::size_t d = 0; d < n; ++d)
                centroid[d] += pts[i][d];
        }
        for (double& c : centroid)
            c /= static_cast<double>(n);

        auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t d = 0; d < n; ++d)
                p[d] = centroid[d] + coef * (pts[worst][d] - centroid[d]);
            return p;
        };

        const auto reflected = blend(-1.0);
        const double fr = f(reflected);
        if (fr < vals[order[0]]) {
            const auto expanded = blend(-2.0);
            const double fe = f(expanded);
            if (fe < fr) {
                pts[worst] = expanded;
                vals[worst] = fe;
            } else {
                pts[worst] = reflected;
                vals[worst] = fr;
            }
        } else if (fr < vals[second_worst]) {
            pts[worst] = reflected;
            vals[worst] = fr;
        } else {
            const auto contracted = blend(fr < vals[worst] ? -0.5 : 0.5);
            const double fc = f(contracted);
            if (fc < std::min(fr, vals[worst])) {
                pts[worst] = contracted;
                vals[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best)
                        continue;
                    for (std::size_t d = 0; d < n; ++d)
                        pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
                    vals[i] = f(pts[i]);
                }
            }
        }
    }

    const auto best_it = std::min_element(vals.begin(), vals.end());
    result.x = pts[static_cast<std::size_t>(best_it - vals.begin())];
    result.value = *best_it;
    result.iterations = iter;
    return result;
}

// Golden-section minimization on [a, b]; assumes a single interior minimum.
inline double golden_section(const std::function<double(double)>& f, double a, double b,
                             double rel_tolerance, int max_iterations = 200) {
    if (!(a < b))
        throw std::invalid_argument("golden_section: bad bracket");
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < max_iterations && (b - a) > rel_tolerance * (std::abs(a) + std::abs(b));
         ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 < f2 ? x1 : x2;
}

}  // namespace mrham
