#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "mrham/optimize.hpp"
#include "mrham/polyfit.hpp"
#include "oracle.hpp"

using namespace mrham;

namespace {

StaticCharacteristic sample_curve(const std::vector<double>& coeffs, const std::vector<double>& us) {
    StaticCharacteristic out;
    for (double u : us)
        out.points.push_back({u, oracle::poly_term_sum(coeffs, u)});
    return out;
}

std::vector<double> voltage_grid(double lo, double hi, int n) {
    std::vector<double> us(n);
    for (int i = 0; i < n; ++i)
        us[i] = lo + (hi - lo) * i / (n - 1);
    return us;
}

const std::vector<double> kSingleCoeffs{7.077, -4.435e-2, -9.229e-4, -1.709e-5};
const std::vector<double> kDoubleCoeffs{6.539, -8.240e-2, -1.663e-3, 1.450e-5};

}  // namespace

TEST_CASE("exact cubic samples recover the coefficients") {
    for (const auto& coeffs : {kSingleCoeffs, kDoubleCoeffs}) {
        const auto statics = sample_curve(coeffs, voltage_grid(-12.0, 12.0, 13));
        const auto fit = fit_static(statics, 3);
        REQUIRE(fit.coefficients.size() == 4);
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(fit.coefficients[i] == Catch::Approx(coeffs[i]).margin(1e-9));
    }
}

TEST_CASE("horizontal data fits a zero slope") {
    StaticCharacteristic statics;
    for (double u : voltage_grid(-5.0, 5.0, 7))
        statics.points.push_back({u, 2.5});
    const auto fit = fit_static(statics, 1);
    CHECK(fit.coefficients[0] == Catch::Approx(2.5).margin(1e-12));
    CHECK(fit.coefficients[1] == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("noisy fit agrees with a normal-equations solution") {
    auto statics = sample_curve(kDoubleCoeffs, voltage_grid(-12.0, 12.0, 22));
    std::mt19937_64 rng(42);
    std::normal_distribution<double> noise(0.0, 0.005);
    std::vector<double> us, ys;
    for (auto& pt : statics.points) {
        pt.displacement += noise(rng);
        us.push_back(pt.voltage);
        ys.push_back(pt.displacement);
    }

    const auto fit = fit_static(statics, 3);
    const auto ref = oracle::normal_equation_fit(us, ys, 3);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(fit.coefficients[i] == Catch::Approx(ref[i]).margin(1e-8));

    // The fitted curve stays close to the noiseless truth everywhere.
    for (double u : voltage_grid(-12.0, 12.0, 241)) {
        const double err = eval_nonlinearity(fit, u) - oracle::poly_term_sum(kDoubleCoeffs, u);
        CHECK(std::abs(err) <= 0.01);
    }
}

TEST_CASE("fit preconditions and rank deficiency") {
    const auto statics = sample_curve(kSingleCoeffs, voltage_grid(-12.0, 12.0, 13));
    CHECK_THROWS_AS(fit_static(statics, 0), std::invalid_argument);
    CHECK_THROWS_AS(fit_static(statics, 13), std::invalid_argument);

    StaticCharacteristic dup;
    dup.points = {{1.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}};
    CHECK_THROWS_AS(fit_static(dup, 2), std::invalid_argument);  // sorted-increase invariant

    StaticCharacteristic empty;
    CHECK_THROWS_AS(fit_static(empty, 1), std::invalid_argument);
}

TEST_CASE("fitting is locally optimal under coefficient perturbations") {
    auto statics = sample_curve(kSingleCoeffs, voltage_grid(-12.0, 12.0, 22));
    std::mt19937_64 rng(5);
    std::normal_distribution<double> noise(0.0, 0.003);
    for (auto& pt : statics.points)
        pt.displacement += noise(rng);

    const auto fit = fit_static(statics, 3);
    const double base = sum_squared_residual(statics, fit);
    std::uniform_real_distribution<double> delta(-1e-6, 1e-6);
    for (int trial = 0; trial < 100; ++trial) {
        auto perturbed = fit;
        for (auto& c : perturbed.coefficients)
            c += delta(rng);
        CHECK(sum_squared_residual(statics, perturbed) >= base - 1e-15);
    }
}

TEST_CASE("degree selection prefers the smallest adequate degree") {
    const auto cubic = sample_curve(kSingleCoeffs, voltage_grid(-12.0, 12.0, 15));
    CHECK(select_degree(cubic, {1, 2, 3, 4, 5}).degree == 3);

    const auto linear = sample_curve({1.0, 0.5}, voltage_grid(-12.0, 12.0, 9));
    CHECK(select_degree(linear, {1, 2, 3}).degree == 1);

    StaticCharacteristic constant;
    for (double u : voltage_grid(-3.0, 3.0, 8))
        constant.points.push_back({u, 1.75});
    const auto sel = select_degree(constant, {1, 2});
    CHECK(sel.degree == 1);
    const auto fit = fit_static(constant, sel.degree);
    CHECK(fit.coefficients[1] == Catch::Approx(0.0).margin(1e-12));

    CHECK_THROWS_AS(select_degree(cubic, {}), std::invalid_argument);
    CHECK(select_degree(cubic, {1, 2, 3}).fits.size() == 3);

    // Degrees the point count cannot support are skipped, not fatal.
    const auto tiny = sample_curve({1.0, 0.5}, voltage_grid(0.0, 2.0, 3));
    CHECK(select_degree(tiny, {1, 2, 3, 4, 5}).fits.size() == 2);
    CHECK(select_degree(tiny, {1, 2, 3, 4, 5}).degree == 1);
    CHECK_THROWS_AS(select_degree(tiny, {4, 5}), std::invalid_argument);
}

TEST_CASE("simplex minimizes a shifted quadratic bowl") {
    auto f = [](const std::vector<double>& x) {
        const double a = x[0] - 1.5, b = x[1] + 0.5;
        return a * a + 3.0 * b * b + 2.0;
    };
    const auto r = nelder_mead(f, {0.0, 0.0}, {0.5, 0.5}, 1e-12, 2000);
    CHECK(r.converged);
    CHECK(r.x[0] == Catch::Approx(1.5).margin(1e-5));
    CHECK(r.x[1] == Catch::Approx(-0.5).margin(1e-5));
    CHECK(r.value == Catch::Approx(2.0).margin(1e-9));
}

TEST_CASE("simplex handles a non-smooth objective") {
    auto f = [](const std::vector<double>& x) {
        return std::abs(x[0] - 2.0) + 0.5 * std::abs(x[1] - 1.0) + std::abs(x[2] + 3.0);
    };
    const auto r = nelder_mead(f, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, 1e-12, 5000);
    CHECK(r.x[0] == Catch::Approx(2.0).margin(1e-4));
    CHECK(r.x[1] == Catch::Approx(1.0).margin(1e-4));
    CHECK(r.x[2] == Catch::Approx(-3.0).margin(1e-4));
}

TEST_CASE("simplex reports when iterations run out") {
    auto f = [](const std::vector<double>& x) { return x[0] * x[0]; };
    const auto r = nelder_mead(f, {100.0}, {1.0}, 1e-15, 3);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 3);
}

TEST_CASE("golden section finds an interior minimum") {
    auto f = [](double x) { return (x - 0.37) * (x - 0.37) + 1.0; };
    CHECK(golden_section(f, 1e-3, 10.0, 1e-12) == Catch::Approx(0.37).margin(1e-6));
    CHECK_THROWS_AS(golden_section(f, 5.0, 1.0, 1e-12), std::invalid_argument);
}

TEST_CASE("optimizer settings validation") {
    CHECK_NOTHROW(OptimizerSettings{}.validate());
    CHECK_THROWS_AS((OptimizerSettings{0.0, 100, 1}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((OptimizerSettings{1e-10, 0, 1}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((OptimizerSettings{1e-10, 100, 0}).validate(), std::invalid_argument);
}
