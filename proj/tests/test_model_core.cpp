#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "mrham/response.hpp"
#include "mrham/types.hpp"
#include "oracle.hpp"

using namespace mrham;

namespace {

PolynomialNonlinearity single_poly() {
    return {{7.077, -4.435e-2, -9.229e-4, -1.709e-5}};
}

FastDynamics single_fast() { return {0.76, 39.98, 246.11}; }
SlowDynamics single_slow() { return {0.13, 0.13 / 0.76}; }

}  // namespace

TEST_CASE("type invariants reject bad values") {
    CHECK_THROWS_AS(PolynomialNonlinearity{}.validate(), std::invalid_argument);
    CHECK_THROWS_AS((PolynomialNonlinearity{{1.0, std::nan("")}}.validate()), std::invalid_argument);

    CHECK_THROWS_AS((FastDynamics{0.0, 40.0, 246.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((FastDynamics{0.76, -1.0, 246.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((FastDynamics{0.76, 40.0, 0.0}).validate(), std::invalid_argument);
    CHECK_NOTHROW(single_fast().validate());

    CHECK_THROWS_AS((SlowDynamics{0.0, 0.17}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((SlowDynamics{0.13, -0.17}).validate(), std::invalid_argument);
    CHECK_NOTHROW(single_slow().validate());

    CHECK_THROWS_AS((TimeSeries{0.0, {1.0, 2.0}}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((TimeSeries{1e-3, {1.0}}).validate(), std::invalid_argument);
    CHECK_NOTHROW((TimeSeries{1e-3, {1.0, 2.0}}).validate());
}

TEST_CASE("model validation enforces unit combined static gain") {
    HammersteinModel good{single_poly(), single_fast(), single_slow()};
    CHECK_NOTHROW(good.validate());

    HammersteinModel bad = good;
    bad.fast.gain = 0.9;  // gain * z0 / s0 far from 1
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("polynomial evaluation") {
    const auto f = single_poly();
    CHECK(eval_nonlinearity(f, 0.0) == 7.077);

    // Reference computed by term-by-term summation before implementation.
    CHECK(eval_nonlinearity(f, 12.0) == Catch::Approx(6.38237088).margin(1e-9));
    CHECK(eval_nonlinearity(f, 12.0) ==
          Catch::Approx(oracle::poly_term_sum(f.coefficients, 12.0)).epsilon(1e-12));
    CHECK(eval_nonlinearity(f, -12.0) ==
          Catch::Approx(oracle::poly_term_sum(f.coefficients, -12.0)).epsilon(1e-12));

    PolynomialNonlinearity zero{{0.0, 0.0, 0.0}};
    CHECK(eval_nonlinearity(zero, 3.7) == 0.0);

    CHECK_THROWS_AS(eval_nonlinearity(f, std::nan("")), std::invalid_argument);
}

TEST_CASE("fast step response starts at exactly zero") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> kd(0.1, 10.0), ad(1.0, 500.0), wd(1.0, 2000.0);
    for (int i = 0; i < 200; ++i) {
        FastDynamics fast{kd(rng), ad(rng), wd(rng)};
        CHECK(std::abs(step_response_fast(fast, 0.0)) < 1e-12);
    }
}

TEST_CASE("fast step response settles at the gain") {
    const auto fast = single_fast();
    CHECK(step_response_fast(fast, 1.0) == Catch::Approx(0.76).margin(1e-9));
    CHECK_THROWS_AS(step_response_fast(fast, -1e-9), std::invalid_argument);
}

TEST_CASE("fast step response envelope bound") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> kd(0.1, 10.0), ad(1.0, 500.0), wd(1.0, 2000.0);
    for (int i = 0; i < 50; ++i) {
        FastDynamics fast{kd(rng), ad(rng), wd(rng)};
        const double env0 = fast.gain * std::sqrt(fast.decay_rate * fast.decay_rate +
                                                  fast.damped_frequency * fast.damped_frequency) /
                            fast.damped_frequency;
        for (double t : {0.0, 1e-3, 0.01, 0.1, 0.5, 2.0}) {
            const double bound = env0 * std::exp(-fast.decay_rate * t) * (1.0 + 1e-12) + 1e-15;
            CHECK(std::abs(step_response_fast(fast, t) - fast.gain) <= bound);
        }
    }
}

TEST_CASE("fast step response matches an independent second-order integration") {
    const auto fast = single_fast();
    const std::vector<double> probe{0.01};
    const double ode = oracle::fast_step_rk4(fast.gain, fast.decay_rate, fast.damped_frequency,
                                             probe, 1e-6)[0];
    CHECK(step_response_fast(fast, 0.01) == Catch::Approx(ode).epsilon(1e-6));

    // Dense comparison over the two-timescale horizon, error relative to the
    // response scale.
    std::vector<double> grid;
    const double horizon = 10.0 / 0.13;
    for (int i = 0; i < 200; ++i)
        grid.push_back(horizon * i / 199.0);
    const auto ref = oracle::fast_step_rk4(fast.gain, fast.decay_rate, fast.damped_frequency,
                                           grid, 1e-4);
    double scale = 0.0, worst = 0.0;
    for (double v : ref)
        scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst, std::abs(step_response_fast(fast, grid[i]) - ref[i]) / scale);
    CHECK(worst < 1e-6);
}

TEST_CASE("slow step response endpoints and oracle agreement") {
    const auto slow = single_slow();
    CHECK(step_response_slow(slow, 0.0) == 1.0);
    CHECK(step_response_slow(slow, 100.0) == Catch::Approx(slow.zero / slow.pole).margin(1e-6));
    CHECK_THROWS_AS(step_response_slow(slow, -0.5), std::invalid_argument);

    const double ode = oracle::slow_step_rk4(slow.pole, slow.zero, {5.0}, 1e-5)[0];
    CHECK(step_response_slow(slow, 5.0) == Catch::Approx(ode).epsilon(1e-6));
}

TEST_CASE("slow step response is monotone when the zero exceeds the pole") {
    const SlowDynamics slow{0.2, 0.35};
    double prev = step_response_slow(slow, 0.0);
    for (int i = 1; i <= 300; ++i) {
        const double cur = step_response_slow(slow, i * 0.1);
        CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("frequency response limits") {
    const auto fast = single_fast();
    const auto slow = single_slow();

    auto dc = frequency_response(fast, slow, {1e-9});
    CHECK(dc.fast[0].magnitude == Catch::Approx(fast.gain).margin(1e-6));
    CHECK(dc.slow[0].magnitude == Catch::Approx(slow.zero / slow.pole).margin(1e-6));

    auto high = frequency_response(fast, slow, {1000.0 * slow.pole});
    CHECK(high.slow[0].magnitude == Catch::Approx(1.0).epsilon(0.005));

    CHECK_THROWS_AS(frequency_response(fast, slow, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(frequency_response(fast, slow, {1.0, -2.0}), std::invalid_argument);
}

TEST_CASE("product response equals the elementwise product of the blocks") {
    const auto fast = single_fast();
    const auto slow = single_slow();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> wd(-3.0, 4.0);
    std::vector<double> freqs;
    for (int i = 0; i < 20; ++i)
        freqs.push_back(std::pow(10.0, wd(rng)));

    const auto resp = frequency_response(fast, slow, freqs);
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        const std::complex<double> s(0.0, freqs[i]);
        const auto prod = fast_transfer(fast, s) * slow_transfer(slow, s);
        CHECK(resp.total[i].magnitude == Catch::Approx(std::abs(prod)).margin(1e-12));
        CHECK(resp.total[i].phase == Catch::Approx(std::arg(prod)).margin(1e-12));
        CHECK(resp.total[i].magnitude ==
              Catch::Approx(resp.fast[i].magnitude * resp.slow[i].magnitude).epsilon(1e-12));
    }
}
