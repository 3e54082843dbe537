#include "core/flexprob.hpp"

#include "core/errors.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace hsfp;

TEST_CASE("rolling window puts equal weight on the most recent dates") {
    auto p = prob::rolling_window(5, 3);
    CHECK(p.weights == std::vector<double>{0.0, 0.0, 1.0 / 3, 1.0 / 3, 1.0 / 3});

    auto uniform = prob::rolling_window(4, 4);
    for (double w : uniform.weights)
        CHECK(w == doctest::Approx(0.25).epsilon(1e-15));

    auto point = prob::rolling_window(6, 1);
    CHECK(point.weights.back() == 1.0);
    CHECK(std::count(point.weights.begin(), point.weights.end(), 0.0) == 5);

    auto clipped = prob::rolling_window(3, 10);
    CHECK(!clipped.flags.empty());
    for (double w : clipped.weights)
        CHECK(w == doctest::Approx(1.0 / 3).epsilon(1e-15));

    CHECK_THROWS_AS(prob::rolling_window(3, 0), ConfigError);
}

TEST_CASE("exponential decay weights follow the half-life") {
    auto p = prob::exp_decay(2, 1.0);
    CHECK(p.weights[0] == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(p.weights[1] == doctest::Approx(2.0 / 3).epsilon(1e-12));

    // One half-life back the weight is half the latest weight.
    auto q = prob::exp_decay(20, 5.0);
    CHECK(q.weights[19 - 5] / q.weights[19] == doctest::Approx(0.5).epsilon(1e-12));

    auto flat = prob::exp_decay(50, 1e9);
    for (double w : flat.weights)
        CHECK(w == doctest::Approx(1.0 / 50).epsilon(1e-9));

    for (std::size_t t = 1; t < q.weights.size(); ++t)
        CHECK(q.weights[t] > q.weights[t - 1]);

    CHECK_THROWS_AS(prob::exp_decay(5, 0.0), ConfigError);
    CHECK_THROWS_AS(prob::exp_decay(5, -1.0), ConfigError);
}

TEST_CASE("crisp band on the five-point sample follows the hand-worked algorithm") {
    // Sorted CDF nodes: (-2,.2) (-1,.4) (0,.6) (1,.8) (2,1). The target's
    // CDF value is .6, so the band runs from quantile(.4) = -1 to
    // quantile(.8) = 1, selecting the central three points.
    std::vector<double> z = {-2.0, -1.0, 0.0, 1.0, 2.0};
    auto res = prob::crisp(z, 0.0, 0.4);
    CHECK(res.lower == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(res.upper == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.probabilities.weights[0] == 0.0);
    CHECK(res.probabilities.weights[1] == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(res.probabilities.weights[2] == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(res.probabilities.weights[3] == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(res.probabilities.weights[4] == 0.0);
}

TEST_CASE("near-unit leeway selects every date") {
    std::vector<double> z = {-2.0, -1.0, 0.0, 1.0, 2.0};
    auto res = prob::crisp(z, 0.3, 0.999);
    for (double w : res.probabilities.weights)
        CHECK(w == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("targets beyond the sample maximum pin the band to the sample edge") {
    std::vector<double> z = {-2.0, -1.0, 0.0, 1.0, 2.0};
    auto res = prob::crisp(z, 5.0, 0.4);
    CHECK(res.upper == 2.0);
    CHECK(res.probabilities.weights[4] > 0.0);
}

TEST_CASE("crisp reconstruction: weights equal membership of the returned band") {
    testsup::Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> z = rng.normals(40);
        double target = rng.uniform(-2.0, 2.0);
        double leeway = rng.uniform(0.1, 0.9);
        auto res = prob::crisp(z, target, leeway);
        std::size_t selected = 0;
        for (double v : z)
            if (v >= res.lower && v <= res.upper)
                ++selected;
        for (std::size_t t = 0; t < z.size(); ++t) {
            double expect =
                (z[t] >= res.lower && z[t] <= res.upper) ? 1.0 / static_cast<double>(selected)
                                                         : 0.0;
            CHECK(res.probabilities.weights[t] == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("a band narrower than the sample spacing is a hard error") {
    std::vector<double> z = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    try {
        prob::crisp(z, 0.55, 0.05);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        std::string msg = e.what();
        CHECK(msg.find("0.55") != std::string::npos);
        CHECK(msg.find("0.05") != std::string::npos);
    }
}

TEST_CASE("kernel weights decay with distance from the target") {
    auto p = prob::kernel({0.0, 1.0, 2.0}, 0.0, 1.0, 2);
    double z0 = 1.0, z1 = std::exp(-1.0), z2 = std::exp(-4.0);
    double total = z0 + z1 + z2;
    CHECK(p.weights[0] == doctest::Approx(z0 / total).epsilon(1e-12));
    CHECK(p.weights[1] == doctest::Approx(z1 / total).epsilon(1e-12));
    CHECK(p.weights[2] == doctest::Approx(z2 / total).epsilon(1e-12));

    // The date matching the target always carries the largest weight.
    testsup::Rng rng(5);
    std::vector<double> z = rng.normals(30);
    z[17] = 0.42;
    auto q = prob::kernel(z, 0.42, 0.7, 1);
    CHECK(*std::max_element(q.weights.begin(), q.weights.end()) ==
          doctest::Approx(q.weights[17]).epsilon(1e-15));

    auto wide = prob::kernel(z, 0.0, 1e12, 2);
    for (double w : wide.weights)
        CHECK(w == doctest::Approx(1.0 / 30).epsilon(1e-9));

    CHECK_THROWS_AS(prob::kernel(z, 0.0, 0.0, 2), ConfigError);
    CHECK_THROWS_AS(prob::kernel(z, 0.0, 1.0, 3), ConfigError);
}

TEST_CASE("kernel weights are invariant under joint translation") {
    testsup::Rng rng(13);
    std::vector<double> z = rng.normals(25);
    std::vector<double> shifted = z;
    for (double& v : shifted)
        v += 7.5;
    auto a = prob::kernel(z, 0.3, 0.8, 2);
    auto b = prob::kernel(shifted, 7.8, 0.8, 2);
    for (std::size_t t = 0; t < z.size(); ++t)
        CHECK(a.weights[t] == doctest::Approx(b.weights[t]).epsilon(1e-12));
}

TEST_CASE("effective scenarios counts uniform and degenerate vectors exactly") {
    prob::ProbabilityVector uniform;
    uniform.weights.assign(100, 0.01);
    CHECK(prob::effective_scenarios(uniform) == doctest::Approx(100.0).epsilon(1e-12));

    prob::ProbabilityVector point;
    point.weights.assign(50, 0.0);
    point.weights[20] = 1.0;
    CHECK(prob::effective_scenarios(point) == 1.0);

    prob::ProbabilityVector coin;
    coin.weights = {0.5, 0.5, 0.0, 0.0};
    CHECK(prob::effective_scenarios(coin) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("generalized effective scenarios follows the power form") {
    prob::ProbabilityVector p;
    p.weights = {0.5, 0.25, 0.25};
    // gamma = 2: 1 / sum p^2 = 1 / 0.375
    CHECK(prob::effective_scenarios(p, 2.0) == doctest::Approx(1.0 / 0.375).epsilon(1e-12));
    prob::ProbabilityVector uniform;
    uniform.weights.assign(8, 0.125);
    CHECK(prob::effective_scenarios(uniform, 3.0) == doctest::Approx(8.0).epsilon(1e-12));
    CHECK_THROWS_AS(prob::effective_scenarios(p, 1.0), ConfigError);
}

TEST_CASE("every constructor returns a valid vector with ENS inside [1, n]") {
    testsup::Rng rng(47);
    for (int trial = 0; trial < 25; ++trial) {
        std::size_t n = 5 + rng.index(60);
        std::vector<double> z = rng.normals(n);
        std::vector<prob::ProbabilityVector> built = {
            prob::rolling_window(n, 1 + static_cast<long>(rng.index(n))),
            prob::exp_decay(n, rng.uniform(0.5, 40.0)),
            prob::kernel(z, rng.uniform(-1.0, 1.0), rng.uniform(0.2, 3.0), 2),
            prob::crisp(z, rng.uniform(-1.0, 1.0), rng.uniform(0.2, 0.9)).probabilities,
        };
        for (const auto& p : built) {
            p.validate();
            double sum = 0.0;
            for (double w : p.weights) {
                CHECK(w >= 0.0);
                sum += w;
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
            double ens = prob::effective_scenarios(p);
            CHECK(ens >= 1.0 - 1e-12);
            CHECK(ens <= static_cast<double>(n) + 1e-9);
        }
    }
}
