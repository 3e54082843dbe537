#include "core/portfolio.hpp"

#include "core/errors.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace hsfp;

namespace {

ReturnPanel panel_from(const std::vector<std::vector<double>>& rows,
                       std::vector<std::string> assets) {
    ReturnPanel p;
    p.assets = std::move(assets);
    p.values.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(p.assets.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        p.months.push_back(Month(2001, 1).plus_months(static_cast<int>(r)));
        for (std::size_t c = 0; c < p.assets.size(); ++c)
            p.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    return p;
}

prob::ProbabilityVector uniform_p(std::size_t n) {
    prob::ProbabilityVector p;
    p.weights.assign(n, 1.0 / static_cast<double>(n));
    return p;
}

portfolio::FpMoments random_moments(testsup::Rng& rng, int n) {
    portfolio::FpMoments m;
    m.mean.resize(n);
    for (int i = 0; i < n; ++i)
        m.mean(i) = rng.uniform(-0.005, 0.02);
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g(i, j) = rng.normal() * 0.03;
    m.cov = g * g.transpose() / static_cast<double>(n);
    return m;
}

double annualized_sharpe(const portfolio::FpMoments& m, const Eigen::VectorXd& w, double rf) {
    double ret = 12.0 * m.mean.dot(w);
    double vol = std::sqrt(12.0 * w.dot(m.cov * w));
    return (ret - rf) / vol;
}

// Exhaustive long-only grid over the 3-simplex at the given step.
double grid_best_sharpe(const portfolio::FpMoments& m, double rf, double step) {
    double best = -1e300;
    int n = static_cast<int>(std::lround(1.0 / step));
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j + i <= n; ++j) {
            Eigen::Vector3d w(static_cast<double>(i) / n, static_cast<double>(j) / n,
                              static_cast<double>(n - i - j) / n);
            double vol = std::sqrt(12.0 * w.dot(m.cov * w));
            if (vol <= 0.0)
                continue;
            best = std::max(best, (12.0 * m.mean.dot(w) - rf) / vol);
        }
    return best;
}

} // namespace

TEST_CASE("uniform probabilities reproduce sample moments") {
    testsup::Rng rng(3);
    std::vector<std::vector<double>> rows;
    for (int t = 0; t < 48; ++t)
        rows.push_back({0.01 * rng.normal(), 0.02 * rng.normal()});
    auto panel = panel_from(rows, {"a", "b"});
    auto m = portfolio::fp_moments(panel, uniform_p(48));

    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& r : rows)
        mean += Eigen::Vector2d(r[0], r[1]);
    mean /= 48.0;
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& r : rows) {
        Eigen::Vector2d c(r[0] - mean(0), r[1] - mean(1));
        cov += c * c.transpose();
    }
    cov /= 48.0; // population convention
    CHECK((m.mean - mean).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((m.cov - cov).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("a point mass pins the moments to one date") {
    auto panel = panel_from({{0.01, -0.02}, {0.03, 0.04}, {-0.01, 0.002}}, {"a", "b"});
    prob::ProbabilityVector p;
    p.weights = {0.0, 1.0, 0.0};
    auto m = portfolio::fp_moments(panel, p);
    CHECK(m.mean(0) == doctest::Approx(0.03).epsilon(1e-15));
    CHECK(m.mean(1) == doctest::Approx(0.04).epsilon(1e-15));
    CHECK(m.cov.lpNorm<Eigen::Infinity>() <= 1e-15);
}

TEST_CASE("weighted moments match hand arithmetic on a four-date panel") {
    auto panel = panel_from({{0.01, 0.00}, {0.02, -0.01}, {-0.01, 0.03}, {0.04, 0.02}},
                            {"a", "b"});
    prob::ProbabilityVector p;
    p.weights = {0.1, 0.2, 0.3, 0.4};
    auto m = portfolio::fp_moments(panel, p);

    double mean_a = 0.1 * 0.01 + 0.2 * 0.02 + 0.3 * -0.01 + 0.4 * 0.04;
    double mean_b = 0.1 * 0.00 + 0.2 * -0.01 + 0.3 * 0.03 + 0.4 * 0.02;
    CHECK(m.mean(0) == doctest::Approx(mean_a).epsilon(1e-14));
    CHECK(m.mean(1) == doctest::Approx(mean_b).epsilon(1e-14));

    double e_aa = 0.1 * 0.01 * 0.01 + 0.2 * 0.02 * 0.02 + 0.3 * 0.01 * 0.01 +
                  0.4 * 0.04 * 0.04;
    double e_ab = 0.1 * 0.01 * 0.00 + 0.2 * 0.02 * -0.01 + 0.3 * -0.01 * 0.03 +
                  0.4 * 0.04 * 0.02;
    CHECK(m.cov(0, 0) == doctest::Approx(e_aa - mean_a * mean_a).epsilon(1e-14));
    CHECK(m.cov(0, 1) == doctest::Approx(e_ab - mean_a * mean_b).epsilon(1e-14));
}

TEST_CASE("misaligned probabilities are rejected") {
    auto panel = panel_from({{0.01, 0.0}, {0.0, 0.01}}, {"a", "b"});
    CHECK_THROWS_AS(portfolio::fp_moments(panel, uniform_p(3)), DataError);
}

TEST_CASE("weighted covariance stays positive semidefinite") {
    testsup::Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<std::vector<double>> rows;
        for (int t = 0; t < 30; ++t)
            rows.push_back({0.03 * rng.normal(), 0.02 * rng.normal(), 0.05 * rng.normal()});
        auto panel = panel_from(rows, {"a", "b", "c"});
        std::vector<double> w(30);
        double sum = 0.0;
        for (auto& v : w) {
            v = rng.uniform();
            sum += v;
        }
        prob::ProbabilityVector p;
        for (double v : w)
            p.weights.push_back(v / sum);
        auto m = portfolio::fp_moments(panel, p);
        CHECK((m.cov - m.cov.transpose()).lpNorm<Eigen::Infinity>() <= 1e-12);
        for (int probe = 0; probe < 20; ++probe) {
            Eigen::Vector3d x(rng.normal(), rng.normal(), rng.normal());
            CHECK(x.dot(m.cov * x) >= -1e-10);
        }
    }
}

TEST_CASE("two uncorrelated equal-variance assets interpolate linearly") {
    portfolio::FpMoments m;
    m.mean.resize(2);
    m.mean << 0.01, 0.02;
    m.cov = Eigen::Matrix2d::Identity() * 0.0016;

    auto frontier = portfolio::efficient_frontier(m, 21);
    // Minimum variance sits at 50/50, so the grid spans [0.015, 0.02] and
    // the closed-form weight on the second asset is (target - 0.01)/0.01.
    for (const auto& pt : frontier.points) {
        double w2 = (pt.target_return - 0.01) / 0.01;
        CHECK(pt.weights(1) == doctest::Approx(w2).epsilon(1e-7));
        CHECK(pt.weights(0) == doctest::Approx(1.0 - w2).epsilon(1e-7));
        CHECK(pt.kkt_residual < 1e-8);
    }
    CHECK(frontier.points.front().target_return == doctest::Approx(0.015).epsilon(1e-7));
    CHECK(frontier.points.back().target_return == doctest::Approx(0.02).epsilon(1e-9));
}

TEST_CASE("identical assets flag a degenerate frontier") {
    portfolio::FpMoments m;
    m.mean = Eigen::Vector3d::Constant(0.01);
    m.cov = Eigen::Matrix3d::Constant(0.0004);
    auto frontier = portfolio::efficient_frontier(m, 10);
    CHECK(frontier.degenerate);
    CHECK(frontier.points.size() == 1);
}

TEST_CASE("frontier points beat every brute-force grid portfolio at their return") {
    testsup::Rng rng(29);
    auto m = random_moments(rng, 3);
    auto frontier = portfolio::efficient_frontier(m, 30);
    REQUIRE(frontier.points.size() > 10);

    // Optimality against the 0.01-step simplex grid: at each grid point's
    // return level the frontier variance cannot be worse.
    double r_lo = frontier.points.front().target_return;
    double r_hi = frontier.points.back().target_return;
    int checked = 0;
    for (int i = 0; i <= 100; ++i)
        for (int j = 0; j + i <= 100; ++j) {
            Eigen::Vector3d w(i / 100.0, j / 100.0, (100 - i - j) / 100.0);
            double ret = m.mean.dot(w);
            if (ret < r_lo || ret > r_hi)
                continue;
            // Nearest frontier points bracket this return; interpolate the
            // achievable variance bound conservatively via the better one.
            double var_grid = w.dot(m.cov * w);
            double best_var = 1e300;
            for (const auto& pt : frontier.points)
                if (std::abs(pt.target_return - ret) <= (r_hi - r_lo) / 29.0)
                    best_var = std::min(best_var, pt.monthly_vol * pt.monthly_vol);
            if (best_var > 1e299)
                continue;
            ++checked;
            CHECK(best_var <= var_grid + 1e-3);
        }
    CHECK(checked > 1000);
}

TEST_CASE("frontier variance is monotone along the grid") {
    testsup::Rng rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        auto m = random_moments(rng, 4);
        auto frontier = portfolio::efficient_frontier(m, 40);
        for (std::size_t k = 1; k < frontier.points.size(); ++k)
            CHECK(frontier.points[k].monthly_vol >=
                  frontier.points[k - 1].monthly_vol - 1e-10);
    }
}

TEST_CASE("max sharpe concentrates on a dominating asset") {
    portfolio::FpMoments m;
    m.mean.resize(2);
    m.mean << 0.02, 0.005;
    m.cov = Eigen::Matrix2d::Zero();
    m.cov(0, 0) = 0.0009; // dominating: higher mean, lower vol
    m.cov(1, 1) = 0.0064;
    auto w = portfolio::max_sharpe(m, 0.02);
    CHECK(w.weights(0) > 0.95);
}

TEST_CASE("exchangeable assets earn equal weights") {
    portfolio::FpMoments m;
    m.mean = Eigen::Vector3d::Constant(0.012);
    m.cov = Eigen::Matrix3d::Identity() * 0.0025;
    m.cov(0, 1) = m.cov(1, 0) = 0.001;
    m.cov(0, 2) = m.cov(2, 0) = 0.001;
    m.cov(1, 2) = m.cov(2, 1) = 0.001;
    auto w = portfolio::max_sharpe(m, 0.03);
    for (int i = 0; i < 3; ++i)
        CHECK(w.weights(i) == doctest::Approx(1.0 / 3).epsilon(1e-6));
}

TEST_CASE("max sharpe matches the brute-force simplex grid") {
    testsup::Rng rng(37);
    const double rf = 0.05;
    for (int trial = 0; trial < 3; ++trial) {
        auto m = random_moments(rng, 3);
        auto w = portfolio::max_sharpe(m, rf);
        double mine = annualized_sharpe(m, w.weights, rf);
        double grid = grid_best_sharpe(m, rf, 0.01);
        CHECK(mine >= grid - 1e-3);
        CHECK(std::abs(w.weights.sum() - 1.0) <= 1e-10);
        CHECK(w.weights.minCoeff() >= -1e-12);
    }
}

TEST_CASE("scaling excess means leaves the argmax weights unchanged") {
    testsup::Rng rng(41);
    const double rf = 0.04;
    auto m = random_moments(rng, 3);
    // Make sure at least one asset beats the risk-free rate.
    m.mean.array() += rf / 12.0 - m.mean.minCoeff() + 0.002;
    auto base = portfolio::max_sharpe(m, rf);

    portfolio::FpMoments scaled = m;
    scaled.mean = (m.mean.array() - rf / 12.0) * 3.0 + rf / 12.0;
    auto w2 = portfolio::max_sharpe(scaled, rf);
    CHECK((base.weights - w2.weights).lpNorm<Eigen::Infinity>() <= 1e-6);
}

TEST_CASE("benchmarks") {
    auto ew5 = portfolio::benchmark_ew(5);
    for (int i = 0; i < 5; ++i)
        CHECK(ew5.weights(i) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(portfolio::benchmark_ew(1).weights(0) == 1.0);
    CHECK(ew5.label == "EW");

    testsup::Rng rng(43);
    std::vector<std::vector<double>> rows;
    for (int t = 0; t < 70; ++t)
        rows.push_back({0.01 + 0.03 * rng.normal(), 0.004 + 0.02 * rng.normal()});
    auto panel = panel_from(rows, {"a", "b"});
    auto mvo = portfolio::benchmark_mvo(panel, 0.05);
    auto direct = portfolio::max_sharpe(portfolio::fp_moments(panel, uniform_p(70)), 0.05);
    CHECK((mvo.weights - direct.weights).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK(mvo.label == "MVO");

    std::vector<std::vector<double>> single;
    for (int t = 0; t < 30; ++t)
        single.push_back({0.01 + 0.02 * rng.normal()});
    auto mono = portfolio::benchmark_mvo(panel_from(single, {"only"}), 0.05);
    CHECK(mono.weights(0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zero-volatility moment sets cannot produce a sharpe portfolio") {
    portfolio::FpMoments m;
    m.mean = Eigen::Vector2d(0.01, 0.02);
    m.cov = Eigen::Matrix2d::Zero();
    CHECK_THROWS_AS(portfolio::max_sharpe(m, 0.05), NumericError);
}
