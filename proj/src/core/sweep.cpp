#include "core/sweep.hpp"

#include "core/errors.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace hsfp::sweep {

std::size_t MeshSpec::size() const {
    return leeway.size() * rebalance_months.size() * prior_half_life.size() *
           fast_half_life.size() * slow_half_life.size();
}

std::vector<robust::TrialParams> MeshSpec::expand() const {
    if (size() == 0)
        throw ConfigError("sweep: every mesh dimension needs at least one value");
    std::vector<robust::TrialParams> out;
    out.reserve(size());
    for (double lw : leeway)
        for (int rb : rebalance_months)
            for (double ph : prior_half_life)
                for (double fh : fast_half_life)
                    for (double sh : slow_half_life)
                        out.push_back({lw, rb, ph, fh, sh});
    return out;
}

robust::TrialMatrix run_sweep(const TimeSeriesPanel& prices, const TimeSeriesPanel& signals,
                              const std::vector<backtest::SignalSpec>& specs,
                              const backtest::BacktestConfig& base, const MeshSpec& mesh,
                              int workers) {
    const std::vector<robust::TrialParams> points = mesh.expand();
    const std::size_t n = points.size();

    robust::TrialMatrix trials;
    trials.params = points;
    trials.names.resize(n);
    int width = 1;
    for (std::size_t v = n; v >= 10; v /= 10)
        ++width;
    for (std::size_t i = 0; i < n; ++i) {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "cfg%0*zu", width, i + 1);
        trials.names[i] = buf;
    }

    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::exception_ptr first_error;
    std::vector<std::vector<double>> columns(n);
    std::vector<Month> months;

    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (first_error)
                    return;
            }
            try {
                backtest::BacktestConfig cfg = base;
                cfg.leeway = points[i].leeway;
                cfg.rebalance_months = points[i].rebalance_months;
                cfg.prior_half_life = points[i].prior_half_life;
                cfg.fast_half_life = points[i].fast_half_life;
                cfg.slow_half_life = points[i].slow_half_life;
                backtest::BacktestResult r = backtest::run_backtest(prices, signals, specs, cfg);
                std::lock_guard<std::mutex> lock(mu);
                if (months.empty())
                    months = r.months;
                else if (months != r.months)
                    throw NumericError("sweep: configurations disagree on the sample grid");
                columns[i] = std::move(r.net);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!first_error)
                    first_error = std::current_exception();
            }
        }
    };

    const int n_threads = std::max(1, workers);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int w = 0; w < n_threads; ++w)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    if (first_error)
        std::rethrow_exception(first_error);

    trials.months = months;
    trials.returns.resize(static_cast<Eigen::Index>(months.size()),
                          static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < months.size(); ++t)
            trials.returns(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) =
                columns[i][t];
    return trials;
}

} // namespace hsfp::sweep
