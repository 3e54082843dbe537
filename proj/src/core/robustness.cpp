#include "core/robustness.hpp"

#include "core/errors.hpp"
#include "core/kmeans.hpp"
#include "core/normal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hsfp::robust {

namespace {

constexpr double kEulerMascheroni = 0.57721566490153286060651209008240243;

double guarded_sharpe(double mean, double var) {
    if (var > 0.0)
        return mean / std::sqrt(var);
    if (mean > 0.0)
        return 1e12;
    if (mean < 0.0)
        return -1e12;
    return 0.0;
}

// Population variance, with the rounding residue of constant series
// snapped to zero.
double population_variance(const Eigen::VectorXd& r) {
    double mean = r.mean();
    double var = (r.array() - mean).square().sum() / static_cast<double>(r.size());
    if (var <= 1e-24 * mean * mean)
        return 0.0;
    return var;
}

} // namespace

double series_sharpe(const Eigen::VectorXd& r) {
    return guarded_sharpe(r.mean(), population_variance(r));
}

SeriesMoments series_moments(const Eigen::VectorXd& r) {
    SeriesMoments m;
    const double n = static_cast<double>(r.size());
    m.mean = r.mean();
    Eigen::ArrayXd c = r.array() - m.mean;
    double m2 = c.square().sum() / n;
    m.std_dev = std::sqrt(m2);
    if (m2 > 0.0) {
        m.skew = (c.pow(3).sum() / n) / std::pow(m2, 1.5);
        m.kurt = (c.pow(4).sum() / n) / (m2 * m2);
    } else {
        m.skew = 0.0;
        m.kurt = 3.0;
    }
    return m;
}

double psr(double sr_observed, double sr_benchmark, double t_obs, double skew, double kurt) {
    if (t_obs < 2.0)
        throw ConfigError("psr: need at least 2 observations");
    if (kurt < 1.0)
        throw ConfigError("psr: kurtosis below 1 is not a valid raw kurtosis");
    double denom_sq = 1.0 - skew * sr_observed + (kurt - 1.0) / 4.0 * sr_observed * sr_observed;
    if (!(denom_sq > 0.0))
        throw NumericError("psr: non-positive variance term (sr " +
                           std::to_string(sr_observed) + ", skew " + std::to_string(skew) +
                           ", kurt " + std::to_string(kurt) + ")");
    double z = (sr_observed - sr_benchmark) * std::sqrt(t_obs - 1.0) / std::sqrt(denom_sq);
    return normal::cdf(z);
}

double min_trl(double sr_observed, double sr_benchmark, double skew, double kurt,
               double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0))
        throw ConfigError("min_trl: confidence must lie in (0, 1)");
    if (sr_observed <= sr_benchmark)
        return std::numeric_limits<double>::infinity();
    double denom_sq = 1.0 - skew * sr_observed + (kurt - 1.0) / 4.0 * sr_observed * sr_observed;
    if (!(denom_sq > 0.0))
        throw NumericError("min_trl: non-positive variance term");
    double zc = normal::quantile(confidence);
    double delta = sr_observed - sr_benchmark;
    double t_real = 1.0 + denom_sq * (zc / delta) * (zc / delta);

    // Round up to the smallest integer track length satisfying the PSR,
    // nudging across floating-point boundaries directly.
    double t = std::ceil(t_real - 1e-9);
    t = std::max(t, 2.0);
    while (psr(sr_observed, sr_benchmark, t, skew, kurt) < confidence)
        t += 1.0;
    while (t > 2.0 && psr(sr_observed, sr_benchmark, t - 1.0, skew, kurt) >= confidence)
        t -= 1.0;
    return t;
}

std::vector<std::uint32_t> cscv_masks(int s) {
    std::vector<std::uint32_t> masks;
    const int half = s / 2;
    // Lexicographic enumeration of all S-choose-S/2 bitmasks.
    std::vector<int> idx(static_cast<std::size_t>(half));
    for (int i = 0; i < half; ++i)
        idx[static_cast<std::size_t>(i)] = i;
    while (true) {
        std::uint32_t m = 0;
        for (int i : idx)
            m |= (1u << i);
        masks.push_back(m);
        int pos = half - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == s - half + pos)
            --pos;
        if (pos < 0)
            break;
        ++idx[static_cast<std::size_t>(pos)];
        for (int j = pos + 1; j < half; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
    return masks;
}

namespace {

double average_rank(const std::vector<double>& values, std::size_t idx) {
    double v = values[idx];
    std::size_t less = 0, tied = 0;
    for (double x : values) {
        if (x < v)
            ++less;
        else if (x == v)
            ++tied;
    }
    return static_cast<double>(less) + (static_cast<double>(tied) + 1.0) / 2.0;
}

} // namespace

OverfitReport pbo_cscv(const TrialMatrix& trials, int partitions, double sr_threshold) {
    if (trials.cols() < 2)
        throw DataError("pbo_cscv: need at least 2 trial columns");
    if (partitions < 4 || partitions % 2 != 0)
        throw ConfigError("pbo_cscv: partitions must be even and at least 4");
    if (partitions > 30)
        throw ConfigError("pbo_cscv: partitions above 30 are not supported");

    OverfitReport rep;

    // Columns that never move have no Sharpe ratio; exclude them.
    for (int c = 0; c < static_cast<int>(trials.cols()); ++c) {
        double var = population_variance(trials.returns.col(c));
        if (var > 0.0) {
            rep.kept_columns.push_back(c);
        } else {
            rep.flags.push_back("column '" + trials.names[static_cast<std::size_t>(c)] +
                                "' excluded: zero volatility");
        }
    }
    const std::size_t n_cols = rep.kept_columns.size();
    if (n_cols < 2)
        throw DataError("pbo_cscv: fewer than 2 usable trial columns");

    const std::size_t s = static_cast<std::size_t>(partitions);
    const std::size_t t_use = trials.rows() - trials.rows() % s;
    rep.rows_used = t_use;
    rep.rows_dropped = trials.rows() - t_use;
    if (rep.rows_dropped > 0)
        rep.flags.push_back(std::to_string(rep.rows_dropped) +
                            " trailing rows dropped to make rows divisible by partitions");
    const std::size_t block = t_use / s;
    if (block < 1 || t_use < 2 * s)
        throw DataError("pbo_cscv: too few rows for " + std::to_string(partitions) +
                        " partitions");

    // Per-(block, column) partial sums make each combination O(S) per column.
    Eigen::MatrixXd bsum = Eigen::MatrixXd::Zero(partitions, static_cast<Eigen::Index>(n_cols));
    Eigen::MatrixXd bsq = Eigen::MatrixXd::Zero(partitions, static_cast<Eigen::Index>(n_cols));
    for (std::size_t j = 0; j < n_cols; ++j) {
        const int c = rep.kept_columns[j];
        for (std::size_t b = 0; b < s; ++b) {
            double acc = 0.0, acc2 = 0.0;
            for (std::size_t t = b * block; t < (b + 1) * block; ++t) {
                double x = trials.returns(static_cast<Eigen::Index>(t), c);
                acc += x;
                acc2 += x * x;
            }
            bsum(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(j)) = acc;
            bsq(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(j)) = acc2;
        }
    }

    const std::vector<std::uint32_t> masks = cscv_masks(partitions);
    rep.n_combinations = masks.size();
    const double half_rows = static_cast<double>(t_use) / 2.0;
    const double n_plus_1 = static_cast<double>(n_cols) + 1.0;

    rep.logits.reserve(masks.size());
    rep.is_oos_pairs.reserve(masks.size());
    std::vector<double> sr_is(n_cols), sr_oos(n_cols);
    std::vector<double> pooled_oos;
    pooled_oos.reserve(masks.size() * n_cols);

    std::size_t n_neg = 0, n_loss = 0;
    for (std::uint32_t mask : masks) {
        for (std::size_t j = 0; j < n_cols; ++j) {
            double s_is = 0.0, q_is = 0.0, s_oos = 0.0, q_oos = 0.0;
            for (int b = 0; b < partitions; ++b) {
                double sv = bsum(b, static_cast<Eigen::Index>(j));
                double qv = bsq(b, static_cast<Eigen::Index>(j));
                if (mask & (1u << b)) {
                    s_is += sv;
                    q_is += qv;
                } else {
                    s_oos += sv;
                    q_oos += qv;
                }
            }
            double mean_is = s_is / half_rows;
            double mean_oos = s_oos / half_rows;
            sr_is[j] = guarded_sharpe(mean_is, q_is / half_rows - mean_is * mean_is);
            sr_oos[j] = guarded_sharpe(mean_oos, q_oos / half_rows - mean_oos * mean_oos);
        }
        std::size_t winner = 0;
        for (std::size_t j = 1; j < n_cols; ++j)
            if (sr_is[j] > sr_is[winner])
                winner = j;

        double omega = average_rank(sr_oos, winner) / n_plus_1;
        omega = std::clamp(omega, 1.0 / n_plus_1, static_cast<double>(n_cols) / n_plus_1);
        double logit = std::log(omega / (1.0 - omega));
        rep.logits.push_back(logit);
        if (logit <= 0.0)
            ++n_neg;
        if (sr_oos[winner] < sr_threshold)
            ++n_loss;
        rep.is_oos_pairs.emplace_back(sr_is[winner], sr_oos[winner]);
        pooled_oos.insert(pooled_oos.end(), sr_oos.begin(), sr_oos.end());
    }

    rep.pbo = static_cast<double>(n_neg) / static_cast<double>(masks.size());
    rep.prob_loss = static_cast<double>(n_loss) / static_cast<double>(masks.size());

    // OLS of OOS winner SR on IS winner SR.
    {
        double mx = 0.0, my = 0.0;
        for (const auto& [x, y] : rep.is_oos_pairs) {
            mx += x;
            my += y;
        }
        mx /= static_cast<double>(rep.is_oos_pairs.size());
        my /= static_cast<double>(rep.is_oos_pairs.size());
        double sxx = 0.0, sxy = 0.0;
        for (const auto& [x, y] : rep.is_oos_pairs) {
            sxx += (x - mx) * (x - mx);
            sxy += (x - mx) * (y - my);
        }
        if (sxx > 0.0) {
            rep.degradation.slope = sxy / sxx;
            rep.degradation.intercept = my - rep.degradation.slope * mx;
        } else {
            rep.degradation.slope = 0.0;
            rep.degradation.intercept = my;
            rep.flags.push_back("degradation fit degenerate: IS SR has zero spread");
        }
    }

    // Empirical CDFs of the winner's OOS SR vs the pooled OOS SR, plus
    // their running integrals for second-order comparison.
    {
        std::vector<double> opt;
        opt.reserve(rep.is_oos_pairs.size());
        for (const auto& [x, y] : rep.is_oos_pairs)
            opt.push_back(y);
        std::sort(opt.begin(), opt.end());
        std::sort(pooled_oos.begin(), pooled_oos.end());

        double lo = std::min(opt.front(), pooled_oos.front());
        double hi = std::max(opt.back(), pooled_oos.back());
        if (hi <= lo)
            hi = lo + 1.0;
        const int grid_n = 201;
        auto cdf_at = [](const std::vector<double>& sorted, double x) {
            return static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), x) -
                                       sorted.begin()) /
                   static_cast<double>(sorted.size());
        };
        DominanceGrid& dom = rep.dominance;
        dom.sr_grid.resize(grid_n);
        dom.cdf_optimized.resize(grid_n);
        dom.cdf_overall.resize(grid_n);
        dom.sd2_optimized.assign(grid_n, 0.0);
        dom.sd2_overall.assign(grid_n, 0.0);
        for (int i = 0; i < grid_n; ++i) {
            double x = lo + (hi - lo) * static_cast<double>(i) / (grid_n - 1);
            dom.sr_grid[static_cast<std::size_t>(i)] = x;
            dom.cdf_optimized[static_cast<std::size_t>(i)] = cdf_at(opt, x);
            dom.cdf_overall[static_cast<std::size_t>(i)] = cdf_at(pooled_oos, x);
        }
        double step = (hi - lo) / (grid_n - 1);
        for (int i = 1; i < grid_n; ++i) {
            dom.sd2_optimized[static_cast<std::size_t>(i)] =
                dom.sd2_optimized[static_cast<std::size_t>(i - 1)] +
                0.5 * step *
                    (dom.cdf_optimized[static_cast<std::size_t>(i)] +
                     dom.cdf_optimized[static_cast<std::size_t>(i - 1)]);
            dom.sd2_overall[static_cast<std::size_t>(i)] =
                dom.sd2_overall[static_cast<std::size_t>(i - 1)] +
                0.5 * step *
                    (dom.cdf_overall[static_cast<std::size_t>(i)] +
                     dom.cdf_overall[static_cast<std::size_t>(i - 1)]);
        }
    }
    return rep;
}

DsrResult dsr(const TrialMatrix& trials, double sr_observed, double t_obs, double skew,
              double kurt, std::uint64_t seed) {
    const auto n = static_cast<int>(trials.cols());
    if (n < 2)
        throw DataError("dsr: need at least 2 trial columns");

    DsrResult res;

    // Correlation-distance features: row i holds trial i's distances
    // sqrt(2 (1 - rho_ij)) to every trial.
    Eigen::VectorXd mean(n), sd(n);
    for (int c = 0; c < n; ++c) {
        mean(c) = trials.returns.col(c).mean();
        sd(c) = std::sqrt(population_variance(trials.returns.col(c)));
    }
    Eigen::MatrixXd dist(n, n);
    bool flagged_const = false;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b <= a; ++b) {
            double rho;
            if (a == b) {
                rho = 1.0;
            } else if (sd(a) > 0.0 && sd(b) > 0.0) {
                double cov = ((trials.returns.col(a).array() - mean(a)) *
                              (trials.returns.col(b).array() - mean(b)))
                                 .sum() /
                             static_cast<double>(trials.rows());
                rho = std::clamp(cov / (sd(a) * sd(b)), -1.0, 1.0);
            } else {
                rho = 0.0;
                if (!flagged_const) {
                    res.flags.push_back("constant trial column: correlation taken as 0");
                    flagged_const = true;
                }
            }
            double d = std::sqrt(std::max(0.0, 2.0 * (1.0 - rho)));
            dist(a, b) = d;
            dist(b, a) = d;
        }
    }

    if (dist.maxCoeff() < 1e-12) {
        // Every trial is the same strategy: no multiplicity to deflate for.
        res.k = 1;
        res.variance_cluster_sr = 0.0;
        res.sr_star = 0.0;
        res.assignment.assign(static_cast<std::size_t>(n), 0);
        res.cluster_sharpes = {series_sharpe(trials.returns.col(0))};
        res.flags.push_back("all trials identical; K=1, SR*=0 (degenerate)");
        res.dsr = psr(sr_observed, 0.0, t_obs, skew, kurt);
        return res;
    }

    // Silhouette-selected K over the allowed range (ties favour smaller K).
    const int k_max = std::min(n - 1, 25);
    int best_k = 2;
    double best_sil = -std::numeric_limits<double>::infinity();
    kmeans::Result best_clustering;
    for (int k = 2; k <= k_max; ++k) {
        kmeans::Result r = kmeans::cluster(dist, k, seed);
        double sil = kmeans::mean_silhouette(dist, r.assignment, k);
        if (sil > best_sil + 1e-12) {
            best_sil = sil;
            best_k = k;
            best_clustering = std::move(r);
        }
    }
    res.k = best_k;
    res.assignment = best_clustering.assignment;

    // Inverse-variance aggregate per cluster, then the Sharpe of each.
    res.cluster_sharpes.assign(static_cast<std::size_t>(best_k), 0.0);
    for (int c = 0; c < best_k; ++c) {
        Eigen::VectorXd agg = Eigen::VectorXd::Zero(trials.returns.rows());
        double wsum = 0.0;
        for (int j = 0; j < n; ++j) {
            if (res.assignment[static_cast<std::size_t>(j)] != c)
                continue;
            double var = sd(j) * sd(j);
            double w = 1.0 / std::max(var, 1e-18);
            agg += w * trials.returns.col(j);
            wsum += w;
        }
        if (wsum > 0.0)
            agg /= wsum;
        res.cluster_sharpes[static_cast<std::size_t>(c)] = series_sharpe(agg);
    }

    double m = 0.0;
    for (double s : res.cluster_sharpes)
        m += s;
    m /= static_cast<double>(best_k);
    double v = 0.0;
    for (double s : res.cluster_sharpes)
        v += (s - m) * (s - m);
    v /= static_cast<double>(best_k - 1);
    res.variance_cluster_sr = v;

    double kk = static_cast<double>(best_k);
    res.sr_star = std::sqrt(v) *
                  ((1.0 - kEulerMascheroni) * normal::quantile(1.0 - 1.0 / kk) +
                   kEulerMascheroni * normal::quantile(1.0 - 1.0 / (kk * std::exp(1.0))));
    res.dsr = psr(sr_observed, res.sr_star, t_obs, skew, kurt);
    return res;
}

AuditReport run_audit(const TrialMatrix& trials, const AuditParams& params) {
    if (trials.cols() < 2)
        throw DataError("audit: trial matrix needs at least 2 columns");
    AuditReport rep;
    rep.params = params;
    rep.t_obs = trials.rows();

    // Observed column: named, or the best full-sample Sharpe.
    int observed = 0;
    if (!params.observed_column.empty()) {
        auto it = std::find(trials.names.begin(), trials.names.end(), params.observed_column);
        if (it == trials.names.end())
            throw ConfigError("audit: no trial column named '" + params.observed_column + "'");
        observed = static_cast<int>(it - trials.names.begin());
    } else {
        double best = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < static_cast<int>(trials.cols()); ++c) {
            double s = series_sharpe(trials.returns.col(c));
            if (s > best) {
                best = s;
                observed = c;
            }
        }
    }
    rep.observed_column = observed;
    rep.observed_name = trials.names[static_cast<std::size_t>(observed)];
    rep.observed_sr = series_sharpe(trials.returns.col(observed));
    rep.observed_moments = series_moments(trials.returns.col(observed));

    // PSR cross-matrix over the benchmark columns.
    std::vector<int> bench;
    if (!params.psr_columns.empty()) {
        for (const auto& name : params.psr_columns) {
            auto it = std::find(trials.names.begin(), trials.names.end(), name);
            if (it == trials.names.end())
                throw ConfigError("audit: no trial column named '" + name + "'");
            bench.push_back(static_cast<int>(it - trials.names.begin()));
        }
    } else if (trials.cols() <= 16) {
        for (int c = 0; c < static_cast<int>(trials.cols()); ++c)
            bench.push_back(c);
    }
    rep.psr_matrix.resize(static_cast<Eigen::Index>(bench.size()),
                          static_cast<Eigen::Index>(bench.size()));
    for (std::size_t i = 0; i < bench.size(); ++i) {
        rep.psr_names.push_back(trials.names[static_cast<std::size_t>(bench[i])]);
        double sr_i = series_sharpe(trials.returns.col(bench[i]));
        SeriesMoments mom = series_moments(trials.returns.col(bench[i]));
        for (std::size_t j = 0; j < bench.size(); ++j) {
            double sr_j = series_sharpe(trials.returns.col(bench[j]));
            rep.psr_matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                psr(sr_i, sr_j, static_cast<double>(trials.rows()), mom.skew, mom.kurt);
        }
    }

    for (int b : bench) {
        double sr_b = series_sharpe(trials.returns.col(b));
        rep.min_trl_months.push_back(min_trl(rep.observed_sr, sr_b, rep.observed_moments.skew,
                                             rep.observed_moments.kurt, params.confidence));
    }

    rep.overfit = pbo_cscv(trials, params.partitions, params.sr_threshold);
    rep.deflated = dsr(trials, rep.observed_sr, static_cast<double>(trials.rows()),
                       rep.observed_moments.skew, rep.observed_moments.kurt, params.seed);
    return rep;
}

} // namespace hsfp::robust
