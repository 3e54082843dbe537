#include "core/io.hpp"

#include "core/csv.hpp"
#include "core/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace hsfp::io {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write file: " + path);
    return out;
}

json finite_or_null(double v) {
    if (std::isfinite(v))
        return v;
    return nullptr;
}

void dump_json(const json& j, const std::string& path) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

json stats_to_json(const backtest::SummaryStats& s) {
    json j;
    j["ann_return_log"] = finite_or_null(s.ann_return_log);
    j["ann_return_geometric"] = finite_or_null(s.ann_return_geometric);
    j["ann_volatility"] = finite_or_null(s.ann_vol);
    j["sharpe"] = finite_or_null(s.sharpe);
    j["max_drawdown"] = finite_or_null(s.max_drawdown);
    j["cvar_95"] = finite_or_null(s.cvar_95);
    j["avg_monthly_turnover"] = finite_or_null(s.avg_monthly_turnover);
    j["low_confidence"] = s.low_confidence;
    return j;
}

} // namespace

void write_probability_csv(const std::vector<Month>& months, const prob::ProbabilityVector& p,
                           const std::string& path) {
    if (months.size() != p.size())
        throw DataError("write_probability_csv: date/weight length mismatch");
    auto out = open_out(path);
    out << "date,weight\n";
    for (std::size_t t = 0; t < months.size(); ++t)
        out << csv::join_row({months[t].to_string(), csv::format_double(p.weights[t])});
}

void write_entropy_csv(const std::vector<Month>& months, const prob::ProbabilityVector& prior,
                       const entropy::EntropySolution& solution, const std::string& path) {
    if (months.size() != prior.size() || months.size() != solution.posterior.size())
        throw DataError("write_entropy_csv: length mismatch");
    auto out = open_out(path);
    out << "date,prior,posterior\n";
    for (std::size_t t = 0; t < months.size(); ++t)
        out << csv::join_row({months[t].to_string(), csv::format_double(prior.weights[t]),
                              csv::format_double(solution.posterior.weights[t])});
}

void write_entropy_json(const entropy::EntropySolution& solution, const std::string& path) {
    json j;
    j["kl_divergence"] = solution.kl_divergence;
    j["iterations"] = solution.iterations;
    j["converged"] = solution.converged;
    j["dual_variables"] = std::vector<double>(
        solution.dual_variables.data(),
        solution.dual_variables.data() + solution.dual_variables.size());
    j["flags"] = solution.flags;
    dump_json(j, path);
}

void write_ensemble_json(const std::vector<std::string>& variable_names,
                         const ensemble::EnsembleWeights& weights, const std::string& path) {
    json j;
    j["method"] = weights.method == ensemble::Method::DCC ? "DCC" : "EQ";
    j["fallback_eq"] = weights.fallback_eq;
    j["flags"] = weights.flags;
    json vars = json::array();
    for (std::size_t q = 0; q < weights.weights.size(); ++q) {
        json v;
        v["name"] = q < variable_names.size() ? variable_names[q] : ("var" + std::to_string(q));
        v["weight"] = weights.weights[q];
        if (q < weights.effective_scenarios.size())
            v["effective_scenarios"] = weights.effective_scenarios[q];
        if (q < weights.diversity.size())
            v["diversity"] = weights.diversity[q];
        vars.push_back(v);
    }
    j["variables"] = vars;
    dump_json(j, path);
}

void write_backtest_outputs(const backtest::BacktestResult& result, const std::string& dir) {
    std::filesystem::create_directories(dir);

    {
        auto out = open_out(dir + "/returns.csv");
        out << "date,gross,net\n";
        for (std::size_t t = 0; t < result.months.size(); ++t)
            out << csv::join_row({result.months[t].to_string(),
                                  csv::format_double(result.gross[t]),
                                  csv::format_double(result.net[t])});
    }
    {
        auto out = open_out(dir + "/weights.csv");
        std::vector<std::string> header = {"date"};
        for (const auto& a : result.asset_names)
            header.push_back(a);
        out << csv::join_row(header);
        for (std::size_t k = 0; k < result.rebalance_dates.size(); ++k) {
            std::vector<std::string> cells = {result.rebalance_dates[k].to_string()};
            for (Eigen::Index i = 0; i < result.weight_history[k].size(); ++i)
                cells.push_back(csv::format_double(result.weight_history[k](i)));
            out << csv::join_row(cells);
        }
    }

    if (result.diagnostics) {
        const auto& d = *result.diagnostics;
        auto out = open_out(dir + "/probabilities.csv");
        std::vector<std::string> header = {"date", "prior"};
        for (const auto& n : d.variable_names)
            header.push_back("posterior_" + n);
        header.push_back("ensemble");
        out << csv::join_row(header);
        for (std::size_t t = 0; t < d.grid.size(); ++t) {
            std::vector<std::string> cells = {d.grid[t].to_string(),
                                              csv::format_double(d.prior.weights[t])};
            for (const auto& post : d.posteriors)
                cells.push_back(csv::format_double(post.weights[t]));
            cells.push_back(csv::format_double(d.combined.weights[t]));
            out << csv::join_row(cells);
        }
        write_ensemble_json(d.variable_names, d.ensemble_weights, dir + "/ensemble.json");
    }
}

void write_report(const std::vector<const backtest::BacktestResult*>& results,
                  const std::string& dir) {
    if (results.empty())
        throw DataError("write_report: no results");
    std::filesystem::create_directories(dir);

    json j;
    j["seed"] = results.front()->config.seed;
    json models;
    for (const auto* r : results) {
        json m = stats_to_json(r->stats);
        m["months"] = r->months.size();
        m["rebalances"] = r->rebalance_dates.size();
        m["warnings"] = r->warnings;
        models[backtest::model_name(r->model)] = m;
    }
    j["models"] = models;
    dump_json(j, dir + "/stats.json");

    // Rolling 12-month net return of the lead model minus each benchmark.
    if (results.size() > 1) {
        const auto& lead = *results.front();
        auto out = open_out(dir + "/relative.csv");
        std::vector<std::string> header = {"date"};
        for (std::size_t b = 1; b < results.size(); ++b)
            header.push_back(backtest::model_name(lead.model) + "_minus_" +
                             backtest::model_name(results[b]->model));
        out << csv::join_row(header);

        auto rolling12 = [](const std::vector<double>& r, std::size_t t) {
            double acc = 0.0;
            for (std::size_t i = t + 1 - 12; i <= t; ++i)
                acc += r[i];
            return acc;
        };
        for (std::size_t t = 11; t < lead.months.size(); ++t) {
            std::vector<std::string> cells = {lead.months[t].to_string()};
            for (std::size_t b = 1; b < results.size(); ++b) {
                const auto& bench = *results[b];
                if (bench.months != lead.months)
                    throw DataError("write_report: model sample grids differ");
                cells.push_back(
                    csv::format_double(rolling12(lead.net, t) - rolling12(bench.net, t)));
            }
            out << csv::join_row(cells);
        }
    }
}

void write_trials(const robust::TrialMatrix& trials, const std::string& csv_path,
                  const std::string& sidecar_json_path) {
    {
        auto out = open_out(csv_path);
        std::vector<std::string> header = {"date"};
        for (const auto& n : trials.names)
            header.push_back(n);
        out << csv::join_row(header);
        for (std::size_t t = 0; t < trials.rows(); ++t) {
            std::vector<std::string> cells = {trials.months[t].to_string()};
            for (std::size_t c = 0; c < trials.cols(); ++c)
                cells.push_back(csv::format_double(
                    trials.returns(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c))));
            out << csv::join_row(cells);
        }
    }
    if (!sidecar_json_path.empty()) {
        json j;
        json cols = json::array();
        for (std::size_t c = 0; c < trials.names.size(); ++c) {
            json p;
            p["name"] = trials.names[c];
            if (c < trials.params.size()) {
                p["leeway"] = trials.params[c].leeway;
                p["rebalance_months"] = trials.params[c].rebalance_months;
                p["prior_half_life"] = trials.params[c].prior_half_life;
                p["fast_half_life"] = trials.params[c].fast_half_life;
                p["slow_half_life"] = trials.params[c].slow_half_life;
            }
            cols.push_back(p);
        }
        j["columns"] = cols;
        dump_json(j, sidecar_json_path);
    }
}

robust::TrialMatrix load_trials(const std::string& csv_path,
                                const std::string& sidecar_json_path) {
    csv::Table t = csv::read_table(csv_path);
    if (t.header.empty() || t.header[0] != "date")
        throw DataError(csv_path + ": first column must be 'date'");
    if (t.header.size() < 2)
        throw DataError(csv_path + ": no trial columns");

    robust::TrialMatrix trials;
    trials.names.assign(t.header.begin() + 1, t.header.end());
    trials.returns.resize(static_cast<Eigen::Index>(t.rows.size()),
                          static_cast<Eigen::Index>(trials.names.size()));
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (t.rows[r].size() != t.header.size())
            throw DataError(csv_path + ": ragged row " + std::to_string(r + 2));
        trials.months.push_back(Month::parse(t.rows[r][0]));
        for (std::size_t c = 0; c < trials.names.size(); ++c) {
            const std::string& cell = t.rows[r][c + 1];
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size())
                throw DataError(csv_path + ": bad value in column '" + trials.names[c] +
                                "' row " + std::to_string(r + 2));
            trials.returns(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
        }
    }

    if (!sidecar_json_path.empty()) {
        std::ifstream in(sidecar_json_path);
        if (!in)
            throw DataError("cannot open sidecar: " + sidecar_json_path);
        json j = json::parse(in, nullptr, true, true);
        if (j.contains("columns")) {
            for (const auto& p : j["columns"]) {
                robust::TrialParams tp;
                tp.leeway = p.value("leeway", tp.leeway);
                tp.rebalance_months = p.value("rebalance_months", tp.rebalance_months);
                tp.prior_half_life = p.value("prior_half_life", tp.prior_half_life);
                tp.fast_half_life = p.value("fast_half_life", tp.fast_half_life);
                tp.slow_half_life = p.value("slow_half_life", tp.slow_half_life);
                trials.params.push_back(tp);
            }
        }
    }
    return trials;
}

void write_audit_outputs(const robust::AuditReport& report, const std::string& dir) {
    std::filesystem::create_directories(dir);

    json j;
    j["seed"] = report.params.seed;
    j["observed_column"] = report.observed_name;
    j["observed_sr"] = report.observed_sr;
    j["observed_skew"] = report.observed_moments.skew;
    j["observed_kurtosis"] = report.observed_moments.kurt;
    j["t_observations"] = report.t_obs;
    j["pbo"] = report.overfit.pbo;
    j["n_combinations"] = report.overfit.n_combinations;
    j["degradation_slope"] = report.overfit.degradation.slope;
    j["degradation_intercept"] = report.overfit.degradation.intercept;
    j["prob_loss"] = report.overfit.prob_loss;
    j["sr_threshold"] = report.params.sr_threshold;
    j["dsr"] = report.deflated.dsr;
    j["k_clusters"] = report.deflated.k;
    j["sr_star"] = report.deflated.sr_star;
    j["cluster_sr_variance"] = report.deflated.variance_cluster_sr;
    j["overfit_flags"] = report.overfit.flags;
    j["dsr_flags"] = report.deflated.flags;
    if (!report.psr_names.empty()) {
        json m;
        json names = report.psr_names;
        m["columns"] = names;
        json rows = json::array();
        for (Eigen::Index i = 0; i < report.psr_matrix.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index k = 0; k < report.psr_matrix.cols(); ++k)
                row.push_back(report.psr_matrix(i, k));
            rows.push_back(row);
        }
        m["values"] = rows;
        j["psr_matrix"] = m;
        json mtrl = json::array();
        for (std::size_t i = 0; i < report.min_trl_months.size(); ++i) {
            json e;
            e["benchmark"] = report.psr_names[i];
            e["months"] = finite_or_null(report.min_trl_months[i]);
            mtrl.push_back(e);
        }
        j["min_trl"] = mtrl;
    }
    dump_json(j, dir + "/overfit.json");

    {
        auto out = open_out(dir + "/logits.csv");
        out << "combination,logit\n";
        for (std::size_t i = 0; i < report.overfit.logits.size(); ++i)
            out << csv::join_row(
                {std::to_string(i), csv::format_double(report.overfit.logits[i])});
    }
    {
        auto out = open_out(dir + "/degradation.csv");
        out << "sr_is,sr_oos\n";
        for (const auto& [is_sr, oos_sr] : report.overfit.is_oos_pairs)
            out << csv::join_row({csv::format_double(is_sr), csv::format_double(oos_sr)});
    }
    {
        const auto& d = report.overfit.dominance;
        auto out = open_out(dir + "/dominance.csv");
        out << "sr,cdf_optimized,cdf_overall,sd2_optimized,sd2_overall\n";
        for (std::size_t i = 0; i < d.sr_grid.size(); ++i)
            out << csv::join_row({csv::format_double(d.sr_grid[i]),
                                  csv::format_double(d.cdf_optimized[i]),
                                  csv::format_double(d.cdf_overall[i]),
                                  csv::format_double(d.sd2_optimized[i]),
                                  csv::format_double(d.sd2_overall[i])});
    }
}

} // namespace hsfp::io
