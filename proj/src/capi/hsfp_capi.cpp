#include "hsfp/hsfp.h"

#include "core/backtest.hpp"
#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/io.hpp"
#include "core/robustness.hpp"
#include "core/series.hpp"
#include "core/sweep.hpp"

#include <cmath>
#include <cstring>
#include <string>

struct hsfp_panel {
    hsfp::TimeSeriesPanel panel;
};

struct hsfp_backtest {
    hsfp::backtest::BacktestResult result;
};

struct hsfp_trials {
    hsfp::robust::TrialMatrix trials;
};

struct hsfp_audit {
    hsfp::robust::AuditReport report;
};

namespace {

thread_local std::string g_last_error;

hsfp_status set_error(hsfp_status code, const char* what) {
    g_last_error = what ? what : "unknown error";
    return code;
}

template <typename Fn>
hsfp_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return HSFP_OK;
    } catch (const hsfp::ConfigError& e) {
        return set_error(HSFP_ERR_CONFIG, e.what());
    } catch (const hsfp::DataError& e) {
        return set_error(HSFP_ERR_DATA, e.what());
    } catch (const hsfp::NumericError& e) {
        return set_error(HSFP_ERR_NUMERIC, e.what());
    } catch (const std::exception& e) {
        return set_error(HSFP_ERR_NUMERIC, e.what());
    }
}

hsfp::backtest::BacktestConfig to_core(const hsfp_backtest_config& cfg) {
    hsfp::backtest::BacktestConfig out;
    out.train_months = cfg.train_months;
    out.rebalance_months = cfg.rebalance_months;
    out.tc_bps = cfg.tc_bps;
    out.leeway = cfg.leeway;
    out.prior_half_life = cfg.prior_half_life;
    out.fast_half_life = cfg.fast_half_life;
    out.slow_half_life = cfg.slow_half_life;
    out.combination = cfg.combination == HSFP_COMBINE_EQ ? hsfp::ensemble::Method::EQ
                                                         : hsfp::ensemble::Method::DCC;
    switch (cfg.model) {
    case HSFP_MODEL_MVO:
        out.model = hsfp::backtest::Model::MVO;
        break;
    case HSFP_MODEL_EW:
        out.model = hsfp::backtest::Model::EW;
        break;
    default:
        out.model = hsfp::backtest::Model::HSFP;
        break;
    }
    out.risk_free_rate = cfg.risk_free_rate;
    out.frontier_points = cfg.frontier_points;
    out.seed = cfg.seed;
    return out;
}

std::vector<hsfp::backtest::SignalSpec> to_core(const hsfp_signal_spec* specs, size_t n) {
    std::vector<hsfp::backtest::SignalSpec> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        hsfp::backtest::SignalSpec s;
        if (!specs[i].name)
            throw hsfp::ConfigError("signal spec " + std::to_string(i) + " has no name");
        s.name = specs[i].name;
        s.quarterly = specs[i].quarterly != 0;
        s.lag_months = specs[i].lag_months;
        s.fast_half_life = specs[i].fast_half_life;
        s.slow_half_life = specs[i].slow_half_life;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<std::string> split_list(const char* csv) {
    std::vector<std::string> out;
    if (!csv)
        return out;
    std::string s(csv);
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t comma = s.find(',', pos);
        if (comma == std::string::npos)
            comma = s.size();
        std::string item = s.substr(pos, comma - pos);
        std::size_t a = item.find_first_not_of(" \t");
        std::size_t b = item.find_last_not_of(" \t");
        if (a != std::string::npos)
            out.push_back(item.substr(a, b - a + 1));
        pos = comma + 1;
    }
    return out;
}

} // namespace

extern "C" {

const char* hsfp_version(void) {
    return "0.1.0";
}

const char* hsfp_last_error(void) {
    return g_last_error.c_str();
}

hsfp_status hsfp_panel_load_csv(const char* path, hsfp_panel** out) {
    if (!path || !out)
        return set_error(HSFP_ERR_CONFIG, "null argument");
    return guarded([&] { *out = new hsfp_panel{hsfp::csv::load_panel(path)}; });
}

hsfp_status hsfp_panel_write_csv(const hsfp_panel* panel, const char* path) {
    if (!panel || !path)
        return set_error(HSFP_ERR_CONFIG, "null argument");
    return guarded([&] { hsfp::csv::write_panel(panel->panel, path); });
}

size_t hsfp_panel_rows(const hsfp_panel* panel) {
    return panel ? panel->panel.rows() : 0;
}

size_t hsfp_panel_cols(const hsfp_panel* panel) {
    return panel ? panel->panel.cols() : 0;
}

const char* hsfp_panel_column_name(const hsfp_panel* panel, size_t index) {
    if (!panel || index >= panel->panel.cols())
        return nullptr;
    return panel->panel.names()[index].c_str();
}

void hsfp_panel_free(hsfp_panel* panel) {
    delete panel;
}

void hsfp_backtest_config_init(hsfp_backtest_config* cfg) {
    if (!cfg)
        return;
    cfg->train_months = 60;
    cfg->rebalance_months = 6;
    cfg->tc_bps = 0.0;
    cfg->leeway = 0.1;
    cfg->prior_half_life = 60.0;
    cfg->fast_half_life = 3.0;
    cfg->slow_half_life = 12.0;
    cfg->combination = HSFP_COMBINE_DCC;
    cfg->model = HSFP_MODEL_HSFP;
    cfg->risk_free_rate = 0.0725;
    cfg->frontier_points = 100;
    cfg->seed = 0;
}

hsfp_status hsfp_backtest_run(const hsfp_panel* prices, const hsfp_panel* signals,
                              const hsfp_signal_spec* specs, size_t n_specs,
                              const hsfp_backtest_config* cfg, hsfp_backtest** out) {
    if (!prices || !cfg || !out || (n_specs > 0 && !specs))
        return set_error(HSFP_ERR_CONFIG, "null argument");
    return guarded([&] {
        static const hsfp::TimeSeriesPanel empty_signals;
        const hsfp::TimeSeriesPanel& sig = signals ? signals->panel : empty_signals;
        *out = new hsfp_backtest{hsfp::backtest::run_backtest(
            prices->panel, sig, to_core(specs, n_specs), to_core(*cfg))};
    });
}

size_t hsfp_backtest_months(const hsfp_backtest* bt) {
    return bt ? bt->result.months.size() : 0;
}

size_t hsfp_backtest_returns(const hsfp_backtest* bt, double* gross, double* net,
                             size_t capacity) {
    if (!bt)
        return 0;
    const auto& r = bt->result;
    size_t n = std::min(capacity, r.months.size());
    for (size_t i = 0; i < n; ++i) {
        if (gross)
            gross[i] = r.gross[i];
        if (net)
            net[i] = r.net[i];
    }
    return r.months.size();
}

hsfp_status hsfp_backtest_stat(const hsfp_backtest* bt, const char* key, double* out) {
    if (!bt || !key || !out)
        return set_error(HSFP_ERR_CONFIG, "null argument");
    const auto& s = bt->result.stats;
    const std::string k(key);
    if (k == "ann_return_log")
        *out = s.ann_return_log;
    else if (k == "ann_return_geometric")
        *out = s.ann_return_geometric;
    else if (k == "ann_volatility")
        *out = s.ann_vol;
    else if (k == "sharpe")
        *out = s.sharpe;
    else if (k == "max_drawdown")
        *out = s.max_drawdown;
    else if (k == "cvar_95")
        *out = s.cvar_95;
    else if (k == "avg_monthly_turnover")
        *out = s.avg_monthly_turnover;
    else
        return set_error(HSFP_ERR_CONFIG, ("unknown statistic key: " + k).c_str());
    g_last_error.clear();
    return HSFP_OK;
}

hsfp_status hsfp_backtest_write_outputs(const hsfp_backtest* bt, const char* dir) {
    if (!bt || !dir)
        return set_error(HSFP_ERR_CONFIG, "null argument");
    return guarded([&] { hsfp::io::write_backtest_outputs(bt->result, dir); });
}

hsfp_status hsfp_report_write(const hsfp_backtest* const* bts, size_t n, const char* dir) {
    if (!bts || n == 0 || !dir)
        return set_error(HSFP_ERR_CONFIG, "null argument");
    return guarded([&] {
        std::vector<const hsfp::backtest::BacktestResult*> results;
        results.reserve(n);
        for (size_t i = 0; i < n; ++i) {
            if (!bts[i])
                throw hsfp::ConfigError("null backtest handle in report list");
            results.push_back(&bts[i]->result);
        }
        hsfp::io::write_report(results, dir);
    });
}

void hsfp_backtest_free(hsfp_backtest* bt) {
    delete bt;
}

size_t hsfp_mesh_size(const hsfp_mesh_spec* mesh) {
    if (!mesh)
        return 0;
    return mesh->n_leeway * mesh->n_rebalance * mesh->n_prior * mesh->n_fast * mesh->n_slow;
}

hsfp_status hsfp_sweep_run(const hsfp_panel* prices, const hsfp_panel* signals,
                           const hsfp_signal_spec* specs, size_t n_specs,
                           const hsfp_backtest_config* base, const hsfp_mesh_spec* mesh,
                           int workers, hsfp_trials** out) {
    if (!prices || !signals || !base || !mesh || !out || (n_specs > 0 && !specs))
        return set_error(HSFP_ERR_CONFIG, "null argument");
    return guarded([&] {
        hsfp::sweep::MeshSpec m;
        m.leeway.assign(mesh->leeway, mesh->leeway + mesh->n_leeway);
        m.rebalance_months.assign(mesh->rebalance_months,
                                  mesh->rebalance_months + mesh->n_rebalance);
        m.prior_half_life.assign(mesh->prior_half_life,
                                 mesh->prior_half_life + mesh->n_prior);
        m.fast_half_life.assign(mesh->fast_half_life, mesh->fast_half_life + mesh->n_fast);
        m.slow_half_life.assign(mesh->slow_half_life, mesh->slow_half_life + mesh->n_slow);
        *out = new hsfp_trials{hsfp::sweep::run_sweep(prices->panel, signals->panel,
                                                      to_core(specs, n_specs), to_core(*base),
                                                      m, workers)};
    });
}

hsfp_status hsfp_trials_write(const hsfp_trials* trials, const char* csv_path,
                              const char* sidecar_json_path) {
    if (!trials || !csv_path)
        return set_error(HSFP_ERR_CONFIG, "null argument");
    return guarded([&] {
        hsfp::io::write_trials(trials->trials, csv_path,
                               sidecar_json_path ? sidecar_json_path : "");
    });
}

hsfp_status hsfp_trials_load(const char* csv_path, const char* sidecar_json_path,
                             hsfp_trials** out) {
    if (!csv_path || !out)
        return set_error(HSFP_ERR_CONFIG, "null argument");
    return guarded([&] {
        *out = new hsfp_trials{
            hsfp::io::load_trials(csv_path, sidecar_json_path ? sidecar_json_path : "")};
    });
}

size_t hsfp_trials_rows(const hsfp_trials* trials) {
    return trials ? trials->trials.rows() : 0;
}

size_t hsfp_trials_cols(const hsfp_trials* trials) {
    return trials ? trials->trials.cols() : 0;
}

size_t hsfp_trials_column(const hsfp_trials* trials, size_t index, double* out,
                          size_t capacity) {
    if (!trials || index >= trials->trials.cols())
        return 0;
    size_t n = std::min(capacity, trials->trials.rows());
    if (out)
        for (size_t t = 0; t < n; ++t)
            out[t] = trials->trials.returns(static_cast<Eigen::Index>(t),
                                            static_cast<Eigen::Index>(index));
    return trials->trials.rows();
}

void hsfp_trials_free(hsfp_trials* trials) {
    delete trials;
}

void hsfp_audit_params_init(hsfp_audit_params* params) {
    if (!params)
        return;
    params->partitions = 16;
    params->sr_threshold = 0.0;
    params->confidence = 0.95;
    params->observed_column = nullptr;
    params->psr_columns = nullptr;
    params->seed = 0;
}

hsfp_status hsfp_audit_run(const hsfp_trials* trials, const hsfp_audit_params* params,
                           hsfp_audit** out) {
    if (!trials || !params || !out)
        return set_error(HSFP_ERR_CONFIG, "null argument");
    return guarded([&] {
        hsfp::robust::AuditParams p;
        p.partitions = params->partitions;
        p.sr_threshold = params->sr_threshold;
        p.confidence = params->confidence;
        if (params->observed_column)
            p.observed_column = params->observed_column;
        p.psr_columns = split_list(params->psr_columns);
        p.seed = params->seed;
        *out = new hsfp_audit{hsfp::robust::run_audit(trials->trials, p)};
    });
}

hsfp_status hsfp_audit_stat(const hsfp_audit* audit, const char* key, double* out) {
    if (!audit || !key || !out)
        return set_error(HSFP_ERR_CONFIG, "null argument");
    const auto& r = audit->report;
    const std::string k(key);
    if (k == "pbo")
        *out = r.overfit.pbo;
    else if (k == "prob_loss")
        *out = r.overfit.prob_loss;
    else if (k == "degradation_slope")
        *out = r.overfit.degradation.slope;
    else if (k == "degradation_intercept")
        *out = r.overfit.degradation.intercept;
    else if (k == "dsr")
        *out = r.deflated.dsr;
    else if (k == "k_clusters")
        *out = static_cast<double>(r.deflated.k);
    else if (k == "sr_star")
        *out = r.deflated.sr_star;
    else if (k == "observed_sr")
        *out = r.observed_sr;
    else if (k == "logit_count")
        *out = static_cast<double>(r.overfit.logits.size());
    else
        return set_error(HSFP_ERR_CONFIG, ("unknown audit key: " + k).c_str());
    g_last_error.clear();
    return HSFP_OK;
}

hsfp_status hsfp_audit_write(const hsfp_audit* audit, const char* dir) {
    if (!audit || !dir)
        return set_error(HSFP_ERR_CONFIG, "null argument");
    return guarded([&] { hsfp::io::write_audit_outputs(audit->report, dir); });
}

void hsfp_audit_free(hsfp_audit* audit) {
    delete audit;
}

hsfp_status hsfp_psr(double sr_observed, double sr_benchmark, double t_observations,
                     double skew, double kurtosis, double* out) {
    if (!out)
        return set_error(HSFP_ERR_CONFIG, "null argument");
    return guarded([&] {
        *out = hsfp::robust::psr(sr_observed, sr_benchmark, t_observations, skew, kurtosis);
    });
}

hsfp_status hsfp_min_trl(double sr_observed, double sr_benchmark, double skew,
                         double kurtosis, double confidence, double* out) {
    if (!out)
        return set_error(HSFP_ERR_CONFIG, "null argument");
    return guarded([&] {
        *out = hsfp::robust::min_trl(sr_observed, sr_benchmark, skew, kurtosis, confidence);
    });
}

} // extern "C"
