// hsfp command line: walk-forward backtests, parameter sweeps and
// overfitting audits over the shared-library API.
//
// Exit codes: 0 success, 1 config error, 2 data error, 3 numerical failure.

#include "config.hpp"

#include <hsfp/hsfp.h>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace {

using hsfp_cli::ConfigFile;
using hsfp_cli::ConfigParseError;

struct PanelDeleter {
    void operator()(hsfp_panel* p) const { hsfp_panel_free(p); }
};
struct BacktestDeleter {
    void operator()(hsfp_backtest* p) const { hsfp_backtest_free(p); }
};
struct TrialsDeleter {
    void operator()(hsfp_trials* p) const { hsfp_trials_free(p); }
};
struct AuditDeleter {
    void operator()(hsfp_audit* p) const { hsfp_audit_free(p); }
};

using PanelPtr = std::unique_ptr<hsfp_panel, PanelDeleter>;
using BacktestPtr = std::unique_ptr<hsfp_backtest, BacktestDeleter>;
using TrialsPtr = std::unique_ptr<hsfp_trials, TrialsDeleter>;
using AuditPtr = std::unique_ptr<hsfp_audit, AuditDeleter>;

int fail(hsfp_status status) {
    std::fprintf(stderr, "hsfp: %s\n", hsfp_last_error());
    return static_cast<int>(status);
}

struct CommonOptions {
    std::string config_path;
    std::string out_dir = "out";
    double tc_bps = -1.0;   // <0: take from config
    int train_months = -1;  // <0: take from config
    long long seed = -1;    // <0: take from config
    int workers = -1;       // <0: take from config
};

struct SignalSetup {
    std::vector<std::string> names; // keeps the const char* in specs alive
    std::vector<hsfp_signal_spec> specs;
};

hsfp_backtest_config make_config(const ConfigFile& cfg, const CommonOptions& opt) {
    hsfp_backtest_config bc;
    hsfp_backtest_config_init(&bc);
    bc.train_months = cfg.get_int("backtest", "train_months", bc.train_months);
    bc.rebalance_months = cfg.get_int("backtest", "rebalance_months", bc.rebalance_months);
    bc.tc_bps = cfg.get_double("backtest", "tc_bps", bc.tc_bps);
    bc.leeway = cfg.get_double("backtest", "leeway", bc.leeway);
    bc.prior_half_life = cfg.get_double("backtest", "prior_half_life", bc.prior_half_life);
    bc.fast_half_life = cfg.get_double("backtest", "fast_half_life", bc.fast_half_life);
    bc.slow_half_life = cfg.get_double("backtest", "slow_half_life", bc.slow_half_life);
    bc.risk_free_rate = cfg.get_double("backtest", "risk_free_rate", bc.risk_free_rate);
    bc.frontier_points = cfg.get_int("backtest", "frontier_points", bc.frontier_points);
    bc.seed = static_cast<uint64_t>(cfg.get_int("backtest", "seed", 0));

    std::string comb = cfg.get("backtest", "combination", "DCC");
    if (comb == "DCC" || comb == "dcc")
        bc.combination = HSFP_COMBINE_DCC;
    else if (comb == "EQ" || comb == "eq")
        bc.combination = HSFP_COMBINE_EQ;
    else
        throw ConfigParseError("[backtest] combination must be EQ or DCC, got '" + comb + "'");

    if (opt.tc_bps >= 0.0)
        bc.tc_bps = opt.tc_bps;
    if (opt.train_months >= 0)
        bc.train_months = opt.train_months;
    if (opt.seed >= 0)
        bc.seed = static_cast<uint64_t>(opt.seed);
    return bc;
}

SignalSetup make_signals(const ConfigFile& cfg) {
    SignalSetup setup;
    for (const auto& section : cfg.sections()) {
        if (section.rfind("signal.", 0) != 0)
            continue;
        setup.names.push_back(section.substr(7));
    }
    setup.specs.reserve(setup.names.size());
    for (const auto& name : setup.names) {
        const std::string section = "signal." + name;
        hsfp_signal_spec spec{};
        spec.name = name.c_str();
        spec.quarterly = cfg.get_bool(section, "quarterly", false) ? 1 : 0;
        spec.lag_months = cfg.get_int(section, "lag_months", 0);
        spec.fast_half_life = cfg.get_double(section, "fast_half_life", 0.0);
        spec.slow_half_life = cfg.get_double(section, "slow_half_life", 0.0);
        setup.specs.push_back(spec);
    }
    return setup;
}

int load_data(const ConfigFile& cfg, PanelPtr& prices, PanelPtr& signals) {
    std::string price_path = cfg.resolve_path(cfg.require("data", "prices"));
    hsfp_panel* raw = nullptr;
    hsfp_status st = hsfp_panel_load_csv(price_path.c_str(), &raw);
    if (st != HSFP_OK)
        return fail(st);
    prices.reset(raw);

    if (cfg.has("data", "signals")) {
        std::string signal_path = cfg.resolve_path(cfg.get("data", "signals", ""));
        raw = nullptr;
        st = hsfp_panel_load_csv(signal_path.c_str(), &raw);
        if (st != HSFP_OK)
            return fail(st);
        signals.reset(raw);
    }
    return 0;
}

void print_model_summary(const char* label, const hsfp_backtest* bt) {
    double ret = 0, vol = 0, sharpe = 0, dd = 0;
    hsfp_backtest_stat(bt, "ann_return_log", &ret);
    hsfp_backtest_stat(bt, "ann_volatility", &vol);
    hsfp_backtest_stat(bt, "sharpe", &sharpe);
    hsfp_backtest_stat(bt, "max_drawdown", &dd);
    std::printf("%-6s ann return %6.2f%%  vol %6.2f%%  sharpe %5.2f  max dd %6.2f%%\n", label,
                100.0 * ret, 100.0 * vol, sharpe, 100.0 * dd);
}

int cmd_backtest(const CommonOptions& opt) {
    ConfigFile cfg = ConfigFile::parse_file(opt.config_path);
    PanelPtr prices, signals;
    if (int rc = load_data(cfg, prices, signals))
        return rc;

    SignalSetup sig = make_signals(cfg);
    hsfp_backtest_config bc = make_config(cfg, opt);

    struct ModelRun {
        hsfp_model model;
        const char* label;
        const char* subdir;
    };
    const ModelRun runs[] = {{HSFP_MODEL_HSFP, "HS-FP", "hsfp"},
                             {HSFP_MODEL_MVO, "MVO", "mvo"},
                             {HSFP_MODEL_EW, "EW", "ew"}};

    std::vector<BacktestPtr> results;
    std::vector<const hsfp_backtest*> handles;
    for (const auto& run : runs) {
        hsfp_backtest_config model_cfg = bc;
        model_cfg.model = run.model;
        hsfp_backtest* bt = nullptr;
        hsfp_status st = hsfp_backtest_run(prices.get(), signals.get(), sig.specs.data(),
                                           sig.specs.size(), &model_cfg, &bt);
        if (st != HSFP_OK)
            return fail(st);
        results.emplace_back(bt);
        handles.push_back(bt);

        std::string dir = opt.out_dir + "/" + run.subdir;
        st = hsfp_backtest_write_outputs(bt, dir.c_str());
        if (st != HSFP_OK)
            return fail(st);
        print_model_summary(run.label, bt);
    }

    hsfp_status st = hsfp_report_write(handles.data(), handles.size(), opt.out_dir.c_str());
    if (st != HSFP_OK)
        return fail(st);
    std::printf("wrote %s/stats.json\n", opt.out_dir.c_str());
    return 0;
}

int cmd_sweep(const CommonOptions& opt, int mesh_cap_flag) {
    ConfigFile cfg = ConfigFile::parse_file(opt.config_path);
    PanelPtr prices, signals;
    if (int rc = load_data(cfg, prices, signals))
        return rc;
    if (!signals) {
        std::fprintf(stderr, "hsfp: sweep needs a signals file in [data]\n");
        return 1;
    }

    SignalSetup sig = make_signals(cfg);
    hsfp_backtest_config bc = make_config(cfg, opt);
    bc.model = HSFP_MODEL_HSFP;

    std::vector<double> leeway = cfg.get_double_list("sweep", "leeway", {bc.leeway});
    std::vector<int> rebalance =
        cfg.get_int_list("sweep", "rebalance_months", {bc.rebalance_months});
    std::vector<double> prior =
        cfg.get_double_list("sweep", "prior_half_life", {bc.prior_half_life});
    std::vector<double> fast =
        cfg.get_double_list("sweep", "fast_half_life", {bc.fast_half_life});
    std::vector<double> slow =
        cfg.get_double_list("sweep", "slow_half_life", {bc.slow_half_life});

    hsfp_mesh_spec mesh{};
    mesh.leeway = leeway.data();
    mesh.n_leeway = leeway.size();
    mesh.rebalance_months = rebalance.data();
    mesh.n_rebalance = rebalance.size();
    mesh.prior_half_life = prior.data();
    mesh.n_prior = prior.size();
    mesh.fast_half_life = fast.data();
    mesh.n_fast = fast.size();
    mesh.slow_half_life = slow.data();
    mesh.n_slow = slow.size();

    size_t declared = hsfp_mesh_size(&mesh);
    std::printf("sweep: mesh declares %zu configurations\n", declared);

    int mesh_cap = mesh_cap_flag > 0 ? mesh_cap_flag : cfg.get_int("sweep", "mesh_cap", 64);
    if (declared > static_cast<size_t>(mesh_cap)) {
        std::fprintf(stderr,
                     "hsfp: mesh size %zu exceeds cap %d; pass --mesh-cap %zu to run anyway\n",
                     declared, mesh_cap, declared);
        return 1;
    }

    int workers = opt.workers > 0 ? opt.workers : cfg.get_int("backtest", "workers", 1);
    hsfp_trials* trials = nullptr;
    hsfp_status st = hsfp_sweep_run(prices.get(), signals.get(), sig.specs.data(),
                                    sig.specs.size(), &bc, &mesh, workers, &trials);
    if (st != HSFP_OK)
        return fail(st);
    TrialsPtr guard(trials);

    std::filesystem::create_directories(opt.out_dir);
    std::string csv_path = opt.out_dir + "/trials.csv";
    std::string sidecar = opt.out_dir + "/trials_params.json";
    st = hsfp_trials_write(trials, csv_path.c_str(), sidecar.c_str());
    if (st != HSFP_OK)
        return fail(st);
    std::printf("wrote %s (%zu rows x %zu columns)\n", csv_path.c_str(),
                hsfp_trials_rows(trials), hsfp_trials_cols(trials));
    return 0;
}

int cmd_audit(const CommonOptions& opt, const std::string& trials_path,
              const std::string& sidecar_path) {
    hsfp_audit_params params;
    hsfp_audit_params_init(&params);
    std::string observed, psr_cols;
    if (!opt.config_path.empty()) {
        ConfigFile cfg = ConfigFile::parse_file(opt.config_path);
        params.partitions = cfg.get_int("audit", "partitions", params.partitions);
        params.sr_threshold = cfg.get_double("audit", "sr_threshold", params.sr_threshold);
        params.confidence = cfg.get_double("audit", "confidence", params.confidence);
        observed = cfg.get("audit", "observed_column", "");
        psr_cols = cfg.get("audit", "psr_columns", "");
        params.seed = static_cast<uint64_t>(cfg.get_int("backtest", "seed", 0));
    }
    if (opt.seed >= 0)
        params.seed = static_cast<uint64_t>(opt.seed);
    if (!observed.empty())
        params.observed_column = observed.c_str();
    if (!psr_cols.empty())
        params.psr_columns = psr_cols.c_str();

    hsfp_trials* trials = nullptr;
    hsfp_status st = hsfp_trials_load(trials_path.c_str(),
                                      sidecar_path.empty() ? nullptr : sidecar_path.c_str(),
                                      &trials);
    if (st != HSFP_OK)
        return fail(st);
    TrialsPtr guard(trials);

    hsfp_audit* audit = nullptr;
    st = hsfp_audit_run(trials, &params, &audit);
    if (st != HSFP_OK)
        return fail(st);
    AuditPtr audit_guard(audit);

    st = hsfp_audit_write(audit, opt.out_dir.c_str());
    if (st != HSFP_OK)
        return fail(st);

    double pbo = 0, dsr = 0, k = 0, sr_star = 0, observed_sr = 0;
    hsfp_audit_stat(audit, "pbo", &pbo);
    hsfp_audit_stat(audit, "dsr", &dsr);
    hsfp_audit_stat(audit, "k_clusters", &k);
    hsfp_audit_stat(audit, "sr_star", &sr_star);
    hsfp_audit_stat(audit, "observed_sr", &observed_sr);
    std::printf("PBO %.4f  observed SR %.4f  K %.0f  SR* %.4f  DSR %.4f\n", pbo, observed_sr,
                k, sr_star, dsr);
    std::printf("wrote %s/overfit.json\n", opt.out_dir.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hsfp — systematic asset allocation with flexible probabilities"};
    app.require_subcommand(1);

    CommonOptions opt;
    int mesh_cap = 0;
    std::string trials_path, sidecar_path;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", opt.config_path, "run configuration file");
        if (config_required)
            c->required();
        sub->add_option("--out", opt.out_dir, "output directory (default: out)");
        sub->add_option("--seed", opt.seed, "seed for all randomized procedures");
    };

    CLI::App* backtest = app.add_subcommand("backtest", "run HS-FP, MVO and EW backtests");
    add_common(backtest, true);
    backtest->add_option("--tc-bps", opt.tc_bps, "transaction cost in bps per unit turnover");
    backtest->add_option("--train-months", opt.train_months, "initial training window");

    CLI::App* sweep = app.add_subcommand("sweep", "backtest a parameter mesh");
    add_common(sweep, true);
    sweep->add_option("--tc-bps", opt.tc_bps, "transaction cost in bps per unit turnover");
    sweep->add_option("--train-months", opt.train_months, "initial training window");
    sweep->add_option("--workers", opt.workers, "parallel backtests (default: 1)");
    sweep->add_option("--mesh-cap", mesh_cap, "largest mesh size to run");

    CLI::App* audit = app.add_subcommand("audit", "overfitting statistics on a trial matrix");
    add_common(audit, false);
    audit->add_option("trials", trials_path, "trial matrix CSV")->required();
    audit->add_option("--sidecar", sidecar_path, "per-column parameter JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (backtest->parsed())
            return cmd_backtest(opt);
        if (sweep->parsed())
            return cmd_sweep(opt, mesh_cap);
        if (audit->parsed())
            return cmd_audit(opt, trials_path, sidecar_path);
    } catch (const ConfigParseError& e) {
        std::fprintf(stderr, "hsfp: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "hsfp: %s\n", e.what());
        return 3;
    }
    return 0;
}
