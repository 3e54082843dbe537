// Drives the installed binary end to end: exit codes, output files, and
// the cost-monotonicity of reported statistics.

#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

std::string fixture(const char* name) {
    return std::string(HSFP_FIXTURE_DIR) + "/" + name;
}

fs::path work_dir() {
    auto dir = fs::temp_directory_path() / "hsfp_cli_test";
    fs::create_directories(dir);
    return dir;
}

int run(const std::string& args, const fs::path& stdout_file, const fs::path& stderr_file) {
    std::string cmd = std::string(HSFP_CLI_PATH) + " " + args + " >" + stdout_file.string() +
                      " 2>" + stderr_file.string();
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_config(const fs::path& path, const std::string& extra = "") {
    std::ofstream out(path);
    out << "[data]\n"
        << "prices = " << fixture("prices.csv") << "\n"
        << "signals = " << fixture("signals.csv") << "\n\n"
        << "[signal.cpi]\n"
        << "lag_months = 1\n\n"
        << "[signal.gdp]\n"
        << "quarterly = true\n"
        << "lag_months = 3\n\n"
        << "[backtest]\n"
        << "train_months = 60\n"
        << "rebalance_months = 6\n"
        << extra;
}

} // namespace

TEST_CASE("backtest command writes the full report tree") {
    auto dir = work_dir();
    auto cfg = dir / "run.ini";
    write_config(cfg);
    auto out = dir / "bt";
    fs::remove_all(out);

    int rc = run("backtest --config " + cfg.string() + " --out " + out.string(),
                 dir / "stdout.txt", dir / "stderr.txt");
    REQUIRE(rc == 0);

    for (const char* f :
         {"stats.json", "relative.csv", "hsfp/returns.csv", "hsfp/weights.csv",
          "hsfp/probabilities.csv", "hsfp/ensemble.json", "mvo/returns.csv", "ew/returns.csv"})
        CHECK(fs::exists(out / f));

    auto stats = nlohmann::json::parse(slurp(out / "stats.json"));
    for (const char* model : {"HS-FP", "MVO", "EW"}) {
        REQUIRE(stats["models"].contains(model));
        for (const char* key :
             {"ann_return_log", "ann_return_geometric", "ann_volatility", "sharpe",
              "max_drawdown", "cvar_95", "avg_monthly_turnover"})
            CHECK(stats["models"][model].contains(key));
    }
}

TEST_CASE("missing price file names the path and exits with the data code") {
    auto dir = work_dir();
    auto cfg = dir / "missing.ini";
    {
        std::ofstream out(cfg);
        out << "[data]\nprices = /definitely/not/here.csv\n";
    }
    int rc = run("backtest --config " + cfg.string() + " --out " + (dir / "x").string(),
                 dir / "stdout.txt", dir / "stderr.txt");
    CHECK(rc == 2);
    CHECK(slurp(dir / "stderr.txt").find("/definitely/not/here.csv") != std::string::npos);
}

TEST_CASE("malformed config exits with the config code") {
    auto dir = work_dir();
    auto cfg = dir / "broken.ini";
    {
        std::ofstream out(cfg);
        out << "[backtest\ntrain_months = 60\n";
    }
    int rc = run("backtest --config " + cfg.string(), dir / "stdout.txt", dir / "stderr.txt");
    CHECK(rc == 1);
}

TEST_CASE("net sharpe never improves when costs rise") {
    auto dir = work_dir();
    auto cfg = dir / "run.ini";
    write_config(cfg);

    double last_sharpe = 1e300;
    for (const char* bps : {"0", "50"}) {
        auto out = dir / (std::string("tc") + bps);
        fs::remove_all(out);
        int rc = run("backtest --config " + cfg.string() + " --out " + out.string() +
                         " --tc-bps " + bps,
                     dir / "stdout.txt", dir / "stderr.txt");
        REQUIRE(rc == 0);
        auto stats = nlohmann::json::parse(slurp(out / "stats.json"));
        double sharpe = stats["models"]["HS-FP"]["sharpe"].get<double>();
        CHECK(sharpe <= last_sharpe + 1e-12);
        last_sharpe = sharpe;
    }
}

TEST_CASE("sweep declares the mesh, honours the cap, and feeds audit") {
    auto dir = work_dir();
    auto cfg = dir / "sweep.ini";
    write_config(cfg, "\n[sweep]\nleeway = 0.1,0.3\nrebalance_months = 3,6\nmesh_cap = 64\n");

    auto out = dir / "sweep_out";
    fs::remove_all(out);
    int rc = run("sweep --config " + cfg.string() + " --out " + out.string(),
                 dir / "stdout.txt", dir / "stderr.txt");
    REQUIRE(rc == 0);
    CHECK(slurp(dir / "stdout.txt").find("declares 4 configurations") != std::string::npos);
    REQUIRE(fs::exists(out / "trials.csv"));
    REQUIRE(fs::exists(out / "trials_params.json"));

    // A mesh above the cap is refused with advice.
    auto big_cfg = dir / "big.ini";
    write_config(big_cfg,
                 "\n[sweep]\nleeway = 0.1,0.2,0.3\nrebalance_months = "
                 "1,2,3,4,5,6,7,8,9,10,11,12\nprior_half_life = 60,72,84,96\nfast_half_life = "
                 "3,6,9,12\nslow_half_life = 12,18,24,36\nmesh_cap = 64\n");
    rc = run("sweep --config " + big_cfg.string() + " --out " + (dir / "big_out").string(),
             dir / "stdout.txt", dir / "stderr.txt");
    CHECK(rc == 1);
    CHECK(slurp(dir / "stdout.txt").find("declares 2304 configurations") != std::string::npos);
    CHECK(slurp(dir / "stderr.txt").find("--mesh-cap") != std::string::npos);

    // Audit the mini sweep.
    auto audit_out = dir / "audit_out";
    fs::remove_all(audit_out);
    rc = run("audit " + (out / "trials.csv").string() + " --sidecar " +
                 (out / "trials_params.json").string() + " --config " + cfg.string() +
                 " --out " + audit_out.string(),
             dir / "stdout.txt", dir / "stderr.txt");
    REQUIRE(rc == 0);
    for (const char* f : {"overfit.json", "logits.csv", "degradation.csv", "dominance.csv"})
        CHECK(fs::exists(audit_out / f));

    auto overfit = nlohmann::json::parse(slurp(audit_out / "overfit.json"));
    CHECK(overfit.contains("pbo"));
    CHECK(overfit.contains("dsr"));
    CHECK(overfit.contains("k_clusters"));
    CHECK(overfit.contains("sr_star"));

    // The single-column degenerate case is declined cleanly.
    auto single = dir / "single.csv";
    {
        std::ofstream s(single);
        s << "date,only\n";
        for (int t = 0; t < 40; ++t) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "20%02d-0%d-01", 10 + t / 9, 1 + t % 9);
            s << buf << "," << (t % 2 ? 0.01 : -0.008) << "\n";
        }
    }
    rc = run("audit " + single.string() + " --out " + (dir / "single_out").string(),
             dir / "stdout.txt", dir / "stderr.txt");
    CHECK(rc == 2);
}

TEST_CASE("byte-identical outputs for identical runs") {
    auto dir = work_dir();
    auto cfg = dir / "run.ini";
    write_config(cfg);
    auto out1 = dir / "det1";
    auto out2 = dir / "det2";
    fs::remove_all(out1);
    fs::remove_all(out2);
    REQUIRE(run("backtest --config " + cfg.string() + " --out " + out1.string(),
                dir / "stdout.txt", dir / "stderr.txt") == 0);
    REQUIRE(run("backtest --config " + cfg.string() + " --out " + out2.string(),
                dir / "stdout.txt", dir / "stderr.txt") == 0);
    for (const char* f : {"stats.json", "relative.csv", "hsfp/returns.csv", "hsfp/weights.csv"})
        CHECK(slurp(out1 / f) == slurp(out2 / f));
}
