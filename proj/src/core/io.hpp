#pragma once

#include "core/backtest.hpp"
#include "core/entropy.hpp"
#include "core/robustness.hpp"

#include <string>
#include <vector>

namespace hsfp::io {

/// (date, weight) rows for figure data.
void write_probability_csv(const std::vector<Month>& months, const prob::ProbabilityVector& p,
                           const std::string& path);

/// (date, prior, posterior) rows plus a JSON summary (kl, iterations,
/// duals) for solver diagnostics.
void write_entropy_csv(const std::vector<Month>& months, const prob::ProbabilityVector& prior,
                       const entropy::EntropySolution& solution, const std::string& path);
void write_entropy_json(const entropy::EntropySolution& solution, const std::string& path);

void write_ensemble_json(const std::vector<std::string>& variable_names,
                         const ensemble::EnsembleWeights& weights, const std::string& path);

/// returns.csv (date, gross, net), weights.csv (date, per-asset),
/// and for HS-FP runs the final-rebalance conditioning figure data
/// (probabilities.csv, ensemble.json).
void write_backtest_outputs(const backtest::BacktestResult& result, const std::string& dir);

/// stats.json covering all models side by side, and relative.csv with the
/// rolling 12-month net return of the first model minus each of the rest.
void write_report(const std::vector<const backtest::BacktestResult*>& results,
                  const std::string& dir);

void write_trials(const robust::TrialMatrix& trials, const std::string& csv_path,
                  const std::string& sidecar_json_path);
robust::TrialMatrix load_trials(const std::string& csv_path,
                                const std::string& sidecar_json_path);

/// overfit.json, logits.csv, degradation.csv, dominance.csv.
void write_audit_outputs(const robust::AuditReport& report, const std::string& dir);

} // namespace hsfp::io
