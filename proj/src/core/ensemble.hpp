#pragma once

#include "core/flexprob.hpp"

#include <string>
#include <vector>

namespace hsfp::ensemble {

enum class Method { EQ, DCC };

/// Per-state-variable combination weights plus the diagnostics behind
/// them: effective scenarios T_q and diversity D_q (mean Hellinger
/// distance to the other vectors).
struct EnsembleWeights {
    std::vector<double> weights;
    Method method = Method::EQ;
    std::vector<double> effective_scenarios;
    std::vector<double> diversity;
    bool fallback_eq = false;
    std::vector<std::string> flags;
};

struct CombineResult {
    prob::ProbabilityVector combined;
    EnsembleWeights weights;
};

/// Elementwise average with weights 1/q.
CombineResult combine_eq(const std::vector<prob::ProbabilityVector>& vectors);

/// sum_t sqrt(p_t r_t), in [0, 1]; 1 iff the vectors coincide.
double bhattacharyya(const prob::ProbabilityVector& p, const prob::ProbabilityVector& r);

/// sqrt(1 - bhattacharyya), clamped against negative rounding.
double hellinger(const prob::ProbabilityVector& p, const prob::ProbabilityVector& r);

/// Degree-of-conditioning-and-correlation weighting: w_q proportional to
/// T_q * D_q. Vectors that condition less (higher effective scenario
/// count) or disagree more with the rest earn a larger weight. All-equal
/// inputs have zero diversity everywhere and fall back to EQ, flagged.
CombineResult combine_dcc(const std::vector<prob::ProbabilityVector>& vectors);

} // namespace hsfp::ensemble
