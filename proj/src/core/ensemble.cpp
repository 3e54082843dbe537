#include "core/ensemble.hpp"

#include "core/errors.hpp"

#include <cmath>

namespace hsfp::ensemble {

namespace {

void check_aligned(const std::vector<prob::ProbabilityVector>& vectors) {
    if (vectors.empty())
        throw DataError("ensemble: no probability vectors to combine");
    const std::size_t n = vectors.front().size();
    for (std::size_t q = 0; q < vectors.size(); ++q) {
        if (vectors[q].size() != n)
            throw DataError("ensemble: vector " + std::to_string(q) + " has length " +
                            std::to_string(vectors[q].size()) + ", expected " +
                            std::to_string(n));
        vectors[q].validate();
    }
}

prob::ProbabilityVector mix(const std::vector<prob::ProbabilityVector>& vectors,
                            const std::vector<double>& w) {
    prob::ProbabilityVector out;
    out.weights.assign(vectors.front().size(), 0.0);
    for (std::size_t q = 0; q < vectors.size(); ++q)
        for (std::size_t t = 0; t < out.weights.size(); ++t)
            out.weights[t] += w[q] * vectors[q].weights[t];
    return out;
}

} // namespace

CombineResult combine_eq(const std::vector<prob::ProbabilityVector>& vectors) {
    check_aligned(vectors);
    CombineResult res;
    res.weights.method = Method::EQ;
    res.weights.weights.assign(vectors.size(), 1.0 / static_cast<double>(vectors.size()));
    res.combined = mix(vectors, res.weights.weights);
    return res;
}

double bhattacharyya(const prob::ProbabilityVector& p, const prob::ProbabilityVector& r) {
    if (p.size() != r.size())
        throw DataError("bhattacharyya: length mismatch");
    double b = 0.0;
    for (std::size_t t = 0; t < p.size(); ++t)
        b += std::sqrt(p.weights[t] * r.weights[t]);
    return b;
}

double hellinger(const prob::ProbabilityVector& p, const prob::ProbabilityVector& r) {
    return std::sqrt(std::max(0.0, 1.0 - bhattacharyya(p, r)));
}

CombineResult combine_dcc(const std::vector<prob::ProbabilityVector>& vectors) {
    if (vectors.size() < 2)
        throw ConfigError("combine_dcc: needs at least two probability vectors");
    check_aligned(vectors);

    const std::size_t q_count = vectors.size();
    CombineResult res;
    res.weights.method = Method::DCC;
    res.weights.effective_scenarios.resize(q_count);
    res.weights.diversity.resize(q_count);

    for (std::size_t q = 0; q < q_count; ++q)
        res.weights.effective_scenarios[q] = prob::effective_scenarios(vectors[q]);

    for (std::size_t q = 0; q < q_count; ++q) {
        double sum = 0.0;
        for (std::size_t r = 0; r < q_count; ++r)
            if (r != q)
                sum += hellinger(vectors[q], vectors[r]);
        res.weights.diversity[q] = sum / static_cast<double>(q_count - 1);
    }

    double total = 0.0;
    std::vector<double> raw(q_count);
    for (std::size_t q = 0; q < q_count; ++q) {
        raw[q] = res.weights.effective_scenarios[q] * res.weights.diversity[q];
        total += raw[q];
    }

    if (total <= 0.0) {
        res.weights.fallback_eq = true;
        res.weights.flags.push_back("all T_q * D_q are zero; fell back to equal weights");
        res.weights.weights.assign(q_count, 1.0 / static_cast<double>(q_count));
    } else {
        res.weights.weights.resize(q_count);
        for (std::size_t q = 0; q < q_count; ++q)
            res.weights.weights[q] = raw[q] / total;
    }
    res.combined = mix(vectors, res.weights.weights);
    return res;
}

} // namespace hsfp::ensemble
