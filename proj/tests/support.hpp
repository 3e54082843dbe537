#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace testsup {

/// Deterministic RNG for test data. mt19937_64 is fully specified by the
/// standard; the uniform/normal mappings are spelled out here so streams
/// are identical on every platform (std::normal_distribution is not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 1e-300)
            u1 = uniform();
        double u2 = uniform();
        double mag = std::sqrt(-2.0 * std::log(u1));
        spare_ = mag * std::sin(2.0 * M_PI * u2);
        has_spare_ = true;
        return mag * std::cos(2.0 * M_PI * u2);
    }

    std::vector<double> normals(std::size_t n, double mean = 0.0, double sd = 1.0) {
        std::vector<double> out(n);
        for (auto& v : out)
            v = mean + sd * normal();
        return out;
    }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace testsup
