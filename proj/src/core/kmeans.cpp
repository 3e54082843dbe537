#include "core/kmeans.hpp"

#include "core/errors.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace hsfp::kmeans {

namespace {

double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

std::size_t uniform_index(std::mt19937_64& gen, std::size_t n) {
    return static_cast<std::size_t>(gen() % n);
}

double sq_dist(const Eigen::MatrixXd& pts, Eigen::Index a, const Eigen::RowVectorXd& c) {
    return (pts.row(a) - c).squaredNorm();
}

Result lloyd_once(const Eigen::MatrixXd& points, int k, std::mt19937_64& gen,
                  int max_iterations) {
    const Eigen::Index n = points.rows();
    const Eigen::Index dim = points.cols();

    // k-means++ seeding.
    Eigen::MatrixXd centers(k, dim);
    centers.row(0) = points.row(static_cast<Eigen::Index>(
        uniform_index(gen, static_cast<std::size_t>(n))));
    Eigen::VectorXd d2(n);
    for (Eigen::Index i = 0; i < n; ++i)
        d2(i) = sq_dist(points, i, centers.row(0));
    for (int c = 1; c < k; ++c) {
        double total = d2.sum();
        Eigen::Index pick = 0;
        if (total > 0.0) {
            double target = uniform01(gen) * total;
            double acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += d2(i);
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<Eigen::Index>(uniform_index(gen, static_cast<std::size_t>(n)));
        }
        centers.row(c) = points.row(pick);
        for (Eigen::Index i = 0; i < n; ++i)
            d2(i) = std::min(d2(i), sq_dist(points, i, centers.row(c)));
    }

    std::vector<int> assignment(static_cast<std::size_t>(n), 0);
    Result res;
    res.centers = centers;
    for (int it = 0; it < max_iterations; ++it) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                double d = sq_dist(points, i, res.centers.row(c));
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (assignment[static_cast<std::size_t>(i)] != best) {
                assignment[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, dim);
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(assignment[static_cast<std::size_t>(i)]) += points.row(i);
            ++counts[static_cast<std::size_t>(assignment[static_cast<std::size_t>(i)])];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                res.centers.row(c) =
                    sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
            } else {
                // Re-seed an empty cluster at the point farthest from its center.
                Eigen::Index far = 0;
                double far_d = -1.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    double d = sq_dist(points, i,
                                       res.centers.row(assignment[static_cast<std::size_t>(i)]));
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                res.centers.row(c) = points.row(far);
                changed = true;
            }
        }
        if (!changed && it > 0) {
            res.converged = true;
            break;
        }
    }

    res.assignment = std::move(assignment);
    res.inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        res.inertia +=
            sq_dist(points, i, res.centers.row(res.assignment[static_cast<std::size_t>(i)]));
    return res;
}

} // namespace

Result cluster(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int restarts,
               int max_iterations) {
    if (k < 1 || k > points.rows())
        throw ConfigError("kmeans: k must lie in [1, n_points]");
    Result best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        std::mt19937_64 gen(seed + static_cast<std::uint64_t>(r) * 0x9E3779B97F4A7C15ull);
        Result cand = lloyd_once(points, k, gen, max_iterations);
        if (cand.inertia < best.inertia)
            best = std::move(cand);
    }
    return best;
}

double mean_silhouette(const Eigen::MatrixXd& points, const std::vector<int>& assignment,
                       int k) {
    const Eigen::Index n = points.rows();
    if (static_cast<std::size_t>(n) != assignment.size())
        throw DataError("silhouette: assignment length mismatch");

    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int a : assignment)
        ++counts[static_cast<std::size_t>(a)];

    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const int own = assignment[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(own)] <= 1)
            continue; // singleton contributes 0
        std::vector<double> mean_dist(static_cast<std::size_t>(k), 0.0);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i)
                continue;
            mean_dist[static_cast<std::size_t>(assignment[static_cast<std::size_t>(j)])] +=
                (points.row(i) - points.row(j)).norm();
        }
        double a_i = mean_dist[static_cast<std::size_t>(own)] /
                     static_cast<double>(counts[static_cast<std::size_t>(own)] - 1);
        double b_i = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c == own || counts[static_cast<std::size_t>(c)] == 0)
                continue;
            b_i = std::min(b_i, mean_dist[static_cast<std::size_t>(c)] /
                                    static_cast<double>(counts[static_cast<std::size_t>(c)]));
        }
        if (std::isfinite(b_i) && std::max(a_i, b_i) > 0.0)
            total += (b_i - a_i) / std::max(a_i, b_i);
    }
    return total / static_cast<double>(n);
}

} // namespace hsfp::kmeans
