#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace hsfp::kmeans {

struct Result {
    std::vector<int> assignment;
    Eigen::MatrixXd centers; // k x dim
    double inertia = 0.0;
    bool converged = false;
};

/// Lloyd k-means with k-means++ seeding, best of `restarts` seeded runs.
/// Points are rows. Deterministic for a given seed: all random draws come
/// from an explicitly mapped mt19937_64 stream so results do not depend
/// on the standard library's distribution implementations.
Result cluster(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int restarts = 10,
               int max_iterations = 100);

/// Mean silhouette over all points (Euclidean metric); singleton clusters
/// contribute 0.
double mean_silhouette(const Eigen::MatrixXd& points, const std::vector<int>& assignment,
                       int k);

} // namespace hsfp::kmeans
