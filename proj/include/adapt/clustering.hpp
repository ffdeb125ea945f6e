#ifndef ADAPT_CLUSTERING_HPP
#define ADAPT_CLUSTERING_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "adapt/error.hpp"

namespace adapt {

/// One (time, utilization) observation in the clustering space.
struct Point2 {
    double t = 0.0;
    double u = 0.0;

    bool operator==(const Point2&) const = default;
};

struct ClusterModel {
    int k = 0;
    std::vector<Point2> centroids;
    std::vector<int> assignments;
    double distortion = 0.0; // sum of squared distances to assigned centroids
    int over_cluster = 0;    // centroid with the maximal u coordinate
    int iterations = 0;
    std::uint64_t seed = 0;
};

struct KmeansOptions {
    int max_iter = 300;
    double tol = 1e-6; // squared-distance units of centroid shift
    int n_init = 10;   // k-means++ restarts, best distortion wins
};

enum class UtilizationClass { Over, FullUnder };

double squared_distance(const Point2& a, const Point2& b);

/// Seeded k-means++ with Lloyd iterations and best-of-n_init restarts.
/// The returned model is a Lloyd fixed point: each point is assigned to its
/// nearest centroid (ties to the lowest index) and each centroid is the mean
/// of its assigned points.
ClusterModel kmeans_fit(const std::vector<Point2>& points, int k, std::uint64_t seed,
                        const KmeansOptions& opts = {});

/// One (k, best distortion) pair per k in [k_min, k_max].
std::vector<std::pair<int, double>> distortion_curve(const std::vector<Point2>& points,
                                                     int k_min, int k_max, std::uint64_t seed,
                                                     const KmeansOptions& opts = {});

struct ElbowResult {
    int k = 0;
    bool low_confidence = false; // no pronounced knee (tied second differences)
};

/// k maximizing the discrete second difference of the distortion curve.
ElbowResult elbow_k(const std::vector<std::pair<int, double>>& curve);

/// Nearest-centroid label for a binary (k=2) model.
UtilizationClass classify(const ClusterModel& model, const Point2& p);

int nearest_centroid(const std::vector<Point2>& centroids, const Point2& p);

} // namespace adapt

#endif
