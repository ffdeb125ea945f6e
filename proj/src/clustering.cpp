#include "adapt/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace adapt {

double squared_distance(const Point2& a, const Point2& b) {
    double dt = a.t - b.t;
    double du = a.u - b.u;
    return dt * dt + du * du;
}

int nearest_centroid(const std::vector<Point2>& centroids, const Point2& p) {
    int best = 0;
    double best_d = squared_distance(centroids[0], p);
    for (std::size_t c = 1; c < centroids.size(); ++c) {
        double d = squared_distance(centroids[c], p);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::vector<Point2> kmeanspp_init(const std::vector<Point2>& points, int k, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Point2> centroids;
    centroids.reserve(k);
    std::size_t n = points.size();
    std::uniform_int_distribution<std::size_t> uidx(0, n - 1);
    centroids.push_back(points[uidx(rng)]);
    std::vector<double> d2(n);
    while (static_cast<int>(centroids.size()) < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = squared_distance(points[i], centroids[0]);
            for (std::size_t c = 1; c < centroids.size(); ++c)
                best = std::min(best, squared_distance(points[i], centroids[c]));
            d2[i] = best;
            total += best;
        }
        std::size_t pick;
        if (total <= 0.0) {
            // remaining mass is on duplicates of existing centroids; fall back
            // to an unchosen distinct point
            pick = 0;
            for (std::size_t i = 0; i < n; ++i) {
                bool taken = false;
                for (const auto& c : centroids)
                    if (points[i] == c) { taken = true; break; }
                if (!taken) { pick = i; break; }
            }
        } else {
            double r = unit(rng) * total;
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (r < acc) { pick = i; break; }
            }
        }
        centroids.push_back(points[pick]);
    }
    return centroids;
}

struct LloydResult {
    std::vector<Point2> centroids;
    std::vector<int> assignments;
    double distortion = 0.0;
    int iterations = 0;
};

LloydResult lloyd(const std::vector<Point2>& points, std::vector<Point2> centroids,
                  const KmeansOptions& opts) {
    std::size_t n = points.size();
    int k = static_cast<int>(centroids.size());
    std::vector<int> assign(n);
    auto do_assign = [&](std::vector<int>& a) {
        for (std::size_t i = 0; i < n; ++i)
            a[i] = nearest_centroid(centroids, points[i]);
    };
    do_assign(assign);
    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        std::vector<Point2> sums(k);
        std::vector<int> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            sums[assign[i]].t += points[i].t;
            sums[assign[i]].u += points[i].u;
            ++counts[assign[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // reseed at the point farthest from its assigned centroid
                std::size_t far_i = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    double d = squared_distance(points[i], centroids[assign[i]]);
                    if (d > far_d) { far_d = d; far_i = i; }
                }
                centroids[c] = points[far_i];
            } else {
                centroids[c] = {sums[c].t / counts[c], sums[c].u / counts[c]};
            }
        }
        std::vector<int> next(n);
        do_assign(next);
        if (next == assign) break;
        assign = std::move(next);
    }
    LloydResult res;
    res.centroids = std::move(centroids);
    res.assignments = std::move(assign);
    res.iterations = iter;
    for (std::size_t i = 0; i < n; ++i)
        res.distortion += squared_distance(points[i], res.centroids[res.assignments[i]]);
    return res;
}

// Hartigan-style refinement: move a single point to another cluster whenever
// that strictly lowers the distortion, re-converging with Lloyd after each
// move. Escapes Lloyd-only local optima on small instances.
LloydResult refine(const std::vector<Point2>& points, LloydResult res,
                   const KmeansOptions& opts) {
    std::size_t n = points.size();
    int k = static_cast<int>(res.centroids.size());
    for (int round = 0; round < 200; ++round) {
        std::vector<int> counts(k, 0);
        for (int a : res.assignments) ++counts[a];
        double eps = 1e-12 * std::max(1.0, res.distortion);
        double best_delta = -eps;
        std::size_t best_i = 0;
        int best_c = -1;
        for (std::size_t i = 0; i < n; ++i) {
            int a = res.assignments[i];
            if (counts[a] <= 1) continue;
            double removal = counts[a] / static_cast<double>(counts[a] - 1) *
                             squared_distance(points[i], res.centroids[a]);
            for (int c = 0; c < k; ++c) {
                if (c == a) continue;
                double delta = counts[c] / static_cast<double>(counts[c] + 1) *
                                   squared_distance(points[i], res.centroids[c]) -
                               removal;
                if (delta < best_delta) {
                    best_delta = delta;
                    best_i = i;
                    best_c = c;
                }
            }
        }
        if (best_c < 0) break;
        res.assignments[best_i] = best_c;
        std::vector<Point2> sums(k);
        std::vector<int> cnt(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            sums[res.assignments[i]].t += points[i].t;
            sums[res.assignments[i]].u += points[i].u;
            ++cnt[res.assignments[i]];
        }
        std::vector<Point2> centroids(k);
        for (int c = 0; c < k; ++c)
            centroids[c] = {sums[c].t / cnt[c], sums[c].u / cnt[c]};
        res = lloyd(points, std::move(centroids), opts);
    }
    return res;
}

} // namespace

ClusterModel kmeans_fit(const std::vector<Point2>& points, int k, std::uint64_t seed,
                        const KmeansOptions& opts) {
    if (points.empty()) throw Error(Errc::EmptyInput, "kmeans_fit on empty point set");
    if (k < 1) throw Error(Errc::InvalidConfig, "k must be >= 1");
    std::set<std::pair<double, double>> distinct;
    for (const auto& p : points) distinct.insert({p.t, p.u});
    if (static_cast<std::size_t>(k) > distinct.size())
        throw Error(Errc::KExceedsPoints,
                    "k = " + std::to_string(k) + " exceeds " + std::to_string(distinct.size()) +
                        " distinct points");

    LloydResult best;
    bool have = false;
    int n_init = std::max(1, opts.n_init);
    for (int r = 0; r < n_init; ++r) {
        std::mt19937_64 rng(splitmix64(seed + static_cast<std::uint64_t>(r)));
        auto init = kmeanspp_init(points, k, rng);
        LloydResult res = refine(points, lloyd(points, std::move(init), opts), opts);
        if (!have || res.distortion < best.distortion) {
            best = std::move(res);
            have = true;
        }
    }

    ClusterModel model;
    model.k = k;
    model.centroids = std::move(best.centroids);
    model.assignments = std::move(best.assignments);
    model.distortion = best.distortion;
    model.iterations = best.iterations;
    model.seed = seed;
    model.over_cluster = 0;
    for (int c = 1; c < k; ++c)
        if (model.centroids[c].u > model.centroids[model.over_cluster].u)
            model.over_cluster = c;
    return model;
}

std::vector<std::pair<int, double>> distortion_curve(const std::vector<Point2>& points,
                                                     int k_min, int k_max, std::uint64_t seed,
                                                     const KmeansOptions& opts) {
    if (k_min < 1 || k_max < k_min)
        throw Error(Errc::InvalidConfig, "bad k range");
    std::vector<std::pair<int, double>> curve;
    for (int k = k_min; k <= k_max; ++k)
        curve.emplace_back(k, kmeans_fit(points, k, seed, opts).distortion);
    return curve;
}

ElbowResult elbow_k(const std::vector<std::pair<int, double>>& curve) {
    if (curve.size() < 3)
        throw Error(Errc::CurveTooShort, "elbow needs >= 3 curve entries, got " +
                                             std::to_string(curve.size()));
    std::vector<double> sds;
    for (std::size_t i = 1; i + 1 < curve.size(); ++i)
        sds.push_back(curve[i - 1].second - 2.0 * curve[i].second + curve[i + 1].second);
    std::size_t best = 0;
    for (std::size_t i = 1; i < sds.size(); ++i)
        if (sds[i] > sds[best]) best = i; // ties keep the smallest interior k
    ElbowResult res;
    res.k = curve[best + 1].first;
    if (sds.size() > 1) {
        double runner = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < sds.size(); ++i)
            if (i != best) runner = std::max(runner, sds[i]);
        double scale = std::max({std::abs(sds[best]), std::abs(runner), 1e-12});
        res.low_confidence = (sds[best] - runner) <= 1e-9 * scale;
    }
    return res;
}

UtilizationClass classify(const ClusterModel& model, const Point2& p) {
    if (model.k != 2)
        throw Error(Errc::ModelNotBinary, "classify requires k = 2, model has k = " +
                                              std::to_string(model.k));
    int c = nearest_centroid(model.centroids, p);
    return c == model.over_cluster ? UtilizationClass::Over : UtilizationClass::FullUnder;
}

} // namespace adapt
