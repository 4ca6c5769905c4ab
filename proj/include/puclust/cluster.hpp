#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <vector>

#include "common.hpp"

namespace puclust {

struct Clustering
{
    std::vector<int> assignment;  // 0 or 1 per point
    Matrix centroids;             // 2 x p
    double within_sse = 0.0;
    int iterations = 0;
    bool converged = false;
    /// SSE after each Lloyd iteration and transfer pass of the winning restart.
    std::vector<double> sse_trace;
};

struct TwoMeansOptions
{
    int n_restarts = 5;
    int max_iter = 100;
    double tol = 1e-8;
};

namespace detail {

inline double squared_distance(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                               const Eigen::Ref<const Eigen::RowVectorXd>& b)
{
    return (a - b).squaredNorm();
}

inline double clustering_sse(const Matrix& points, const std::vector<int>& assignment, const Matrix& centroids)
{
    double sse = 0.0;
    for (Index i = 0; i < points.rows(); ++i) {
        sse += squared_distance(points.row(i), centroids.row(assignment[static_cast<std::size_t>(i)]));
    }
    return sse;
}

inline void update_centroids(const Matrix& points, const std::vector<int>& assignment, Matrix& centroids,
                             std::array<Index, 2>& sizes)
{
    centroids.setZero();
    sizes = {0, 0};
    for (Index i = 0; i < points.rows(); ++i) {
        const int k = assignment[static_cast<std::size_t>(i)];
        centroids.row(k) += points.row(i);
        ++sizes[static_cast<std::size_t>(k)];
    }
    for (int k = 0; k < 2; ++k) {
        if (sizes[static_cast<std::size_t>(k)] > 0) {
            centroids.row(k) /= static_cast<double>(sizes[static_cast<std::size_t>(k)]);
        }
    }
}

inline Clustering lloyd_two_means(const Matrix& points, Rng& rng, const TwoMeansOptions& opt)
{
    const Index m = points.rows();
    Clustering out;
    out.centroids.resize(2, points.cols());

    // k-means++ seeding
    const Index first = static_cast<Index>(uniform_index(rng, static_cast<std::size_t>(m)));
    Vector d2(m);
    for (Index i = 0; i < m; ++i) d2(i) = squared_distance(points.row(i), points.row(first));
    const double total = d2.sum();
    double u = uniform01(rng) * total;
    Index second = 0;
    for (Index i = 0; i < m; ++i) {
        if (d2(i) <= 0.0) continue;
        second = i;
        u -= d2(i);
        if (u < 0.0) break;
    }
    out.centroids.row(0) = points.row(first);
    out.centroids.row(1) = points.row(second);

    out.assignment.assign(static_cast<std::size_t>(m), -1);
    std::array<Index, 2> sizes{};
    for (int it = 1; it <= opt.max_iter; ++it) {
        bool changed = false;
        for (Index i = 0; i < m; ++i) {
            const double a = squared_distance(points.row(i), out.centroids.row(0));
            const double b = squared_distance(points.row(i), out.centroids.row(1));
            const int k = b < a ? 1 : 0;
            if (out.assignment[static_cast<std::size_t>(i)] != k) {
                out.assignment[static_cast<std::size_t>(i)] = k;
                changed = true;
            }
        }
        for (int k = 0; k < 2; ++k) {
            if (std::count(out.assignment.begin(), out.assignment.end(), k) > 0) continue;
            // empty cluster: hand it the point farthest from its centroid
            Index far = 0;
            double best = -1.0;
            for (Index i = 0; i < m; ++i) {
                const double d = squared_distance(points.row(i),
                                                  out.centroids.row(out.assignment[static_cast<std::size_t>(i)]));
                if (d > best) {
                    best = d;
                    far = i;
                }
            }
            out.assignment[static_cast<std::size_t>(far)] = k;
            changed = true;
        }
        const Matrix previous = out.centroids;
        update_centroids(points, out.assignment, out.centroids, sizes);
        out.within_sse = clustering_sse(points, out.assignment, out.centroids);
        out.sse_trace.push_back(out.within_sse);
        out.iterations = it;
        const double moved = (out.centroids - previous).rowwise().norm().maxCoeff();
        if (!changed || moved < opt.tol) {
            out.converged = true;
            break;
        }
    }

    // Hartigan transfers: move a single point whenever that lowers the SSE
    // once both centroids follow it. Any resulting partition is also a
    // Lloyd fixed point.
    for (int pass = 0; pass < opt.max_iter; ++pass) {
        bool moved = false;
        for (Index i = 0; i < m; ++i) {
            const int a = out.assignment[static_cast<std::size_t>(i)];
            const int b = 1 - a;
            const double na = static_cast<double>(sizes[static_cast<std::size_t>(a)]);
            const double nb = static_cast<double>(sizes[static_cast<std::size_t>(b)]);
            if (na <= 1.0) continue;
            const double gain = na / (na - 1.0) * squared_distance(points.row(i), out.centroids.row(a)) -
                                nb / (nb + 1.0) * squared_distance(points.row(i), out.centroids.row(b));
            if (gain <= 1e-12 * (1.0 + out.within_sse)) continue;
            out.centroids.row(a) = (na * out.centroids.row(a) - points.row(i)) / (na - 1.0);
            out.centroids.row(b) = (nb * out.centroids.row(b) + points.row(i)) / (nb + 1.0);
            --sizes[static_cast<std::size_t>(a)];
            ++sizes[static_cast<std::size_t>(b)];
            out.assignment[static_cast<std::size_t>(i)] = b;
            moved = true;
        }
        if (!moved) break;
        update_centroids(points, out.assignment, out.centroids, sizes);
        out.within_sse = clustering_sse(points, out.assignment, out.centroids);
        out.sse_trace.push_back(out.within_sse);
    }
    return out;
}

} // namespace detail

/// 2-means (Lloyd, then Hartigan transfers) with k-means++ seeding, best of
/// n_restarts by SSE.
/// Restart r uses derive_seed(seed, r); ties keep the earliest restart.
/// Labels are canonical: point 0 is always in cluster 0.
inline Clustering two_means(const Matrix& points, std::uint64_t seed, const TwoMeansOptions& opt = {})
{
    const Index m = points.rows();
    if (m < 2) throw Error("two_means: need at least two points");
    if (opt.n_restarts < 1) throw Error("two_means: n_restarts must be positive");
    if (!points.allFinite()) throw Error("two_means: non-finite coordinates");
    bool distinct = false;
    for (Index i = 1; i < m && !distinct; ++i) distinct = (points.row(i) != points.row(0));
    if (!distinct) throw Error("two_means: all points are identical");

    Clustering best;
    best.within_sse = std::numeric_limits<double>::infinity();
    for (int r = 0; r < opt.n_restarts; ++r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        Clustering c = detail::lloyd_two_means(points, rng, opt);
        if (c.within_sse < best.within_sse) best = std::move(c);
    }
    if (best.assignment[0] != 0) {
        for (int& a : best.assignment) a = 1 - a;
        best.centroids.row(0).swap(best.centroids.row(1));
    }
    return best;
}

} // namespace puclust
