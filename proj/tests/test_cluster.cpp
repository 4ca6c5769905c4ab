#include <gtest/gtest.h>

#include <puclust/cluster.hpp>

#include "test_util.hpp"

using namespace puclust;

namespace {

// Exhaustive minimum SSE over all 2-partitions with both parts nonempty.
double brute_force_sse(const Matrix& P)
{
    const Index m = P.rows();
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 1; mask < (1u << (m - 1)); ++mask) {
        // point m-1 always in part 0, so each split is visited once
        Eigen::RowVectorXd sum[2] = {Eigen::RowVectorXd::Zero(P.cols()), Eigen::RowVectorXd::Zero(P.cols())};
        double count[2] = {0, 0};
        for (Index i = 0; i < m; ++i) {
            const int k = (mask >> i) & 1u;
            sum[k] += P.row(i);
            count[k] += 1;
        }
        double sse = 0.0;
        for (Index i = 0; i < m; ++i) {
            const int k = (mask >> i) & 1u;
            sse += (P.row(i) - sum[k] / count[k]).squaredNorm();
        }
        best = std::min(best, sse);
    }
    return best;
}

double recomputed_sse(const Matrix& P, const Clustering& c)
{
    double sse = 0.0;
    for (Index i = 0; i < P.rows(); ++i) {
        sse += (P.row(i) - c.centroids.row(c.assignment[static_cast<std::size_t>(i)])).squaredNorm();
    }
    return sse;
}

} // namespace

TEST(TwoMeans, SeparatedPairsOnALine)
{
    Matrix P(4, 1);
    P << 0, 0.1, 10, 10.1;
    const Clustering c = two_means(P, 1);
    EXPECT_EQ(c.assignment, (std::vector<int>{0, 0, 1, 1}));
    EXPECT_NEAR(c.within_sse, 0.01, 1e-12);
    EXPECT_TRUE(c.converged);
}

TEST(TwoMeans, TwoDistinctPoints)
{
    Matrix P(2, 3);
    P << 0, 1, 2, 3, 4, 5;
    const Clustering c = two_means(P, 3);
    EXPECT_EQ(c.assignment, (std::vector<int>{0, 1}));
    EXPECT_EQ(c.within_sse, 0.0);
}

TEST(TwoMeans, EightPointsMatchExhaustiveSearch)
{
    Rng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix P = testutil::gaussian_matrix(rng, 8, 2);
        EXPECT_NEAR(two_means(P, static_cast<std::uint64_t>(trial)).within_sse, brute_force_sse(P), 1e-9)
            << "trial " << trial;
    }
}

TEST(TwoMeans, SmallInstancesNearlyAlwaysOptimal)
{
    Rng rng(77);
    int hits = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Index m = 3 + static_cast<Index>(uniform_index(rng, 10));
        const Index p = 1 + static_cast<Index>(uniform_index(rng, 3));
        const Matrix P = testutil::gaussian_matrix(rng, m, p);
        hits += two_means(P, static_cast<std::uint64_t>(trial)).within_sse <= brute_force_sse(P) + 1e-9;
    }
    EXPECT_GE(hits, 95);
}

TEST(TwoMeans, Invariants)
{
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const Matrix P = testutil::gaussian_matrix(rng, 40, 3);
        const Clustering c = two_means(P, static_cast<std::uint64_t>(trial));
        EXPECT_EQ(c.assignment[0], 0);
        const auto ones = std::count(c.assignment.begin(), c.assignment.end(), 1);
        EXPECT_GT(ones, 0);
        EXPECT_LT(ones, 40);
        EXPECT_NEAR(c.within_sse, recomputed_sse(P, c), 1e-9);
        for (std::size_t k = 1; k < c.sse_trace.size(); ++k) EXPECT_LE(c.sse_trace[k], c.sse_trace[k - 1] + 1e-12);
        // every point sits with its nearer centroid at convergence
        if (c.converged) {
            for (Index i = 0; i < P.rows(); ++i) {
                const double own = (P.row(i) - c.centroids.row(c.assignment[static_cast<std::size_t>(i)])).squaredNorm();
                const double other =
                    (P.row(i) - c.centroids.row(1 - c.assignment[static_cast<std::size_t>(i)])).squaredNorm();
                EXPECT_LE(own, other + 1e-12);
            }
        }
    }
}

TEST(TwoMeans, PointOrderDoesNotMatterUpToRelabelling)
{
    Rng rng(8);
    Matrix P(60, 2);
    for (Index i = 0; i < 60; ++i) {
        const double shift = i < 25 ? 0.0 : 4.0;
        P(i, 0) = shift + standard_normal(rng);
        P(i, 1) = shift + standard_normal(rng);
    }
    std::vector<Index> perm(60);
    std::iota(perm.begin(), perm.end(), Index{0});
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[uniform_index(rng, i)]);
    const Matrix Q = select_rows(P, perm);

    const Clustering a = two_means(P, 1);
    const Clustering b = two_means(Q, 1);
    EXPECT_NEAR(a.within_sse, b.within_sse, 1e-9);
    for (std::size_t i = 0; i < perm.size(); ++i) {
        for (std::size_t j = 0; j < perm.size(); ++j) {
            const bool same_a = a.assignment[static_cast<std::size_t>(perm[i])] == a.assignment[static_cast<std::size_t>(perm[j])];
            const bool same_b = b.assignment[i] == b.assignment[j];
            ASSERT_EQ(same_a, same_b);
        }
    }
}

TEST(TwoMeans, Deterministic)
{
    Rng rng(1);
    const Matrix P = testutil::gaussian_matrix(rng, 50, 4);
    const Clustering a = two_means(P, 10);
    const Clustering b = two_means(P, 10);
    EXPECT_EQ(a.assignment, b.assignment);
    EXPECT_EQ(a.centroids, b.centroids);
    EXPECT_EQ(a.within_sse, b.within_sse);
}

TEST(TwoMeans, DuplicatesAndEmptyClusterRepair)
{
    Matrix P(6, 1);
    P << 1, 1, 1, 1, 1, 2;
    const Clustering c = two_means(P, 4);
    EXPECT_EQ(c.assignment, (std::vector<int>{0, 0, 0, 0, 0, 1}));
    EXPECT_EQ(c.within_sse, 0.0);
}

TEST(TwoMeans, Errors)
{
    EXPECT_THROW(two_means(Matrix::Zero(1, 2), 1), Error);
    EXPECT_THROW(two_means(Matrix::Ones(5, 2), 1), Error);
    Matrix bad = Matrix::Zero(3, 1);
    bad(1, 0) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(two_means(bad, 1), Error);
}
