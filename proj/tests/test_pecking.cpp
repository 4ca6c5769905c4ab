#include <gtest/gtest.h>

#include <puclust/data.hpp>
#include <puclust/harness.hpp>
#include <puclust/labelling.hpp>
#include <puclust/metrics.hpp>
#include <puclust/pecking.hpp>

#include "test_util.hpp"

using namespace puclust;

namespace {

Coefficients coef(double b0, std::vector<double> beta)
{
    Coefficients c = Coefficients::zeros(static_cast<Index>(beta.size()));
    c.intercept = b0;
    for (std::size_t j = 0; j < beta.size(); ++j) c.beta(static_cast<Index>(j)) = beta[j];
    return c;
}

struct Blobs
{
    Matrix X;
    Labels y;
};

Blobs two_blobs(std::uint64_t seed, Index n_pos, Index n_neg, double gap)
{
    Rng rng(seed);
    Blobs b;
    b.X = testutil::gaussian_matrix(rng, n_pos + n_neg, 2, 0.3);
    b.y.assign(static_cast<std::size_t>(n_pos + n_neg), 0);
    for (Index i = 0; i < n_pos; ++i) {
        b.X.row(i).array() += gap;
        b.y[static_cast<std::size_t>(i)] = 1;
    }
    return b;
}

void expect_cleaning_invariants(const CleanedLabels& cl, std::span<const int> s, double q)
{
    std::size_t labelled = 0, ones = 0;
    std::vector<bool> pecked(s.size(), false);
    for (Index i : cl.pecked_indices) {
        ASSERT_EQ(s[static_cast<std::size_t>(i)], 1);
        pecked[static_cast<std::size_t>(i)] = true;
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        labelled += s[i];
        ones += cl.y_hat[i];
        if (s[i] == 1) {
            EXPECT_EQ(cl.y_hat[i], 1);
        }
    }
    EXPECT_GE(ones, labelled);
    EXPECT_EQ(cl.pecked_indices.size(), peck_count(q, labelled));
    for (Index i : cl.cluster_pos_indices) {
        EXPECT_FALSE(s[static_cast<std::size_t>(i)] == 1 && !pecked[static_cast<std::size_t>(i)]);
        EXPECT_EQ(cl.y_hat[static_cast<std::size_t>(i)], 1);
    }
}

} // namespace

TEST(PeckCount, Rounding)
{
    EXPECT_EQ(peck_count(0.3, 10), 3u);
    EXPECT_EQ(peck_count(0.25, 5), 2u);
    EXPECT_EQ(peck_count(0.01, 5), 1u);
    EXPECT_EQ(peck_count(1.0, 7), 7u);
    EXPECT_EQ(peck_count(0.5, 1), 1u);
}

TEST(PeckOnce, SeparatedBlobsCleanExactly)
{
    const Blobs b = two_blobs(1, 40, 60, 5.0);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const CleanedLabels cl = peck_once(b.X, b.y, 1.0, seed);
        EXPECT_EQ(cl.y_hat, b.y);
        expect_cleaning_invariants(cl, b.y, 1.0);
    }
}

TEST(PeckOnce, RecoversHiddenPositives)
{
    const Blobs b = two_blobs(2, 50, 50, 5.0);
    const Labels s = scar_label(b.y, 0.3, 7).s;
    for (double q : {0.25, 0.5, 1.0}) {
        const CleanedLabels cl = peck_once(b.X, s, q, 3);
        EXPECT_EQ(cl.y_hat, b.y) << "q = " << q;
        expect_cleaning_invariants(cl, s, q);
    }
}

TEST(PeckOnce, OneBlobFollowsSeededCluster)
{
    // every row sits on the labelled blob except a single outlier
    Matrix X = Matrix::Zero(12, 2);
    X.row(11) << 1.0, 1.0;
    Labels s(12, 0);
    for (int i : {0, 1, 2, 3}) s[static_cast<std::size_t>(i)] = 1;
    const CleanedLabels cl = peck_once(X, s, 1.0, 5);
    Labels expected(12, 1);
    expected[11] = 0;
    EXPECT_EQ(cl.y_hat, expected);
}

TEST(PeckOnce, TieGoesToClusterNearLabelledMean)
{
    // one labelled row per cluster; the labelled mean (6, 1) is nearer the right centroid
    Matrix X(7, 2);
    X << 0, 0, 0, 1, 1, 0, 10, 0, 10, 1, 1, 1, 11, 1;
    const Labels s{0, 0, 0, 0, 0, 1, 1};
    const CleanedLabels cl = peck_once(X, s, 1.0, 1);
    EXPECT_EQ(cl.y_hat, (Labels{0, 0, 0, 1, 1, 1, 1}));
}

TEST(PeckOnce, InvariantsOnRandomData)
{
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix X = testutil::gaussian_matrix(rng, 80, 3);
        Labels s(80, 0);
        for (auto& v : s) v = bernoulli(rng, 0.3);
        s[0] = 1;
        const double q = std::array{0.25, 0.5, 1.0}[static_cast<std::size_t>(trial % 3)];
        expect_cleaning_invariants(peck_once(X, s, q, static_cast<std::uint64_t>(trial)), s, q);
    }
}

TEST(PeckOnce, FullQuotaDrawsEveryLabelledRow)
{
    const Blobs b = two_blobs(3, 30, 30, 1.0);
    const Labels s = scar_label(b.y, 0.5, 1).s;
    std::vector<Index> labelled;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i]) labelled.push_back(static_cast<Index>(i));
    }
    const CleanedLabels a = peck_once(b.X, s, 1.0, 11);
    EXPECT_EQ(a.pecked_indices, labelled);
    // the draw stream is irrelevant at q = 1; only the clustering seed matters
    EXPECT_EQ(a.y_hat, peck_once(b.X, s, 1.0, 11).y_hat);
}

TEST(PeckOnce, Errors)
{
    const Matrix X = Matrix::Random(5, 2);
    EXPECT_THROW(peck_once(X, Labels{0, 0, 0, 0, 0}, 0.5, 1), Error);
    EXPECT_THROW(peck_once(X, Labels{1, 0, 0, 0, 0}, 0.0, 1), Error);
    EXPECT_THROW(peck_once(X, Labels{1, 0, 0, 0}, 0.5, 1), Error);
}

TEST(Aggregate, IdenticalRepsAreIdempotent)
{
    const std::vector<Coefficients> reps(4, coef(0.3, {1.0, 0.0, -2.0}));
    for (PeckMode m : {PeckMode::Clust, PeckMode::Strict, PeckMode::NonStrict}) {
        const Coefficients a = aggregate_coefficients(reps, m);
        EXPECT_EQ(a.intercept, 0.3);
        EXPECT_EQ(a.beta, reps[0].beta);
    }
}

TEST(Aggregate, StrictAndNonStrictSupports)
{
    const std::vector<Coefficients> reps{coef(1.0, {0.5, 1.0, 0.0}), coef(3.0, {0.0, 2.0, -1.0})};
    const Coefficients strict = aggregate_coefficients(reps, PeckMode::Strict);
    const Coefficients loose = aggregate_coefficients(reps, PeckMode::NonStrict);
    const Coefficients clust = aggregate_coefficients(reps, PeckMode::Clust);
    EXPECT_EQ(strict.support(), (std::vector<Index>{1}));
    EXPECT_EQ(loose.support(), (std::vector<Index>{0, 1, 2}));
    EXPECT_DOUBLE_EQ(strict.beta(1), 1.5);
    EXPECT_DOUBLE_EQ(loose.beta(0), 0.5);
    EXPECT_DOUBLE_EQ(loose.beta(2), -1.0);
    EXPECT_DOUBLE_EQ(clust.beta(0), 0.25);
    for (const auto& c : {strict, loose, clust}) EXPECT_DOUBLE_EQ(c.intercept, 2.0);
}

TEST(Aggregate, DisjointStrictIsInterceptOnly)
{
    const std::vector<Coefficients> reps{coef(1.0, {1.0, 0.0}), coef(2.0, {0.0, 1.0})};
    const Coefficients strict = aggregate_coefficients(reps, PeckMode::Strict);
    EXPECT_TRUE(strict.support().empty());
    EXPECT_DOUBLE_EQ(strict.intercept, 1.5);
}

TEST(Aggregate, NonStrictAveragesPresentOnly)
{
    std::vector<Coefficients> reps(5, coef(0.0, {0.0}));
    reps[1].beta(0) = 0.4;
    reps[3].beta(0) = 0.6;
    EXPECT_DOUBLE_EQ(aggregate_coefficients(reps, PeckMode::NonStrict).beta(0), 0.5);
}

TEST(Aggregate, StrictSubsetOfNonStrictOnRandomSupports)
{
    Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Coefficients> reps;
        for (int r = 0; r < 5; ++r) {
            Coefficients c = Coefficients::zeros(6);
            for (Index j = 0; j < 6; ++j) c.beta(j) = bernoulli(rng, 0.6) ? standard_normal(rng) : 0.0;
            reps.push_back(c);
        }
        const auto strict = aggregate_coefficients(reps, PeckMode::Strict).support();
        const auto loose = aggregate_coefficients(reps, PeckMode::NonStrict).support();
        EXPECT_TRUE(std::includes(loose.begin(), loose.end(), strict.begin(), strict.end()));
    }
}

TEST(Aggregate, Errors)
{
    EXPECT_THROW(aggregate_coefficients(std::vector<Coefficients>{}, PeckMode::Clust), Error);
    const std::vector<Coefficients> mixed{coef(0, {1.0}), coef(0, {1.0, 2.0})};
    EXPECT_THROW(aggregate_coefficients(mixed, PeckMode::Strict), Error);
}

TEST(RunPecking, SingleRepetitionIsThatFit)
{
    const Blobs b = two_blobs(5, 60, 60, 1.5);
    const Labels s = scar_label(b.y, 0.4, 2).s;
    const std::uint64_t seed = 77;
    const std::uint64_t rep_seed = derive_seed(seed, 1);
    const CleanedLabels cl = peck_once(b.X, s, 0.5, rep_seed);

    const Coefficients logistic = fit_logistic(b.X, cl.y_hat);
    const PeckedModel clust = run_pecking(b.X, s, 0.5, 1, PeckMode::Clust, seed);
    EXPECT_EQ(clust.coefficients.beta, logistic.beta);
    EXPECT_EQ(clust.coefficients.intercept, logistic.intercept);

    const Coefficients lj = fit_lasso_joint(b.X, cl.y_hat, derive_seed(rep_seed, 2)).coefficients;
    for (PeckMode m : {PeckMode::Strict, PeckMode::NonStrict}) {
        const PeckedModel pm = run_pecking(b.X, s, 0.5, 1, m, seed);
        EXPECT_EQ(pm.coefficients.beta, lj.beta);
        EXPECT_EQ(pm.coefficients.intercept, lj.intercept);
        ASSERT_EQ(pm.per_rep.size(), 1u);
    }
}

TEST(RunPecking, DeterministicAndNested)
{
    const Blobs b = two_blobs(6, 80, 70, 1.0);
    const Labels s = scar_label(b.y, 0.5, 3).s;
    const PeckedModel a = run_pecking(b.X, s, 0.5, 5, PeckMode::Strict, 10);
    const PeckedModel again = run_pecking(b.X, s, 0.5, 5, PeckMode::Strict, 10);
    EXPECT_EQ(a.coefficients.beta, again.coefficients.beta);
    EXPECT_EQ(a.coefficients.intercept, again.coefficients.intercept);
    const PeckedModel loose = run_pecking(b.X, s, 0.5, 5, PeckMode::NonStrict, 10);
    const auto ss = a.coefficients.support();
    const auto ls = loose.coefficients.support();
    EXPECT_TRUE(std::includes(ls.begin(), ls.end(), ss.begin(), ss.end()));
}

TEST(RunPecking, FailureNamesRepetition)
{
    // the positive cluster swallows every unlabelled row, leaving one class
    Matrix X(6, 1);
    X << 0, 0, 0, 0, 0, 10;
    const Labels s{0, 0, 0, 1, 1, 1};
    try {
        run_pecking(X, s, 1.0, 3, PeckMode::Clust, 1);
        FAIL() << "expected a pecking error";
    } catch (const PeckingError& e) {
        EXPECT_EQ(e.rep(), 1);
        EXPECT_NE(std::string(e.what()).find("repetition 1"), std::string::npos);
    }
}

TEST(RunPecking, ClustBeatsNaiveOnNonScarArtif)
{
    const Dataset d = preprocess(to_raw_table(generate_artif({}, 1)), {}, "artif");
    int wins = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto sa = non_scar_label(d, 0.5, seed);
        const auto [train, test] = stratified_split(sa.s, 0.7, derive_seed(seed, 1));
        const Matrix Xtr = select_rows(d.X, train);
        const Matrix Xte = select_rows(d.X, test);
        const Labels s_tr = select<int>(sa.s, train);
        const Labels y_te = select<int>(d.y, test);
        const double naive = accuracy(confusion(y_te, classify(predict_posterior(fit_logistic(Xtr, s_tr), Xte))));
        const PeckedModel pm = run_pecking(Xtr, s_tr, 1.0, 5, PeckMode::Clust, derive_seed(seed, 2));
        const double clust = accuracy(confusion(y_te, classify(predict_posterior(pm.coefficients, Xte))));
        wins += clust >= naive;
    }
    EXPECT_GT(wins, 10);
}
