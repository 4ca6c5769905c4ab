#include <gtest/gtest.h>

#include <puclust/data.hpp>
#include <puclust/labelling.hpp>

#include "test_util.hpp"

using namespace puclust;

namespace {

Labels alternating(std::size_t n_pos, std::size_t n_neg)
{
    Labels y;
    for (std::size_t i = 0; i < n_pos + n_neg; ++i) y.push_back(i < n_pos ? 1 : 0);
    return y;
}

void expect_pu_constraint(const SurrogateAssignment& sa, std::span<const int> y)
{
    ASSERT_EQ(sa.s.size(), y.size());
    for (std::size_t i = 0; i < y.size(); ++i) ASSERT_LE(sa.s[i], y[i]) << "row " << i;
    EXPECT_DOUBLE_EQ(sa.realized_c, empirical_c(sa.s, y));
}

Dataset artif_scaled()
{
    return preprocess(to_raw_table(generate_artif({}, 1)), {}, "artif");
}

} // namespace

TEST(Scar, FullFrequencyCopiesLabels)
{
    const Labels y = alternating(30, 20);
    const auto sa = scar_label(y, 1.0, 9);
    EXPECT_EQ(sa.s, y);
    EXPECT_DOUBLE_EQ(sa.realized_c, 1.0);
}

TEST(Scar, ConcentratesAtLargeN)
{
    const Labels y = alternating(10000, 5000);
    const auto sa = scar_label(y, 0.5, 1);
    expect_pu_constraint(sa, y);
    EXPECT_GE(sa.realized_c, 0.48);
    EXPECT_LE(sa.realized_c, 0.52);
    for (std::size_t i = 10000; i < y.size(); ++i) ASSERT_EQ(sa.s[i], 0);
}

TEST(Scar, MeanOverSeeds)
{
    const Labels y = alternating(500, 500);
    for (double c : {0.3, 0.5, 0.8}) {
        double mean = 0.0;
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const auto sa = scar_label(y, c, seed);
            expect_pu_constraint(sa, y);
            mean += sa.realized_c;
        }
        EXPECT_NEAR(mean / 200.0, c, 0.01) << "c = " << c;
    }
}

TEST(Scar, Errors)
{
    EXPECT_THROW(scar_label(Labels{0, 0, 0}, 0.5, 1), Error);
    EXPECT_THROW(scar_label(Labels{0, 1}, 0.0, 1), Error);
    EXPECT_THROW(scar_label(Labels{0, 1}, 1.5, 1), Error);
}

TEST(EmpiricalC, Basics)
{
    const Labels y{1, 1, 0, 1};
    EXPECT_DOUBLE_EQ(empirical_c(y, y), 1.0);
    EXPECT_DOUBLE_EQ(empirical_c(Labels{0, 0, 0, 0}, y), 0.0);
    const Labels y500 = alternating(500, 100);
    const double c = empirical_c(scar_label(y500, 0.8, 3).s, y500);
    EXPECT_GE(c, 0.74);
    EXPECT_LE(c, 0.86);
}

TEST(NonScar, HitsTargetOnArtif)
{
    const Dataset d = artif_scaled();
    for (double c : {0.3, 0.5, 0.8}) {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto sa = non_scar_label(d, c, seed);
            expect_pu_constraint(sa, d.y);
            EXPECT_NEAR(sa.realized_c, c, 0.05) << "c = " << c << " seed " << seed;
            double mean_e = 0.0;
            for (std::size_t i = 0; i < d.y.size(); ++i) mean_e += d.y[i] ? sa.propensity(static_cast<Index>(i)) : 0.0;
            EXPECT_NEAR(mean_e / static_cast<double>(d.n_positive()), c, 1e-9);
        }
    }
}

TEST(NonScar, HitsTargetOnBreastc)
{
    if (!testutil::have_data("breastc.csv")) GTEST_SKIP() << "data/breastc.csv not present";
    const Dataset d = preprocess(load_csv(testutil::data_path("breastc.csv"), "target"), {}, "breastc");
    for (double c : {0.3, 0.5, 0.8}) {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto sa = non_scar_label(d, c, seed);
            expect_pu_constraint(sa, d.y);
            EXPECT_NEAR(sa.realized_c, c, 0.05) << "c = " << c << " seed " << seed;
        }
    }
}

TEST(NonScar, ViolatesScarDetectably)
{
    const Dataset d = artif_scaled();
    const auto sa = non_scar_label(d, 0.5, 17);
    ASSERT_EQ(sa.selected_features.size(), 1u);
    const Index j = sa.selected_features[0];
    std::vector<double> lab, unl;
    for (std::size_t i = 0; i < d.y.size(); ++i) {
        if (d.y[i] == 1) (sa.s[i] ? lab : unl).push_back(d.X(static_cast<Index>(i), j));
    }
    auto moments = [](const std::vector<double>& v) {
        double m = 0.0, s2 = 0.0;
        for (double x : v) m += x;
        m /= static_cast<double>(v.size());
        for (double x : v) s2 += (x - m) * (x - m);
        return std::pair{m, s2 / static_cast<double>(v.size() - 1)};
    };
    const auto [m1, v1] = moments(lab);
    const auto [m0, v0] = moments(unl);
    const double t = (m1 - m0) / std::sqrt(v1 / static_cast<double>(lab.size()) + v0 / static_cast<double>(unl.size()));
    // two-sided p < 0.01 with several hundred per group
    EXPECT_GT(std::abs(t), 2.58);
}

TEST(NonScar, PropensityMonotoneInSelectedFeature)
{
    const Dataset d = artif_scaled();
    const auto sa = non_scar_label(d, 0.5, 2);
    const Index j = sa.selected_features[0];
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < d.y.size(); ++i) {
        if (d.y[i]) pts.emplace_back(d.X(static_cast<Index>(i), j), sa.propensity(static_cast<Index>(i)));
    }
    std::sort(pts.begin(), pts.end());
    for (std::size_t k = 1; k < pts.size(); ++k) EXPECT_LE(pts[k - 1].second, pts[k].second + 1e-15);
}

TEST(NonScar, NearOneLabelsEveryPositive)
{
    const Dataset d = artif_scaled();
    const auto sa = non_scar_label(d, 1.0 - 1e-12, 4);
    EXPECT_EQ(sa.s, d.y);
    for (std::size_t i = 0; i < d.y.size(); ++i) {
        if (d.y[i]) {
            EXPECT_GE(sa.propensity(static_cast<Index>(i)), 1.0 - 1e-9);
        }
    }
}

TEST(NonScar, FallsBackPastFeatureConstantOnPositives)
{
    Rng rng(5);
    const Index n = 2000;
    Matrix X(n, 2);
    Labels y(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        const bool pos = i % 2 == 0;
        y[static_cast<std::size_t>(i)] = pos;
        X(i, 0) = pos ? 0.0 : 10.0 * standard_normal(rng);
        X(i, 1) = uniform01(rng);
    }
    const auto sa = non_scar_label(X, y, 0.4, 8);
    EXPECT_EQ(sa.selected_features, (std::vector<Index>{1}));
    EXPECT_NEAR(sa.realized_c, 0.4, 0.05);

    Matrix flat = X;
    for (Index i = 0; i < n; i += 2) flat(i, 1) = 0.5;
    EXPECT_THROW(non_scar_label(flat, y, 0.4, 8), Error);
}

TEST(NonScar, SeveralVariables)
{
    const Dataset d = artif_scaled();
    const auto sa = non_scar_label(d, 0.3, 6, 3);
    EXPECT_EQ(sa.selected_features.size(), 3u);
    EXPECT_NEAR(sa.realized_c, 0.3, 0.05);
}

TEST(NonScar, Errors)
{
    const Dataset d = artif_scaled();
    EXPECT_THROW(non_scar_label(d, 1.0, 1), Error);
    EXPECT_THROW(non_scar_label(d, 0.0, 1), Error);
    EXPECT_THROW(non_scar_label(d.X.topRows(3), Labels{1, 0, 0}, 0.5, 1), Error);
}

TEST(Labelling, Deterministic)
{
    const Dataset d = artif_scaled();
    EXPECT_EQ(non_scar_label(d, 0.5, 99).s, non_scar_label(d, 0.5, 99).s);
    EXPECT_NE(non_scar_label(d, 0.5, 99).s, non_scar_label(d, 0.5, 100).s);
    EXPECT_EQ(scar_label(d, 0.5, 99).s, scar_label(d, 0.5, 99).s);
}

TEST(Labelling, SchemeNames)
{
    EXPECT_EQ(parse_label_scheme("SCAR"), LabelScheme::Scar);
    EXPECT_EQ(parse_label_scheme("nonscar"), LabelScheme::NonScar);
    EXPECT_EQ(parse_label_scheme(to_string(LabelScheme::NonScar)), LabelScheme::NonScar);
    EXPECT_THROW(parse_label_scheme("sar"), Error);
}
