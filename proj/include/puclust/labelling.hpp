#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "common.hpp"
#include "data.hpp"

namespace puclust {

enum class LabelScheme { Scar, NonScar };

inline std::string to_string(LabelScheme s)
{
    return s == LabelScheme::Scar ? "SCAR" : "NONSCAR";
}

inline LabelScheme parse_label_scheme(const std::string& text)
{
    if (text == "SCAR" || text == "scar") return LabelScheme::Scar;
    if (text == "NONSCAR" || text == "nonscar" || text == "NON_SCAR" || text == "non-scar") return LabelScheme::NonScar;
    throw Error("unknown labelling scheme '" + text + "'");
}

/// Observed PU labels. Only positives can carry s = 1.
struct SurrogateAssignment
{
    Labels s;
    double realized_c = 0.0;
    LabelScheme scheme = LabelScheme::Scar;
    std::uint64_t seed = 0;
    /// P(S = 1 | x, Y = 1) used for each row; 0 on negatives.
    Vector propensity;
    /// Features that drove the propensity (non-SCAR only).
    std::vector<Index> selected_features;
};

/// Label frequency sum(s) / sum(y).
inline double empirical_c(std::span<const int> s, std::span<const int> y)
{
    if (s.size() != y.size()) throw Error("empirical_c: length mismatch");
    const std::size_t n_pos = count_ones(y);
    if (n_pos == 0) throw Error("empirical_c: no positives");
    return static_cast<double>(count_ones(s)) / static_cast<double>(n_pos);
}

inline double empirical_c(const SurrogateAssignment& sa, const Dataset& ds)
{
    return empirical_c(sa.s, ds.y);
}

/// Selected completely at random: every positive is labelled independently
/// with probability c.
inline SurrogateAssignment scar_label(std::span<const int> y, double c, std::uint64_t seed)
{
    if (!(c > 0.0 && c <= 1.0)) throw Error("scar_label: c must lie in (0, 1]");
    check_binary(y, "scar_label");
    if (count_ones(y) == 0) throw Error("scar_label: dataset has no positives");

    Rng rng(seed);
    SurrogateAssignment sa;
    sa.scheme = LabelScheme::Scar;
    sa.seed = seed;
    sa.s.assign(y.size(), 0);
    sa.propensity = Vector::Zero(static_cast<Index>(y.size()));
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 1) {
            sa.propensity(static_cast<Index>(i)) = c;
            sa.s[i] = bernoulli(rng, c) ? 1 : 0;
        }
    }
    sa.realized_c = empirical_c(sa.s, y);
    return sa;
}

inline SurrogateAssignment scar_label(const Dataset& ds, double c, std::uint64_t seed)
{
    return scar_label(ds.y, c, seed);
}

/// Feature-dependent labelling at a target label frequency.
///
/// The n_vars highest-variance features (skipping any that are constant over
/// the positives) are summed into a per-positive value v. Each positive is
/// scored by the cumulative sum of (v - min v) over all positives whose value
/// does not exceed its own, so the score is a monotone function of v. The
/// score is min-max normalized to z in [0, 1] and mapped to a propensity
/// e = c_target + a (z - mean z), with the slope a as steep as possible
/// while keeping e inside [0, 1]. After clipping, the offset is re-centred
/// once so the mean propensity over positives is c_target. Labels are then
/// drawn s ~ Bernoulli(e) on positives.
inline SurrogateAssignment non_scar_label(const Matrix& X, std::span<const int> y, double c_target,
                                          std::uint64_t seed, std::size_t n_vars = 1)
{
    if (!(c_target > 0.0 && c_target < 1.0)) throw Error("non_scar_label: c_target must lie in (0, 1)");
    if (static_cast<std::size_t>(X.rows()) != y.size()) throw Error("non_scar_label: X/y size mismatch");
    if (n_vars == 0) throw Error("non_scar_label: n_vars must be positive");
    check_binary(y, "non_scar_label");

    std::vector<Index> pos;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 1) pos.push_back(static_cast<Index>(i));
    }
    if (pos.size() < 2) throw Error("non_scar_label: need at least two positives");

    // features by decreasing variance over all rows
    const Index p = X.cols();
    Vector var(p);
    for (Index j = 0; j < p; ++j) var(j) = (X.col(j).array() - X.col(j).mean()).square().mean();
    std::vector<Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return var(a) > var(b); });

    std::vector<Index> selected;
    for (Index j : order) {
        if (selected.size() == n_vars) break;
        double lo = X(pos[0], j), hi = lo;
        for (Index i : pos) {
            lo = std::min(lo, X(i, j));
            hi = std::max(hi, X(i, j));
        }
        if (hi > lo) selected.push_back(j);
    }
    if (selected.empty()) throw Error("non_scar_label: every feature is constant over the positives");

    const std::size_t m = pos.size();
    std::vector<double> v(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        for (Index j : selected) v[k] += X(pos[k], j);
    }
    const double vmin = *std::min_element(v.begin(), v.end());

    std::vector<std::size_t> by_value(m);
    std::iota(by_value.begin(), by_value.end(), std::size_t{0});
    std::stable_sort(by_value.begin(), by_value.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });

    // cumulative sums; tied values share the score of their whole tie group
    std::vector<double> z(m, 0.0);
    double running = 0.0;
    for (std::size_t k = 0; k < m;) {
        std::size_t end = k;
        while (end < m && v[by_value[end]] == v[by_value[k]]) running += v[by_value[end++]] - vmin;
        for (std::size_t t = k; t < end; ++t) z[by_value[t]] = running;
        k = end;
    }
    const double zmin = *std::min_element(z.begin(), z.end());
    const double zmax = *std::max_element(z.begin(), z.end());
    double zmean = 0.0;
    for (double& zi : z) {
        zi = (zi - zmin) / (zmax - zmin);
        zmean += zi;
    }
    zmean /= static_cast<double>(m);

    const double slope = std::min(c_target / zmean, (1.0 - c_target) / (1.0 - zmean));
    double offset = c_target - slope * zmean;
    auto propensities = [&](double b) {
        std::vector<double> e(m);
        double mean = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            e[k] = std::clamp(slope * z[k] + b, 0.0, 1.0);
            mean += e[k];
        }
        return std::pair{e, mean / static_cast<double>(m)};
    };
    auto [e, mean_e] = propensities(offset);
    offset += c_target - mean_e;
    e = propensities(offset).first;

    Rng rng(seed);
    SurrogateAssignment sa;
    sa.scheme = LabelScheme::NonScar;
    sa.seed = seed;
    sa.selected_features = selected;
    sa.s.assign(y.size(), 0);
    sa.propensity = Vector::Zero(static_cast<Index>(y.size()));
    for (std::size_t k = 0; k < m; ++k) {
        sa.propensity(pos[k]) = e[k];
        sa.s[static_cast<std::size_t>(pos[k])] = bernoulli(rng, e[k]) ? 1 : 0;
    }
    sa.realized_c = empirical_c(sa.s, y);
    return sa;
}

inline SurrogateAssignment non_scar_label(const Dataset& ds, double c_target, std::uint64_t seed,
                                          std::size_t n_vars = 1)
{
    return non_scar_label(ds.X, ds.y, c_target, seed, n_vars);
}

} // namespace puclust
