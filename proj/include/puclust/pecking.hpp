#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "cluster.hpp"
#include "common.hpp"
#include "glm.hpp"
#include "lassojoint.hpp"

namespace puclust {

enum class PeckMode { Clust, Strict, NonStrict };

inline std::string to_string(PeckMode m)
{
    switch (m) {
    case PeckMode::Clust: return "CLUST";
    case PeckMode::Strict: return "STRICT";
    case PeckMode::NonStrict: return "NONSTRICT";
    }
    return "?";
}

/// Labels after one cluster-cleaning pass.
struct CleanedLabels
{
    Labels y_hat;
    /// Rows (original indices) of the cluster designated positive.
    std::vector<Index> cluster_pos_indices;
    /// Labelled rows that were mixed into the unlabelled pool.
    std::vector<Index> pecked_indices;
};

struct PeckedModel
{
    PeckMode mode = PeckMode::Clust;
    Coefficients coefficients;
    std::vector<Coefficients> per_rep;
    double q = 1.0;
    int R = 0;
};

struct PeckingOptions
{
    TwoMeansOptions clustering;
    LogisticOptions logistic;
    LassoJointOptions lasso_joint;
};

class PeckingError : public Error
{
public:
    PeckingError(int rep, const std::string& what)
        : Error("pecking repetition " + std::to_string(rep) + ": " + what), rep_(rep)
    {
    }
    int rep() const { return rep_; }

private:
    int rep_;
};

/// ceil(q * n_labelled), at least 1. The small slack keeps products such as
/// 0.3 * 10 from rounding up past the integer.
inline std::size_t peck_count(double q, std::size_t n_labelled)
{
    const double raw = std::ceil(q * static_cast<double>(n_labelled) - 1e-9);
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(raw, 1.0)), 1, n_labelled);
}

/// One cleaning pass: mix a q-fraction of the labelled rows into the
/// unlabelled rows, split that pool with 2-means, and call positive the
/// cluster holding more of the mixed-in labelled rows (on a tie, the cluster
/// whose centroid is nearer the mean of all labelled rows). Every labelled
/// row keeps y_hat = 1.
inline CleanedLabels peck_once(const Matrix& X, std::span<const int> s, double q, std::uint64_t seed,
                               const TwoMeansOptions& clustering = {})
{
    if (static_cast<std::size_t>(X.rows()) != s.size()) throw Error("peck_once: X/s size mismatch");
    if (!(q > 0.0 && q <= 1.0)) throw Error("peck_once: q must lie in (0, 1]");
    check_binary(s, "peck_once");

    std::vector<Index> labelled, unlabelled;
    for (std::size_t i = 0; i < s.size(); ++i) (s[i] == 1 ? labelled : unlabelled).push_back(static_cast<Index>(i));
    if (labelled.empty()) throw Error("peck_once: no labelled examples");

    // partial Fisher-Yates draw without replacement
    Rng rng(derive_seed(seed, 0));
    const std::size_t k = peck_count(q, labelled.size());
    std::vector<Index> pool = labelled;
    for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + uniform_index(rng, pool.size() - i)]);
    CleanedLabels out;
    out.pecked_indices.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(out.pecked_indices.begin(), out.pecked_indices.end());

    std::vector<Index> members = unlabelled;
    members.insert(members.end(), out.pecked_indices.begin(), out.pecked_indices.end());
    std::sort(members.begin(), members.end());
    const Clustering cl = two_means(select_rows(X, members), derive_seed(seed, 1), clustering);

    std::array<std::size_t, 2> seeded{0, 0};
    for (std::size_t m = 0; m < members.size(); ++m) {
        if (s[static_cast<std::size_t>(members[m])] == 1) ++seeded[static_cast<std::size_t>(cl.assignment[m])];
    }
    int positive_cluster;
    if (seeded[0] != seeded[1]) {
        positive_cluster = seeded[1] > seeded[0] ? 1 : 0;
    } else {
        Eigen::RowVectorXd anchor = Eigen::RowVectorXd::Zero(X.cols());
        for (Index i : labelled) anchor += X.row(i);
        anchor /= static_cast<double>(labelled.size());
        const double d0 = (cl.centroids.row(0) - anchor).squaredNorm();
        const double d1 = (cl.centroids.row(1) - anchor).squaredNorm();
        positive_cluster = d1 < d0 ? 1 : 0;
    }

    out.y_hat.assign(s.begin(), s.end());
    for (std::size_t m = 0; m < members.size(); ++m) {
        if (cl.assignment[m] == positive_cluster) {
            out.cluster_pos_indices.push_back(members[m]);
            out.y_hat[static_cast<std::size_t>(members[m])] = 1;
        }
    }
    return out;
}

/// Combine per-repetition coefficients.
///   CLUST:     element-wise mean over all repetitions.
///   STRICT:    features nonzero in every repetition, averaged over all R.
///   NONSTRICT: features nonzero in any repetition, averaged over the
///              repetitions where they are nonzero.
/// The intercept is always the mean over all repetitions.
inline Coefficients aggregate_coefficients(std::span<const Coefficients> per_rep, PeckMode mode)
{
    if (per_rep.empty()) throw Error("aggregate_coefficients: no repetitions");
    const Index p = per_rep.front().beta.size();
    for (const auto& c : per_rep) {
        if (c.beta.size() != p) throw Error("aggregate_coefficients: arity mismatch between repetitions");
    }
    const double R = static_cast<double>(per_rep.size());

    Coefficients out = Coefficients::zeros(p);
    out.converged = true;
    double intercept = 0.0;
    for (const auto& c : per_rep) {
        intercept += c.intercept;
        out.converged = out.converged && c.converged;
        out.separated = out.separated || c.separated;
    }
    out.intercept = intercept / R;

    for (Index j = 0; j < p; ++j) {
        double sum = 0.0;
        std::size_t present = 0;
        for (const auto& c : per_rep) {
            sum += c.beta(j);
            present += c.beta(j) != 0.0;
        }
        switch (mode) {
        case PeckMode::Clust:
            out.beta(j) = sum / R;
            break;
        case PeckMode::Strict:
            out.beta(j) = present == per_rep.size() ? sum / R : 0.0;
            break;
        case PeckMode::NonStrict:
            out.beta(j) = present > 0 ? sum / static_cast<double>(present) : 0.0;
            break;
        }
    }
    return out;
}

/// Which model is fitted to each repetition's cleaned labels.
enum class PeckFitter { Logistic, LassoJoint };

inline PeckFitter fitter_for(PeckMode mode)
{
    return mode == PeckMode::Clust ? PeckFitter::Logistic : PeckFitter::LassoJoint;
}

/// R cleaning passes, each followed by a fit on (X, y_hat). Repetition r
/// (1-based) draws everything from derive_seed(seed, r).
inline std::vector<Coefficients> pecking_replicates(const Matrix& X, std::span<const int> s, double q, int R,
                                                    PeckFitter fitter, std::uint64_t seed,
                                                    const PeckingOptions& opt = {})
{
    if (R < 1) throw Error("run_pecking: R must be positive");
    std::vector<Coefficients> reps;
    reps.reserve(static_cast<std::size_t>(R));
    for (int r = 1; r <= R; ++r) {
        const std::uint64_t rep_seed = derive_seed(seed, static_cast<std::uint64_t>(r));
        try {
            const CleanedLabels cleaned = peck_once(X, s, q, rep_seed, opt.clustering);
            if (fitter == PeckFitter::Logistic) {
                reps.push_back(fit_logistic(X, cleaned.y_hat, opt.logistic));
            } else {
                reps.push_back(fit_lasso_joint(X, cleaned.y_hat, derive_seed(rep_seed, 2), opt.lasso_joint).coefficients);
            }
        } catch (const PeckingError&) {
            throw;
        } catch (const std::exception& e) {
            throw PeckingError(r, e.what());
        }
    }
    return reps;
}

inline PeckedModel run_pecking(const Matrix& X, std::span<const int> s, double q, int R, PeckMode mode,
                               std::uint64_t seed, const PeckingOptions& opt = {})
{
    PeckedModel m;
    m.mode = mode;
    m.q = q;
    m.R = R;
    m.per_rep = pecking_replicates(X, s, q, R, fitter_for(mode), seed, opt);
    m.coefficients = aggregate_coefficients(m.per_rep, mode);
    return m;
}

} // namespace puclust
