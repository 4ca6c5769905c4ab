#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "common.hpp"
#include "glm_core.hpp"

namespace puclust {

// ---------------------------------------------------------------------------
// Unpenalized logistic regression
// ---------------------------------------------------------------------------

struct LogisticOptions
{
    int max_iter = 100;
    double tol = 1e-8;
    /// Iterates whose ||beta|| exceeds this are returned flagged as separated.
    double separation_norm = 1e3;
};

namespace detail {

inline void validate_fit_input(const Matrix& X, std::span<const int> labels, const char* who)
{
    if (static_cast<std::size_t>(X.rows()) != labels.size()) {
        throw Error(std::string(who) + ": X has " + std::to_string(X.rows()) + " rows but " +
                    std::to_string(labels.size()) + " labels");
    }
    if (labels.size() < 2) throw Error(std::string(who) + ": need at least two observations");
    check_binary(labels, who);
    const std::size_t ones = count_ones(labels);
    if (ones == 0 || ones == labels.size()) throw Error(std::string(who) + ": labels contain a single class");
    if (!X.allFinite()) throw Error(std::string(who) + ": non-finite feature value");
}

inline Vector to_vector(std::span<const int> labels)
{
    Vector v(static_cast<Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) v(static_cast<Index>(i)) = labels[i];
    return v;
}

/// Mean negative log-likelihood for linear predictor eta.
inline double mean_logistic_loss(const Vector& eta, const Vector& y)
{
    double acc = 0.0;
    for (Index i = 0; i < eta.size(); ++i) acc += softplus(eta(i)) - y(i) * eta(i);
    return acc / static_cast<double>(eta.size());
}

inline Matrix with_intercept(const Matrix& X)
{
    Matrix X1(X.rows(), X.cols() + 1);
    X1.col(0).setOnes();
    X1.rightCols(X.cols()) = X;
    return X1;
}

inline double logit(double p)
{
    return std::log(p / (1.0 - p));
}

} // namespace detail

/// R(beta) = -(1/n) sum [y log sigma(eta) + (1 - y) log(1 - sigma(eta))].
inline double logistic_loss(const Matrix& X, std::span<const int> labels, const Coefficients& coef)
{
    return detail::mean_logistic_loss(linear_predictor(coef, X), detail::to_vector(labels));
}

/// Gradient of logistic_loss; entry 0 is the intercept.
inline Vector logistic_gradient(const Matrix& X, std::span<const int> labels, const Coefficients& coef)
{
    const Vector eta = linear_predictor(coef, X);
    Vector r(eta.size());
    for (Index i = 0; i < eta.size(); ++i) r(i) = sigmoid(eta(i)) - labels[static_cast<std::size_t>(i)];
    Vector g(X.cols() + 1);
    g(0) = r.sum();
    g.tail(X.cols()) = X.transpose() * r;
    return g / static_cast<double>(X.rows());
}

/// Maximum-likelihood logistic regression by Newton-Raphson (IRLS) with
/// backtracking.
inline Coefficients fit_logistic(const Matrix& X, std::span<const int> labels, const LogisticOptions& opt = {})
{
    detail::validate_fit_input(X, labels, "fit_logistic");
    const Index n = X.rows();
    const Index p = X.cols();
    const Vector y = detail::to_vector(labels);
    const Matrix X1 = detail::with_intercept(X);

    Vector theta = Vector::Zero(p + 1);
    theta(0) = detail::logit(y.mean());
    Vector eta = X1 * theta;
    double loss = detail::mean_logistic_loss(eta, y);

    Coefficients out;
    out.converged = false;
    for (int it = 1; it <= opt.max_iter; ++it) {
        out.iterations = it;
        Vector w(n), r(n);
        for (Index i = 0; i < n; ++i) {
            const double pr = sigmoid(eta(i));
            w(i) = pr * (1.0 - pr);
            r(i) = pr - y(i);
        }
        const Vector g = X1.transpose() * r / static_cast<double>(n);
        Matrix H = X1.transpose() * w.asDiagonal() * X1 / static_cast<double>(n);
        Eigen::LDLT<Matrix> ldlt(H);
        Vector step = -ldlt.solve(g);
        if (ldlt.info() != Eigen::Success || !step.allFinite() || g.dot(step) >= 0.0) {
            H.diagonal().array() += 1e-8 * (1.0 + H.diagonal().maxCoeff());
            step = -H.ldlt().solve(g);
        }
        const double slope = g.dot(step);
        double t = 1.0;
        Vector candidate = theta + step;
        Vector eta_new = X1 * candidate;
        double loss_new = detail::mean_logistic_loss(eta_new, y);
        while (loss_new > loss + 1e-4 * t * slope && t > 1e-10) {
            t *= 0.5;
            candidate = theta + t * step;
            eta_new = X1 * candidate;
            loss_new = detail::mean_logistic_loss(eta_new, y);
        }
        if (loss_new > loss) break;  // no progress possible
        const double moved = (t * step).cwiseAbs().maxCoeff();
        theta = std::move(candidate);
        eta = std::move(eta_new);
        loss = loss_new;
        if (theta.tail(p).norm() > opt.separation_norm) {
            out.separated = true;
            break;
        }
        if (moved <= opt.tol * (1.0 + theta.cwiseAbs().maxCoeff())) {
            out.converged = true;
            break;
        }
    }
    if (!out.separated) {
        // a finite optimum never separates the classes, so a separating fit
        // means the likelihood has no maximizer
        double lo_pos = INFINITY, hi_neg = -INFINITY;
        for (Index i = 0; i < n; ++i) {
            if (y(i) > 0.5) {
                lo_pos = std::min(lo_pos, eta(i));
            } else {
                hi_neg = std::max(hi_neg, eta(i));
            }
        }
        out.separated = lo_pos > hi_neg;
    }
    out.intercept = theta(0);
    out.beta = theta.tail(p);
    return out;
}

// ---------------------------------------------------------------------------
// L1-penalized logistic regression
// ---------------------------------------------------------------------------

struct LassoOptions
{
    int max_iter = 100;      // proximal Newton steps
    int max_sweeps = 10000;  // coordinate sweeps per step
    double tol = 1e-9;
};

namespace detail {

/// Columns centred and scaled to unit (population) variance. Constant
/// columns get scale 0 and are held at a zero coefficient.
struct Standardized
{
    Matrix Z;
    Vector center;
    Vector scale;
};

inline Standardized standardize(const Matrix& X)
{
    Standardized s;
    const Index n = X.rows();
    s.center = X.colwise().mean().transpose();
    s.scale.resize(X.cols());
    s.Z.resize(n, X.cols());
    for (Index j = 0; j < X.cols(); ++j) {
        const Vector c = X.col(j).array() - s.center(j);
        const double sd = std::sqrt(c.squaredNorm() / static_cast<double>(n));
        s.scale(j) = sd > 1e-12 * (1.0 + std::abs(s.center(j))) ? sd : 0.0;
        s.Z.col(j) = s.scale(j) > 0.0 ? Vector(c / s.scale(j)) : Vector::Zero(n);
    }
    return s;
}

inline double soft_threshold(double x, double lambda)
{
    if (x > lambda) return x - lambda;
    if (x < -lambda) return x + lambda;
    return 0.0;
}

/// Solver state in standardized coordinates; doubles as the warm start.
struct LassoState
{
    double intercept = 0.0;
    Vector gamma;
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;
};

inline double lasso_objective(const Matrix& Z, const Vector& y, double b0, const Vector& gamma, double lambda)
{
    const Vector eta = (Z * gamma).array() + b0;
    return mean_logistic_loss(eta, y) + lambda * gamma.lpNorm<1>();
}

/// Proximal Newton: each outer step builds the weighted least-squares
/// model at the current iterate, solves its penalized version by cyclic
/// coordinate descent on the Gram matrix, then backtracks on the true
/// penalized objective so every step is a descent step.
inline void lasso_solve(const Matrix& Z, const Vector& y, const Vector& scale, double lambda, LassoState& st,
                        const LassoOptions& opt)
{
    const Index n = Z.rows();
    const Index p = Z.cols();
    const double inv_n = 1.0 / static_cast<double>(n);
    if (st.gamma.size() != p) st.gamma = Vector::Zero(p);

    Vector eta = (Z * st.gamma).array() + st.intercept;
    double objective = mean_logistic_loss(eta, y) + lambda * st.gamma.lpNorm<1>();
    st.converged = false;
    st.objective_trace.push_back(objective);

    Vector w(n), work(n);
    for (int it = 1; it <= opt.max_iter; ++it) {
        st.iterations = it;
        for (Index i = 0; i < n; ++i) {
            const double pr = sigmoid(eta(i));
            w(i) = std::max(pr * (1.0 - pr), 1e-5);
            work(i) = eta(i) + (y(i) - pr) / w(i);
        }
        const Matrix G = Z.transpose() * w.asDiagonal() * Z * inv_n;
        const Vector zw = Z.transpose() * w * inv_n;
        const Vector zr = Z.transpose() * w.cwiseProduct(work) * inv_n;
        const double sw = w.sum() * inv_n;
        const double wr = w.dot(work) * inv_n;

        double b0 = st.intercept;
        Vector gamma = st.gamma;
        Vector h = G * gamma;
        for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
            double max_delta = 0.0;
            const double b0_new = (wr - zw.dot(gamma)) / sw;
            max_delta = std::max(max_delta, sw * (b0_new - b0) * (b0_new - b0));
            b0 = b0_new;
            for (Index j = 0; j < p; ++j) {
                if (scale(j) <= 0.0) continue;
                const double gjj = G(j, j);
                if (gjj <= 0.0) continue;
                const double partial = zr(j) - zw(j) * b0 - (h(j) - gjj * gamma(j));
                const double next = soft_threshold(partial, lambda) / gjj;
                const double delta = next - gamma(j);
                if (delta != 0.0) {
                    h += G.col(j) * delta;
                    gamma(j) = next;
                    max_delta = std::max(max_delta, gjj * delta * delta);
                }
            }
            if (max_delta < opt.tol * opt.tol) break;
        }

        const double d0 = b0 - st.intercept;
        const Vector dg = gamma - st.gamma;
        double t = 1.0;
        double next_obj = 0.0;
        Vector next_eta;
        for (;;) {
            next_eta = (Z * (st.gamma + t * dg)).array() + (st.intercept + t * d0);
            next_obj = mean_logistic_loss(next_eta, y) + lambda * (st.gamma + t * dg).lpNorm<1>();
            if (next_obj <= objective || t < 1e-10) break;
            t *= 0.5;
        }
        if (next_obj > objective) {
            // numerically at the optimum
            st.converged = true;
            break;
        }
        const double moved = std::max(std::abs(t * d0), (t * dg).cwiseAbs().maxCoeff());
        st.intercept += t * d0;
        st.gamma += t * dg;
        eta = std::move(next_eta);
        objective = next_obj;
        st.objective_trace.push_back(objective);
        if (moved < opt.tol) {
            st.converged = true;
            break;
        }
    }
}

/// Smallest lambda at which every standardized coefficient is zero.
inline double lambda_max_standardized(const Matrix& Z, const Vector& y)
{
    const double ybar = y.mean();
    const Vector r = y.array() - ybar;
    return (Z.transpose() * r).cwiseAbs().maxCoeff() / static_cast<double>(Z.rows());
}

inline Coefficients to_original_scale(const Standardized& s, const LassoState& st)
{
    Coefficients c;
    c.beta = Vector::Zero(s.scale.size());
    for (Index j = 0; j < s.scale.size(); ++j) {
        if (s.scale(j) > 0.0 && st.gamma(j) != 0.0) c.beta(j) = st.gamma(j) / s.scale(j);
    }
    c.intercept = st.intercept - c.beta.dot(s.center);
    c.converged = st.converged;
    c.iterations = st.iterations;
    return c;
}

} // namespace detail

/// Smallest lambda that zeroes every coefficient (features standardized).
inline double lambda_max(const Matrix& X, std::span<const int> labels)
{
    detail::validate_fit_input(X, labels, "lambda_max");
    const auto s = detail::standardize(X);
    return detail::lambda_max_standardized(s.Z, detail::to_vector(labels));
}

/// Minimizes R(beta) + lambda * sum |beta_j| with features standardized
/// internally (penalty acts on standardized coefficients) and the intercept
/// unpenalized. Coefficients are returned on the original feature scale.
inline Coefficients fit_lasso(const Matrix& X, std::span<const int> labels, double lambda,
                              const LassoOptions& opt = {})
{
    detail::validate_fit_input(X, labels, "fit_lasso");
    if (!(lambda >= 0.0)) throw Error("fit_lasso: lambda must be non-negative");
    const Vector y = detail::to_vector(labels);
    const auto s = detail::standardize(X);

    detail::LassoState st;
    st.intercept = detail::logit(y.mean());
    st.gamma = Vector::Zero(X.cols());
    if (lambda >= detail::lambda_max_standardized(s.Z, y)) {
        st.converged = true;
    } else {
        detail::lasso_solve(s.Z, y, s.scale, lambda, st, opt);
    }
    Coefficients c = detail::to_original_scale(s, st);
    c.lambda = lambda;
    return c;
}

// ---------------------------------------------------------------------------
// Cross-validated lambda
// ---------------------------------------------------------------------------

struct CvOptions
{
    int n_folds = 10;
    int grid_size = 100;
    double lambda_min_ratio = 1e-4;
    LassoOptions lasso;
};

struct LambdaSelection
{
    std::vector<double> lambda_grid;   // strictly descending
    std::vector<double> cv_mean_loss;  // mean held-out deviance per lambda
    double lambda_min = 0.0;
    std::size_t min_index = 0;
    int n_folds_used = 0;
};

/// Stratified fold id per observation, folds in [0, n_folds).
inline std::vector<int> stratified_folds(std::span<const int> labels, int n_folds, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<int> fold(labels.size(), 0);
    for (int cls = 0; cls <= 1; ++cls) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) idx.push_back(i);
        }
        for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[uniform_index(rng, i)]);
        for (std::size_t k = 0; k < idx.size(); ++k) fold[idx[k]] = static_cast<int>(k % static_cast<std::size_t>(n_folds));
    }
    return fold;
}

/// K-fold cross-validation over a log-spaced grid from lambda_max down to
/// lambda_max * lambda_min_ratio, warm-starting along the path within each
/// fold. lambda_min minimizes the mean held-out binomial deviance (ties go
/// to the larger lambda). When the minority class has fewer members than
/// n_folds, the fold count is reduced to that size.
inline LambdaSelection cv_select_lambda(const Matrix& X, std::span<const int> labels, std::uint64_t seed,
                                        const CvOptions& opt = {})
{
    detail::validate_fit_input(X, labels, "cv_select_lambda");
    if (opt.grid_size < 2) throw Error("cv_select_lambda: grid_size must be at least 2");
    const std::size_t n_pos = count_ones(labels);
    const std::size_t n_min = std::min(n_pos, labels.size() - n_pos);
    const int folds = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(opt.n_folds), n_min));
    if (folds < 2) throw Error("cv_select_lambda: fewer than two members in the minority class");

    LambdaSelection sel;
    sel.n_folds_used = folds;
    const Vector y = detail::to_vector(labels);
    {
        const auto s = detail::standardize(X);
        const double top = detail::lambda_max_standardized(s.Z, y);
        const int K = opt.grid_size;
        for (int k = 0; k < K; ++k) {
            sel.lambda_grid.push_back(top * std::pow(opt.lambda_min_ratio, static_cast<double>(k) / (K - 1)));
        }
    }
    const std::size_t K = sel.lambda_grid.size();
    std::vector<double> deviance(K, 0.0);
    const auto fold = stratified_folds(labels, folds, seed);

    for (int f = 0; f < folds; ++f) {
        std::vector<Index> train, test;
        for (std::size_t i = 0; i < labels.size(); ++i) (fold[i] == f ? test : train).push_back(static_cast<Index>(i));
        const Matrix Xtr = select_rows(X, train);
        const Matrix Xte = select_rows(X, test);
        Vector ytr(static_cast<Index>(train.size()));
        for (std::size_t i = 0; i < train.size(); ++i) ytr(static_cast<Index>(i)) = y(train[i]);
        const auto s = detail::standardize(Xtr);
        const double fold_top = detail::lambda_max_standardized(s.Z, ytr);

        detail::LassoState st;
        st.intercept = detail::logit(ytr.mean());
        st.gamma = Vector::Zero(X.cols());
        for (std::size_t k = 0; k < K; ++k) {
            if (sel.lambda_grid[k] < fold_top) detail::lasso_solve(s.Z, ytr, s.scale, sel.lambda_grid[k], st, opt.lasso);
            st.objective_trace.clear();
            const Coefficients c = detail::to_original_scale(s, st);
            const Vector eta = linear_predictor(c, Xte);
            double dev = 0.0;
            for (std::size_t i = 0; i < test.size(); ++i) {
                const double pr = std::clamp(sigmoid(eta(static_cast<Index>(i))), 1e-5, 1.0 - 1e-5);
                dev += y(test[i]) > 0.5 ? -2.0 * std::log(pr) : -2.0 * std::log(1.0 - pr);
            }
            deviance[k] += dev;
        }
    }
    sel.cv_mean_loss.resize(K);
    for (std::size_t k = 0; k < K; ++k) sel.cv_mean_loss[k] = deviance[k] / static_cast<double>(labels.size());
    sel.min_index = static_cast<std::size_t>(
        std::min_element(sel.cv_mean_loss.begin(), sel.cv_mean_loss.end()) - sel.cv_mean_loss.begin());
    sel.lambda_min = sel.lambda_grid[sel.min_index];
    return sel;
}

/// { j : beta_j != 0 and |beta_j| >= delta }
inline std::vector<Index> threshold_support(const Coefficients& coef, double delta)
{
    if (!(delta >= 0.0)) throw Error("threshold_support: delta must be non-negative");
    std::vector<Index> out;
    for (Index j = 0; j < coef.beta.size(); ++j) {
        if (coef.beta(j) != 0.0 && std::abs(coef.beta(j)) >= delta) out.push_back(j);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Joint (beta, c) model: P(S = 1 | x) = c * sigmoid(x'beta)
// ---------------------------------------------------------------------------

struct JointOptions
{
    int max_iter = 500;        // alternations
    int newton_steps = 5;      // Fisher-scoring steps per beta update
    double tol = 1e-10;
    double c_floor = 1e-3;
    /// Starting values for c; the best local optimum by likelihood wins.
    std::vector<double> c_starts{0.25, 0.5, 0.75, 1.0};
    /// Hold c at this value and optimize beta only.
    std::optional<double> fixed_c;
    double separation_norm = 1e3;
};

struct JointModel
{
    Coefficients coefficients;
    double c_hat = 1.0;
    double log_likelihood = 0.0;
    bool converged = false;
    int iterations = 0;
    std::vector<double> loglik_trace;
};

namespace detail {

/// log P(S = s | eta) under the joint model.
inline double joint_term(double eta, int s, double log_c, double log_1mc)
{
    if (s == 1) return log_c - softplus(-eta);
    // 1 - c sigma(eta) = (1 - c) + c sigma(-eta)
    return log_add_exp(log_1mc, log_c - softplus(eta));
}

inline double joint_loglik(const Vector& eta, std::span<const int> s, double c)
{
    const double log_c = std::log(c);
    const double log_1mc = c < 1.0 ? std::log1p(-c) : -INFINITY;
    double acc = 0.0;
    for (Index i = 0; i < eta.size(); ++i) acc += joint_term(eta(i), s[static_cast<std::size_t>(i)], log_c, log_1mc);
    return acc;
}

/// argmax over c in [floor, 1]; the log-likelihood is concave in c.
inline double best_c(const Vector& eta, std::span<const int> s, double floor)
{
    std::vector<double> q;
    std::size_t n1 = 0;
    for (Index i = 0; i < eta.size(); ++i) {
        if (s[static_cast<std::size_t>(i)] == 1) {
            ++n1;
        } else {
            q.push_back(sigmoid(eta(i)));
        }
    }
    auto slope = [&](double c) {
        double d = static_cast<double>(n1) / c;
        for (double qi : q) {
            const double denom = (1.0 - c) + c * (1.0 - qi);
            d -= denom > 0.0 ? qi / denom : INFINITY;
        }
        return d;
    };
    if (slope(1.0) >= 0.0) return 1.0;
    if (slope(floor) <= 0.0) return floor;
    double lo = floor, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (slope(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct JointRun
{
    Vector theta;
    double c = 1.0;
    double loglik = -INFINITY;
    bool converged = false;
    bool separated = false;
    int iterations = 0;
    std::vector<double> trace;
};

/// Fisher scoring on beta at fixed c, with backtracking so the likelihood
/// never decreases.
inline double joint_beta_step(const Matrix& X1, std::span<const int> s, double c, Vector& theta, Vector& eta,
                              double loglik, int steps)
{
    const Index n = X1.rows();
    for (int k = 0; k < steps; ++k) {
        Vector u(n), w(n);
        for (Index i = 0; i < n; ++i) {
            const double q = sigmoid(eta(i));
            const double r = sigmoid(-eta(i));
            const double rest = (1.0 - c) + c * r;
            if (s[static_cast<std::size_t>(i)] == 1) {
                u(i) = r;
            } else {
                u(i) = -c * q * r / rest;
            }
            w(i) = c * q * r * r / rest;
        }
        const Vector g = X1.transpose() * u;
        Matrix H = X1.transpose() * w.asDiagonal() * X1;
        H.diagonal().array() += 1e-10 * (1.0 + H.diagonal().maxCoeff());
        const Vector step = H.ldlt().solve(g);
        if (!step.allFinite()) break;
        const double slope = g.dot(step);
        if (slope <= 0.0) break;
        double t = 1.0;
        for (; t > 1e-10; t *= 0.5) {
            const Vector cand = theta + t * step;
            const Vector cand_eta = X1 * cand;
            const double ll = joint_loglik(cand_eta, s, c);
            if (ll >= loglik + 1e-4 * t * slope) {
                theta = cand;
                eta = cand_eta;
                loglik = ll;
                break;
            }
        }
        if (t <= 1e-10) break;
        if ((t * step).cwiseAbs().maxCoeff() < 1e-12) break;
    }
    return loglik;
}

inline JointRun joint_from_start(const Matrix& X1, std::span<const int> s, Vector theta, double c,
                                 const JointOptions& opt)
{
    JointRun run;
    Vector eta = X1 * theta;
    double ll = joint_loglik(eta, s, c);
    run.trace.push_back(ll);
    for (int it = 1; it <= opt.max_iter; ++it) {
        run.iterations = it;
        const double before = ll;
        ll = joint_beta_step(X1, s, c, theta, eta, ll, opt.newton_steps);
        if (!opt.fixed_c) {
            const double c_new = best_c(eta, s, opt.c_floor);
            const double ll_new = joint_loglik(eta, s, c_new);
            if (ll_new >= ll) {
                c = c_new;
                ll = ll_new;
            }
        }
        run.trace.push_back(ll);
        if (theta.tail(theta.size() - 1).norm() > opt.separation_norm) {
            run.separated = true;
            break;
        }
        if (ll - before <= opt.tol * (1.0 + std::abs(ll))) {
            run.converged = true;
            break;
        }
    }
    run.theta = std::move(theta);
    run.c = c;
    run.loglik = ll;
    return run;
}

} // namespace detail

/// Log-likelihood of surrogate labels s under P(S = 1 | x) = c sigmoid(x'beta).
inline double joint_log_likelihood(const Matrix& X, std::span<const int> s, const Coefficients& coef, double c)
{
    return detail::joint_loglik(linear_predictor(coef, X), s, c);
}

/// Maximum-likelihood (beta, c) for PU data under SCAR. Alternates a
/// Fisher-scoring update of beta at fixed c with an exact 1-D maximization
/// over c in [c_floor, 1], from each configured starting c; beta starts from
/// the naive fit on s shifted by -log(c). An empty feature matrix gives an
/// intercept-only model.
inline JointModel fit_joint(const Matrix& X, std::span<const int> s, const JointOptions& opt = {})
{
    if (static_cast<std::size_t>(X.rows()) != s.size()) throw Error("fit_joint: X/s size mismatch");
    check_binary(s, "fit_joint");
    const std::size_t ones = count_ones(s);
    if (ones == 0) throw Error("fit_joint: no labelled observations (all s = 0)");
    if (!X.allFinite()) throw Error("fit_joint: non-finite feature value");
    if (opt.fixed_c && !(*opt.fixed_c > 0.0 && *opt.fixed_c <= 1.0)) throw Error("fit_joint: fixed c outside (0, 1]");

    const Matrix X1 = detail::with_intercept(X);
    Vector naive = Vector::Zero(X1.cols());
    if (ones < s.size()) {
        LogisticOptions lo;
        const Coefficients c0 = fit_logistic(X, s, lo);
        naive(0) = c0.intercept;
        naive.tail(X.cols()) = c0.beta;
    } else {
        naive(0) = 10.0;
    }

    std::vector<double> starts = opt.fixed_c ? std::vector<double>{*opt.fixed_c} : opt.c_starts;
    if (starts.empty()) starts.push_back(1.0);

    detail::JointRun best;
    for (double c0 : starts) {
        const double c = std::clamp(c0, opt.c_floor, 1.0);
        Vector theta = naive;
        theta(0) -= std::log(c);
        detail::JointRun run = detail::joint_from_start(X1, s, theta, c, opt);
        if (run.loglik > best.loglik) best = std::move(run);
    }

    JointModel m;
    m.coefficients.intercept = best.theta(0);
    m.coefficients.beta = best.theta.tail(X.cols());
    m.coefficients.converged = best.converged;
    m.coefficients.separated = best.separated;
    m.coefficients.iterations = best.iterations;
    m.c_hat = best.c;
    m.log_likelihood = best.loglik;
    m.converged = best.converged;
    m.iterations = best.iterations;
    m.loglik_trace = std::move(best.trace);
    return m;
}

/// Posterior P(Y = 1 | x) = sigmoid(x'beta); c cancels under SCAR.
inline Vector predict_posterior(const JointModel& model, const Matrix& X)
{
    return predict_posterior(model.coefficients, X);
}

} // namespace puclust
