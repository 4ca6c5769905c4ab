#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "common.hpp"

namespace puclust {

/// Logistic function, evaluated on the branch that cannot overflow.
inline double sigmoid(double t)
{
    if (t >= 0.0) {
        return 1.0 / (1.0 + std::exp(-t));
    }
    const double e = std::exp(t);
    return e / (1.0 + e);
}

/// log(1 + exp(t)) without overflow.
inline double softplus(double t)
{
    return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

/// log(exp(a) + exp(b))
inline double log_add_exp(double a, double b)
{
    if (a == -INFINITY) return b;
    if (b == -INFINITY) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

/// Fitted logistic model on the original feature scale.
struct Coefficients
{
    double intercept = 0.0;
    Vector beta;
    std::optional<double> lambda;
    bool converged = true;
    bool separated = false;
    int iterations = 0;

    Index n_features() const { return beta.size(); }

    /// Indices j with beta_j != 0, ascending.
    std::vector<Index> support() const
    {
        std::vector<Index> s;
        for (Index j = 0; j < beta.size(); ++j) {
            if (beta(j) != 0.0) s.push_back(j);
        }
        return s;
    }

    static Coefficients zeros(Index p)
    {
        Coefficients c;
        c.beta = Vector::Zero(p);
        return c;
    }
};

inline Vector linear_predictor(const Coefficients& coef, const Matrix& X)
{
    if (X.cols() != coef.beta.size()) {
        throw Error("linear_predictor: X has " + std::to_string(X.cols()) + " columns, model has " +
                    std::to_string(coef.beta.size()));
    }
    return (X * coef.beta).array() + coef.intercept;
}

/// P(Y = 1 | x) = sigmoid(intercept + x'beta) for every row of X.
inline Vector predict_posterior(const Coefficients& coef, const Matrix& X)
{
    Vector eta = linear_predictor(coef, X);
    return eta.unaryExpr([](double t) { return sigmoid(t); });
}

} // namespace puclust
