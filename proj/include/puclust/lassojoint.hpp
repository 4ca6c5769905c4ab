#pragma once

#include <span>
#include <vector>

#include "common.hpp"
#include "glm.hpp"

namespace puclust {

struct LassoJointOptions
{
    CvOptions cv;
    JointOptions joint;
    /// threshold = delta_factor * lambda_min
    double delta_factor = 0.5;
};

struct LassoJointFit
{
    LambdaSelection selection;
    Coefficients lasso;
    std::vector<Index> support;
    JointModel joint;
    /// Joint-model coefficients placed back on the full feature index;
    /// exact zeros outside the thresholded support.
    Coefficients coefficients;
};

/// Three-step pipeline on PU data (X, s): cross-validated lasso, thresholded
/// support at delta_factor * lambda_min, joint (beta, c) fit on that support.
inline LassoJointFit fit_lasso_joint(const Matrix& X, std::span<const int> s, std::uint64_t seed,
                                     const LassoJointOptions& opt = {})
{
    LassoJointFit fit;
    fit.selection = cv_select_lambda(X, s, seed, opt.cv);
    fit.lasso = fit_lasso(X, s, fit.selection.lambda_min, opt.cv.lasso);
    fit.support = threshold_support(fit.lasso, opt.delta_factor * fit.selection.lambda_min);
    fit.joint = fit_joint(select_cols(X, fit.support), s, opt.joint);

    fit.coefficients = Coefficients::zeros(X.cols());
    fit.coefficients.intercept = fit.joint.coefficients.intercept;
    for (std::size_t k = 0; k < fit.support.size(); ++k) {
        fit.coefficients.beta(fit.support[k]) = fit.joint.coefficients.beta(static_cast<Index>(k));
    }
    fit.coefficients.lambda = fit.selection.lambda_min;
    fit.coefficients.converged = fit.joint.converged;
    fit.coefficients.separated = fit.joint.coefficients.separated;
    fit.coefficients.iterations = fit.joint.iterations;
    return fit;
}

} // namespace puclust
