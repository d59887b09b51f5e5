#pragma once

#include <span>
#include <vector>

namespace idrkit {

/// Natural cubic smoothing spline with knots at every abscissa, fitted by
/// penalized least squares sum (y - f)^2 + lambda * int f''^2.
struct SmoothingSplineFit {
    std::vector<double> x;
    std::vector<double> fitted;      ///< f(x_i)
    std::vector<double> second;      ///< f''(x_i); zero at both ends
    double lambda = 0.0;
    double df = 0.0;                 ///< trace of the smoother matrix

    /// Analytic first derivative at knot i.
    double derivative_at_knot(std::size_t i) const;
    std::vector<double> derivatives() const;
};

/// Fits with lambda chosen so the equivalent degrees of freedom match
/// `target_df` within `df_tolerance`. Requires strictly increasing x,
/// at least 3 points and 2 <= target_df <= x.size().
SmoothingSplineFit fit_smoothing_spline(std::span<const double> x, std::span<const double> y, double target_df,
                                        double df_tolerance = 1e-3);

}  // namespace idrkit
