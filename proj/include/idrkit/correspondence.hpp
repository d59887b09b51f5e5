#pragma once

#include <cstddef>
#include <vector>

#include "idrkit/rank_transform.hpp"

namespace idrkit {

struct CorrespondenceCurve {
    std::vector<double> t_grid;
    std::vector<double> psi;
    std::vector<double> psi_prime;
    double spline_df = 6.4;
    double achieved_df = 0.0;
};

inline constexpr std::size_t kDefaultCurveGrid = 100;
inline constexpr double kDefaultSplineDf = 6.4;

/// Fraction of signals ranked in the top t-fraction of replicate 1 and the
/// top v-fraction of replicate 2 (empirical survival copula). Uses ranks only.
double psi_n(const RankedPairSet& ranked, double t, double v);
inline double psi_n(const RankedPairSet& ranked, double t) { return psi_n(ranked, t, t); }

/// Psi_n on the grid {1/grid_size, ..., 1} plus the derivative of a cubic
/// smoothing spline with `spline_df` equivalent degrees of freedom.
CorrespondenceCurve correspondence_curve(const RankedPairSet& ranked, std::size_t grid_size = kDefaultCurveGrid,
                                         double spline_df = kDefaultSplineDf);

}  // namespace idrkit
