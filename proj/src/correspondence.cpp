#include "idrkit/correspondence.hpp"

#include <algorithm>
#include <cmath>

#include "idrkit/errors.hpp"
#include "idrkit/smoothing_spline.hpp"

namespace idrkit {

namespace {

// Index of the order statistic x_(ceil((1 - t) n)); the slack absorbs
// representation error such as (1 - 0.37) * 100 = 63.000000000000007.
std::size_t order_index(double t, std::size_t n) {
    const double raw = (1.0 - t) * static_cast<double>(n);
    const double k = std::ceil(raw - 1e-9 * std::max(1.0, raw));
    return k <= 0.0 ? 0 : static_cast<std::size_t>(k);
}

// Max rank of the k-th order statistic, or 0 (every score passes) when k = 0.
std::size_t threshold_rank(const std::vector<std::size_t>& sorted_ranks, std::size_t k) {
    return k == 0 ? 0 : sorted_ranks[k - 1];
}

double psi_with_sorted(const RankedPairSet& ranked, const std::vector<std::size_t>& sorted1,
                       const std::vector<std::size_t>& sorted2, double t, double v) {
    const std::size_t n = ranked.size();
    const std::size_t thr1 = threshold_rank(sorted1, order_index(t, n));
    const std::size_t thr2 = threshold_rank(sorted2, order_index(v, n));
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (ranked.ranks1[i] > thr1 && ranked.ranks2[i] > thr2) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(n);
}

void check_fraction(double f, const char* name) {
    if (!(f > 0.0 && f <= 1.0)) throw DomainError(std::string(name) + " must lie in (0, 1]");
}

}  // namespace

double psi_n(const RankedPairSet& ranked, double t, double v) {
    check_fraction(t, "t");
    check_fraction(v, "v");
    auto sorted1 = ranked.ranks1;
    auto sorted2 = ranked.ranks2;
    std::sort(sorted1.begin(), sorted1.end());
    std::sort(sorted2.begin(), sorted2.end());
    return psi_with_sorted(ranked, sorted1, sorted2, t, v);
}

CorrespondenceCurve correspondence_curve(const RankedPairSet& ranked, std::size_t grid_size, double spline_df) {
    if (grid_size < 10) throw DomainError("correspondence grid must have at least 10 points");
    if (!(spline_df >= 2.0 && spline_df <= static_cast<double>(grid_size) / 2.0)) {
        throw DomainError("spline df must lie in [2, grid_size / 2]");
    }
    auto sorted1 = ranked.ranks1;
    auto sorted2 = ranked.ranks2;
    std::sort(sorted1.begin(), sorted1.end());
    std::sort(sorted2.begin(), sorted2.end());

    CorrespondenceCurve curve;
    curve.spline_df = spline_df;
    curve.t_grid.resize(grid_size);
    curve.psi.resize(grid_size);
    for (std::size_t g = 0; g < grid_size; ++g) {
        const double t = static_cast<double>(g + 1) / static_cast<double>(grid_size);
        curve.t_grid[g] = t;
        curve.psi[g] = psi_with_sorted(ranked, sorted1, sorted2, t, t);
    }

    const auto spline = fit_smoothing_spline(curve.t_grid, curve.psi, spline_df, 0.01);
    curve.psi_prime = spline.derivatives();
    curve.achieved_df = spline.df;
    return curve;
}

}  // namespace idrkit
