#include "idrkit/idr_selection.hpp"

#include <algorithm>
#include <numeric>

#include "idrkit/errors.hpp"

namespace idrkit {

std::vector<double> local_idr(const RankedPairSet& ranked, const Theta& theta) {
    const auto pseudo = compute_pseudo_data(ranked, theta);
    auto values = posterior_reproducible(pseudo, theta);
    for (double& v : values) v = 1.0 - v;
    return values;
}

IdrTable idr_table(std::span<const double> local_idr_values, std::span<const double> score1,
                   std::span<const double> score2) {
    const std::size_t n = local_idr_values.size();
    if ((!score1.empty() && score1.size() != n) || (!score2.empty() && score2.size() != n)) {
        throw DomainError("score vectors must match the number of idr values");
    }
    for (double v : local_idr_values) {
        if (!(v >= 0.0 && v <= 1.0)) throw DomainError("local idr values must lie in [0, 1]");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return local_idr_values[a] < local_idr_values[b]; });

    IdrTable table;
    table.entries.resize(n);
    table.cumulative_idr.resize(n);
    // incremental mean: nondecreasing in floating point for sorted input
    double mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = order[k];
        auto& e = table.entries[k];
        e.index = i;
        e.score1 = score1.empty() ? 0.0 : score1[i];
        e.score2 = score2.empty() ? 0.0 : score2[i];
        e.local_idr = local_idr_values[i];
        e.rank_by_idr = k + 1;
        mean += (e.local_idr - mean) / static_cast<double>(k + 1);
        table.cumulative_idr[k] = mean;
    }
    return table;
}

IdrTable idr_table(const RankedPairSet& ranked, const Theta& theta) {
    const auto values = local_idr(ranked, theta);
    return idr_table(values);
}

IdrTable idr_table(const ScoredPairSet& scores, const RankedPairSet& ranked, const Theta& theta) {
    const auto values = local_idr(ranked, theta);
    return idr_table(values, scores.score1(), scores.score2());
}

std::size_t select_at_idr(const IdrTable& table, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("IDR threshold must lie in (0, 1)");
    const auto it = std::upper_bound(table.cumulative_idr.begin(), table.cumulative_idr.end(), alpha);
    return static_cast<std::size_t>(it - table.cumulative_idr.begin());
}

}  // namespace idrkit
