#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "idrkit/copula_mixture.hpp"
#include "idrkit/rank_transform.hpp"

namespace idrkit {

struct IdrEntry {
    std::size_t index = 0;       ///< position in the input set
    double score1 = 0.0;
    double score2 = 0.0;
    double local_idr = 1.0;
    std::size_t rank_by_idr = 0; ///< 1 = most reproducible
};

/// Signals in ascending local idr order with the running mean alongside.
struct IdrTable {
    std::vector<IdrEntry> entries;
    std::vector<double> cumulative_idr;
    std::size_t size() const noexcept { return entries.size(); }
};

/// Posterior probability of the irreproducible component at the pseudo-data for theta.
std::vector<double> local_idr(const RankedPairSet& ranked, const Theta& theta);

/// Sorts by local idr (ties by input index) and accumulates the running mean.
/// Scores are optional; when empty they are recorded as zero.
IdrTable idr_table(std::span<const double> local_idr_values, std::span<const double> score1 = {},
                   std::span<const double> score2 = {});
IdrTable idr_table(const RankedPairSet& ranked, const Theta& theta);
IdrTable idr_table(const ScoredPairSet& scores, const RankedPairSet& ranked, const Theta& theta);

/// Largest l with cumulative_idr[l - 1] <= alpha, or 0. DomainError unless 0 < alpha < 1.
std::size_t select_at_idr(const IdrTable& table, double alpha);

}  // namespace idrkit
