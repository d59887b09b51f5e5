#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace idrkit {

/// n signals scored on two replicates. Higher scores mean stronger evidence.
class ScoredPairSet {
public:
    /// Throws EmptyInput when fewer than two pairs are given and
    /// DomainError on non-finite scores or mismatched lengths.
    ScoredPairSet(std::vector<double> score1, std::vector<double> score2);
    explicit ScoredPairSet(const std::vector<std::pair<double, double>>& pairs);

    std::size_t size() const noexcept { return score1_.size(); }
    std::span<const double> score1() const noexcept { return score1_; }
    std::span<const double> score2() const noexcept { return score2_; }

    /// Same signals with the replicate columns exchanged.
    ScoredPairSet swapped() const { return ScoredPairSet(score2_, score1_); }

private:
    std::vector<double> score1_;
    std::vector<double> score2_;
};

/// Ranks (1..n, n = largest score) and rescaled ECDF values per coordinate.
struct RankedPairSet {
    std::vector<std::size_t> ranks1;
    std::vector<std::size_t> ranks2;
    std::vector<double> u1;
    std::vector<double> u2;
    /// True when the signal's score ties another score in either coordinate.
    std::vector<bool> tie_flags;

    std::size_t size() const noexcept { return ranks1.size(); }
    std::size_t tie_count() const;
    RankedPairSet swapped() const;
};

/// Ranks each coordinate with the max-rank rule for ties, so that
/// u = rank / (n + 1) = (n / (n + 1)) * ECDF(x).
RankedPairSet rank_scores(const ScoredPairSet& set);

/// Max ranks of a single score vector; exposed for the peak and simulation code.
std::vector<std::size_t> max_ranks(std::span<const double> scores);

}  // namespace idrkit
