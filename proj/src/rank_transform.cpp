#include "idrkit/rank_transform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "idrkit/errors.hpp"

namespace idrkit {

ScoredPairSet::ScoredPairSet(std::vector<double> score1, std::vector<double> score2)
    : score1_(std::move(score1)), score2_(std::move(score2)) {
    if (score1_.size() != score2_.size()) {
        throw DomainError("replicate score vectors differ in length");
    }
    if (score1_.size() < 2) {
        throw EmptyInput("at least two scored pairs are required");
    }
    for (std::size_t i = 0; i < score1_.size(); ++i) {
        if (!std::isfinite(score1_[i]) || !std::isfinite(score2_[i])) {
            throw DomainError("non-finite score at signal " + std::to_string(i));
        }
    }
}

namespace {

std::vector<double> firsts(const std::vector<std::pair<double, double>>& pairs) {
    std::vector<double> out(pairs.size());
    std::transform(pairs.begin(), pairs.end(), out.begin(), [](const auto& p) { return p.first; });
    return out;
}

std::vector<double> seconds(const std::vector<std::pair<double, double>>& pairs) {
    std::vector<double> out(pairs.size());
    std::transform(pairs.begin(), pairs.end(), out.begin(), [](const auto& p) { return p.second; });
    return out;
}

}  // namespace

ScoredPairSet::ScoredPairSet(const std::vector<std::pair<double, double>>& pairs)
    : ScoredPairSet(firsts(pairs), seconds(pairs)) {}

std::vector<std::size_t> max_ranks(std::span<const double> scores) {
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    std::vector<std::size_t> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        // every member of the tie block gets the block's largest rank
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = j + 1;
        i = j + 1;
    }
    return ranks;
}

std::size_t RankedPairSet::tie_count() const {
    return static_cast<std::size_t>(std::count(tie_flags.begin(), tie_flags.end(), true));
}

RankedPairSet RankedPairSet::swapped() const {
    return RankedPairSet{ranks2, ranks1, u2, u1, tie_flags};
}

RankedPairSet rank_scores(const ScoredPairSet& set) {
    const std::size_t n = set.size();
    if (n < 2) throw EmptyInput("at least two scored pairs are required");

    RankedPairSet out;
    out.ranks1 = max_ranks(set.score1());
    out.ranks2 = max_ranks(set.score2());

    const double denom = static_cast<double>(n) + 1.0;
    out.u1.resize(n);
    out.u2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.u1[i] = static_cast<double>(out.ranks1[i]) / denom;
        out.u2[i] = static_cast<double>(out.ranks2[i]) / denom;
    }

    // A signal is tied when its max rank is shared with another signal.
    auto tied = [n](const std::vector<std::size_t>& ranks) {
        std::vector<std::size_t> count(n + 1, 0);
        for (auto r : ranks) ++count[r];
        std::vector<bool> flags(n);
        for (std::size_t i = 0; i < n; ++i) flags[i] = count[ranks[i]] > 1;
        return flags;
    };
    const auto t1 = tied(out.ranks1);
    const auto t2 = tied(out.ranks2);
    out.tie_flags.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.tie_flags[i] = t1[i] || t2[i];
    return out;
}

}  // namespace idrkit
