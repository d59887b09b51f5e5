#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idrkit/rank_transform.hpp"

namespace idrkit {

/// Half-open interval [start, end) on one chromosome.
struct Peak {
    std::string chrom;
    std::int64_t start = 0;
    std::int64_t end = 0;
    std::optional<std::int64_t> summit_offset;
    double score = 0.0;
    std::size_t source_line = 0;

    std::int64_t width() const noexcept { return end - start; }
    friend bool operator==(const Peak&, const Peak&) = default;
};

enum class PeakFormat { NarrowPeak, BedScore };
enum class ScoreColumn { Score, SignalValue, PValue, QValue };

PeakFormat parse_peak_format(std::string_view name);
ScoreColumn parse_score_column(std::string_view name);

/// Parses narrowPeak (10 columns) or chrom/start/end/score BED text. Blank
/// lines and lines starting with '#', "track" or "browser" are skipped. The
/// score column only applies to narrowPeak.
std::vector<Peak> parse_peaks(std::string_view text, PeakFormat format, ScoreColumn column = ScoreColumn::SignalValue);

/// Reads plain or gzip-compressed files. Throws EmptyFile when no peak lines
/// remain and ParseError for malformed lines.
std::vector<Peak> parse_peak_file(const std::string& path, PeakFormat format,
                                  ScoreColumn column = ScoreColumn::SignalValue);

inline constexpr std::int64_t kDefaultPeakWidth = 40;

/// Peaks wider than `width` are recentred on the summit (or midpoint) with
/// the given width, clipped at 0. Throws DomainError for width <= 0.
std::vector<Peak> truncate_to_width(const std::vector<Peak>& peaks, std::int64_t width = kDefaultPeakWidth);

std::int64_t overlap_length(const Peak& a, const Peak& b) noexcept;

struct PeakMatch {
    std::size_t index1 = 0;
    std::size_t index2 = 0;
    double score1 = 0.0;
    double score2 = 0.0;
    friend bool operator==(const PeakMatch&, const PeakMatch&) = default;
};

struct PairedPeaks {
    std::vector<PeakMatch> matches;   ///< ordered by chromosome, rep1 start, rep2 start
    std::size_t unmatched1 = 0;
    std::size_t unmatched2 = 0;

    ScoredPairSet scored() const;
};

/// One-to-one pairing of overlapping peaks (>= 1 bp) on the same chromosome.
/// Pairs are taken greedily by descending overlap, ties by rep1 start then
/// rep2 start; afterwards augmenting paths raise the pairing to maximum
/// cardinality. Chromosomes are handled independently, up to `threads` at once.
PairedPeaks pair_peaks(const std::vector<Peak>& rep1, const std::vector<Peak>& rep2, unsigned threads = 1);

}  // namespace idrkit
