#include "idrkit/peaks.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <tuple>

#include <zlib.h>

#include "idrkit/errors.hpp"
#include "idrkit/parallel.hpp"

namespace idrkit {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        const std::size_t tab = line.find('\t', pos);
        fields.push_back(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos));
        if (tab == std::string_view::npos) break;
        pos = tab + 1;
    }
    return fields;
}

std::int64_t parse_int(std::string_view s, std::size_t line, std::size_t column, const char* what) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw ParseError(line, column, std::string(what) + " is not an integer: '" + std::string(s) + "'");
    }
    return v;
}

double parse_real(std::string_view s, std::size_t line, std::size_t column, const char* what) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) {
        throw ParseError(line, column, std::string(what) + " is not a finite number: '" + std::string(s) + "'");
    }
    return v;
}

bool skippable(std::string_view line) {
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) return true;
    return line.front() == '#' || line.starts_with("track") || line.starts_with("browser");
}

Peak parse_line(std::string_view line, std::size_t line_no, PeakFormat format, ScoreColumn column) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto f = split_tabs(line);
    const std::size_t expected = format == PeakFormat::NarrowPeak ? 10 : 4;
    if (f.size() != expected) {
        throw ParseError(line_no, std::min(f.size(), expected) + 1,
                         "expected " + std::to_string(expected) + " tab-separated columns, found " +
                             std::to_string(f.size()));
    }
    Peak p;
    p.source_line = line_no;
    if (f[0].empty()) throw ParseError(line_no, 1, "empty chromosome name");
    p.chrom = std::string(f[0]);
    p.start = parse_int(f[1], line_no, 2, "start");
    p.end = parse_int(f[2], line_no, 3, "end");
    if (p.start < 0) throw ParseError(line_no, 2, "negative start");
    if (p.start >= p.end) throw ParseError(line_no, 3, "end must exceed start");
    if (format == PeakFormat::BedScore) {
        p.score = parse_real(f[3], line_no, 4, "score");
        return p;
    }
    std::size_t score_index = 6;
    switch (column) {
        case ScoreColumn::Score: score_index = 4; break;
        case ScoreColumn::SignalValue: score_index = 6; break;
        case ScoreColumn::PValue: score_index = 7; break;
        case ScoreColumn::QValue: score_index = 8; break;
    }
    p.score = parse_real(f[score_index], line_no, score_index + 1, "score");
    const std::int64_t summit = parse_int(f[9], line_no, 10, "summit");
    if (summit != -1) {
        if (summit < 0 || summit >= p.width()) throw ParseError(line_no, 10, "summit offset outside the peak");
        p.summit_offset = summit;
    }
    return p;
}

}  // namespace

PeakFormat parse_peak_format(std::string_view name) {
    if (name == "narrowPeak") return PeakFormat::NarrowPeak;
    if (name == "bed-score" || name == "bed") return PeakFormat::BedScore;
    throw DomainError("unknown peak format '" + std::string(name) + "'");
}

ScoreColumn parse_score_column(std::string_view name) {
    if (name == "score") return ScoreColumn::Score;
    if (name == "signalValue") return ScoreColumn::SignalValue;
    if (name == "pValue") return ScoreColumn::PValue;
    if (name == "qValue") return ScoreColumn::QValue;
    throw DomainError("unknown score column '" + std::string(name) + "'");
}

std::vector<Peak> parse_peaks(std::string_view text, PeakFormat format, ScoreColumn column) {
    std::vector<Peak> peaks;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (skippable(line)) continue;
        peaks.push_back(parse_line(line, line_no, format, column));
    }
    return peaks;
}

std::vector<Peak> parse_peak_file(const std::string& path, PeakFormat format, ScoreColumn column) {
    // gzread passes uncompressed files through unchanged.
    std::unique_ptr<gzFile_s, decltype(&gzclose)> file(gzopen(path.c_str(), "rb"), &gzclose);
    if (!file) throw DomainError("cannot open '" + path + "'");
    std::string text;
    char buf[1 << 16];
    int got = 0;
    while ((got = gzread(file.get(), buf, sizeof buf)) > 0) text.append(buf, static_cast<std::size_t>(got));
    if (got < 0) {
        int err = 0;
        throw DomainError("cannot read '" + path + "': " + gzerror(file.get(), &err));
    }
    std::vector<Peak> peaks = parse_peaks(text, format, column);
    if (peaks.empty()) throw EmptyFile("no peaks in '" + path + "'");
    return peaks;
}

std::vector<Peak> truncate_to_width(const std::vector<Peak>& peaks, std::int64_t width) {
    if (width <= 0) throw DomainError("width must be positive");
    std::vector<Peak> out = peaks;
    for (Peak& p : out) {
        if (p.width() <= width) continue;
        const std::int64_t centre = p.summit_offset ? p.start + *p.summit_offset : p.start + p.width() / 2;
        const std::int64_t start = std::max<std::int64_t>(0, centre - width / 2);
        const std::int64_t end = centre - width / 2 + width;
        p.start = start;
        p.end = end;
        if (p.summit_offset) p.summit_offset = centre - start;
    }
    return out;
}

std::int64_t overlap_length(const Peak& a, const Peak& b) noexcept {
    if (a.chrom != b.chrom) return 0;
    return std::max<std::int64_t>(0, std::min(a.end, b.end) - std::max(a.start, b.start));
}

namespace {

struct Edge {
    std::size_t a;   // local index into the chromosome's rep1 list
    std::size_t b;
    std::int64_t overlap;
};

// Maximum-cardinality matching seeded by the greedy pairing. mate1/mate2
// hold local partner indices or npos.
void match_chromosome(const std::vector<Peak>& rep1, const std::vector<Peak>& rep2,
                      const std::vector<std::size_t>& idx1, const std::vector<std::size_t>& idx2,
                      std::vector<std::size_t>& mate1, std::vector<std::size_t>& mate2) {
    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    const std::size_t n1 = idx1.size();
    const std::size_t n2 = idx2.size();
    mate1.assign(n1, npos);
    mate2.assign(n2, npos);

    // Both lists are sorted by start. A rep2 peak overlapping p starts after
    // p.start - (widest rep2 peak).
    std::int64_t widest = 0;
    for (std::size_t j : idx2) widest = std::max(widest, rep2[j].width());
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n1; ++i) {
        const Peak& p = rep1[idx1[i]];
        auto first = std::partition_point(idx2.begin(), idx2.end(),
                                          [&](std::size_t j) { return rep2[j].start <= p.start - widest; });
        for (std::size_t j = static_cast<std::size_t>(first - idx2.begin()); j < n2; ++j) {
            const Peak& q = rep2[idx2[j]];
            if (q.start >= p.end) break;
            const std::int64_t ov = overlap_length(p, q);
            if (ov > 0) edges.push_back({i, j, ov});
        }
    }
    std::stable_sort(edges.begin(), edges.end(), [&](const Edge& x, const Edge& y) {
        if (x.overlap != y.overlap) return x.overlap > y.overlap;
        return std::tie(rep1[idx1[x.a]].start, rep2[idx2[x.b]].start) <
               std::tie(rep1[idx1[y.a]].start, rep2[idx2[y.b]].start);
    });
    for (const Edge& e : edges) {
        if (mate1[e.a] == npos && mate2[e.b] == npos) {
            mate1[e.a] = e.b;
            mate2[e.b] = e.a;
        }
    }

    // Adjacency in greedy preference order for the augmenting search.
    std::vector<std::vector<std::size_t>> adj(n1);
    for (const Edge& e : edges) adj[e.a].push_back(e.b);

    std::vector<std::size_t> visited(n2, npos);
    std::vector<std::size_t> parent(n2, npos);
    for (std::size_t root = 0; root < n1; ++root) {
        if (mate1[root] != npos || adj[root].empty()) continue;
        // Breadth-first search for a shortest augmenting path from root.
        std::vector<std::size_t> queue{root};
        std::size_t free_end = npos;
        for (std::size_t head = 0; head < queue.size() && free_end == npos; ++head) {
            const std::size_t a = queue[head];
            for (std::size_t b : adj[a]) {
                if (visited[b] == root) continue;
                visited[b] = root;
                parent[b] = a;
                if (mate2[b] == npos) {
                    free_end = b;
                    break;
                }
                queue.push_back(mate2[b]);
            }
        }
        for (std::size_t b = free_end; b != npos;) {
            const std::size_t a = parent[b];
            const std::size_t next = mate1[a];
            mate1[a] = b;
            mate2[b] = a;
            b = next;
        }
    }
}

}  // namespace

PairedPeaks pair_peaks(const std::vector<Peak>& rep1, const std::vector<Peak>& rep2, unsigned threads) {
    std::map<std::string, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> by_chrom;
    for (std::size_t i = 0; i < rep1.size(); ++i) by_chrom[rep1[i].chrom].first.push_back(i);
    for (std::size_t j = 0; j < rep2.size(); ++j) by_chrom[rep2[j].chrom].second.push_back(j);

    auto by_start = [](const std::vector<Peak>& peaks) {
        return [&peaks](std::size_t x, std::size_t y) {
            return std::tie(peaks[x].start, peaks[x].end, x) < std::tie(peaks[y].start, peaks[y].end, y);
        };
    };
    std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>*> groups;
    for (auto& [chrom, g] : by_chrom) {
        std::sort(g.first.begin(), g.first.end(), by_start(rep1));
        std::sort(g.second.begin(), g.second.end(), by_start(rep2));
        groups.push_back(&g);
    }

    std::vector<std::vector<PeakMatch>> per_group(groups.size());
    parallel_for(groups.size(), threads, [&](std::size_t k) {
        const auto& [idx1, idx2] = *groups[k];
        std::vector<std::size_t> mate1, mate2;
        match_chromosome(rep1, rep2, idx1, idx2, mate1, mate2);
        for (std::size_t a = 0; a < idx1.size(); ++a) {
            if (mate1[a] == static_cast<std::size_t>(-1)) continue;
            const std::size_t i = idx1[a];
            const std::size_t j = idx2[mate1[a]];
            per_group[k].push_back({i, j, rep1[i].score, rep2[j].score});
        }
    });

    PairedPeaks out;
    for (auto& g : per_group) out.matches.insert(out.matches.end(), g.begin(), g.end());
    out.unmatched1 = rep1.size() - out.matches.size();
    out.unmatched2 = rep2.size() - out.matches.size();
    return out;
}

ScoredPairSet PairedPeaks::scored() const {
    std::vector<double> s1, s2;
    s1.reserve(matches.size());
    s2.reserve(matches.size());
    for (const PeakMatch& m : matches) {
        s1.push_back(m.score1);
        s2.push_back(m.score2);
    }
    return ScoredPairSet(std::move(s1), std::move(s2));
}

}  // namespace idrkit
