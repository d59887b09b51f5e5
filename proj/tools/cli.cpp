#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "idrkit/copula_mixture.hpp"
#include "idrkit/correspondence.hpp"
#include "idrkit/errors.hpp"
#include "idrkit/idr_selection.hpp"
#include "idrkit/model_select.hpp"
#include "idrkit/peaks.hpp"
#include "idrkit/rank_transform.hpp"
#include "idrkit/simulate.hpp"
#include "manifest.hpp"
#include "table_io.hpp"

namespace idrkit::cli {

namespace {

using json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotConverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr std::uint64_t kDefaultSeed = 1;

struct Common {
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    bool strict = false;
    std::string output;
    std::string manifest;
};

std::uint64_t resolve_seed(const Common& c) {
    if (c.seed) return *c.seed;
    if (const char* env = std::getenv("IDRKIT_SEED"); env && *env) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (*end != '\0' || env[0] == '-') throw UsageError("IDRKIT_SEED is not a non-negative integer");
        return v;
    }
    return kDefaultSeed;
}

void add_seed(CLI::App* sub, Common& c) {
    sub->add_option_function<std::uint64_t>(
        "--seed", [&c](std::uint64_t v) { c.seed = v; }, "random seed (falls back to IDRKIT_SEED, then 1)");
}

void add_threads(CLI::App* sub, Common& c) {
    sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
}

void add_output(CLI::App* sub, Common& c, const char* what) {
    sub->add_option("--output,-o", c.output, std::string(what) + " (default: standard output)");
    sub->add_option("--manifest", c.manifest, "run manifest path (default: <output>.manifest.json)");
}

// Writes through to a file or to the caller's stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) {
        if (path.empty()) {
            stream_ = &fallback;
        } else {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw DomainError("cannot write '" + path + "'");
            stream_ = file_.get();
        }
    }
    std::ostream& operator*() { return *stream_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_ = nullptr;
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot write '" + path + "'");
    f << text;
}

void emit_manifest(const Common& c, const RunManifest& m) {
    std::string path = c.manifest;
    if (path.empty() && !c.output.empty()) path = c.output + ".manifest.json";
    if (!path.empty()) write_text(path, m.to_json());
}

RunManifest base_manifest(const std::string& subcommand, const Common& c, std::uint64_t seed) {
    RunManifest m;
    m.subcommand = subcommand;
    m.rng_seed = seed;
    m.flags["threads"] = std::to_string(c.threads);
    m.flags["strict"] = c.strict ? "true" : "false";
    m.flags["output"] = c.output;
    return m;
}

std::string fmt(double x) { return format_real(x); }

FitConfig make_fit_config(std::size_t inits, std::uint64_t seed, unsigned threads) {
    FitConfig cfg;
    cfg.n_inits = inits;
    cfg.rng_seed = seed;
    cfg.threads = threads;
    return cfg;
}

// ---------------------------------------------------------------- pair

struct PairArgs {
    Common c;
    std::string rep1, rep2;
    std::string format = "narrowPeak";
    std::string score_column = "signalValue";
    std::string score_direction = "high-is-better";
    std::int64_t width = kDefaultPeakWidth;
};

void run_pair(const PairArgs& a, std::ostream& out, std::ostream& err) {
    const PeakFormat format = parse_peak_format(a.format);
    const ScoreColumn column = parse_score_column(a.score_column);
    const bool negate = a.score_direction == "low-is-better";
    auto p1 = truncate_to_width(parse_peak_file(a.rep1, format, column), a.width);
    auto p2 = truncate_to_width(parse_peak_file(a.rep2, format, column), a.width);
    if (negate) {
        for (auto& p : p1) p.score = -p.score;
        for (auto& p : p2) p.score = -p.score;
    }
    const PairedPeaks paired = pair_peaks(p1, p2, a.c.threads);

    Sink sink(a.c.output, out);
    write_row(*sink, {"chrom", "start1", "end1", "start2", "end2", "score1", "score2"});
    for (const auto& m : paired.matches) {
        const Peak& x = p1[m.index1];
        const Peak& y = p2[m.index2];
        write_row(*sink, {x.chrom, std::to_string(x.start), std::to_string(x.end), std::to_string(y.start),
                          std::to_string(y.end), fmt(m.score1), fmt(m.score2)});
    }
    err << "paired " << paired.matches.size() << " peaks; unmatched " << paired.unmatched1 << " in rep1, "
        << paired.unmatched2 << " in rep2\n";

    RunManifest m = base_manifest("pair", a.c, 0);
    m.flags["rep1"] = a.rep1;
    m.flags["rep2"] = a.rep2;
    m.flags["format"] = a.format;
    m.flags["score-column"] = a.score_column;
    m.flags["score-direction"] = a.score_direction;
    m.flags["width"] = std::to_string(a.width);
    m.inputs = {{a.rep1, sha256_file(a.rep1)}, {a.rep2, sha256_file(a.rep2)}};
    emit_manifest(a.c, m);
}

// ---------------------------------------------------------------- pairs input

struct PairsInput {
    std::string input;
    std::string score1 = "score1";
    std::string score2 = "score2";
};

void add_pairs_input(CLI::App* sub, PairsInput& in) {
    sub->add_option("--input,-i", in.input, "paired-score TSV with a header row")->required();
    sub->add_option("--score1", in.score1, "replicate-1 score column")->capture_default_str();
    sub->add_option("--score2", in.score2, "replicate-2 score column")->capture_default_str();
}

void record_pairs_input(RunManifest& m, const PairsInput& in) {
    m.flags["input"] = in.input;
    m.flags["score1"] = in.score1;
    m.flags["score2"] = in.score2;
    m.inputs = {{in.input, sha256_file(in.input)}};
}

ScoredPairSet scores_of(const Table& t, const PairsInput& in) {
    if (t.rows.empty()) throw EmptyInput("input table has no rows");
    return ScoredPairSet(t.real_column(in.score1), t.real_column(in.score2));
}

// ---------------------------------------------------------------- fit

struct FitArgs {
    Common c;
    PairsInput in;
    std::size_t inits = 10;
    std::size_t max_outer = FitConfig{}.outer_max_iters;
    std::string theta_path;
};

void run_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
    const std::uint64_t seed = resolve_seed(a.c);
    const Table table = read_table(a.in.input);
    const ScoredPairSet scores = scores_of(table, a.in);
    const RankedPairSet ranked = rank_scores(scores);
    FitConfig cfg = make_fit_config(a.inits, seed, a.c.threads);
    cfg.outer_max_iters = a.max_outer;
    const FitResult result = fit(ranked, cfg);
    if (result.small_sample) {
        err << "warning: " << ranked.size() << " signals is below the recommended " << kRecommendedMinSignals << "\n";
    }

    json theta;
    theta["pi1"] = result.theta.pi1;
    theta["mu1"] = result.theta.mu1;
    theta["sigma1_sq"] = result.theta.sigma1_sq;
    theta["rho1"] = result.theta.rho1;
    theta["loglik"] = result.loglik;
    theta["converged"] = result.converged;
    theta["n"] = ranked.size();
    theta["n_ties"] = ranked.tie_count();
    theta["n_outer_iters"] = result.n_outer_iters;
    theta["init_index"] = result.init_index;
    const std::string theta_text = theta.dump(2, ' ', false, json::error_handler_t::strict) + "\n";

    if (a.theta_path.empty()) {
        out << theta_text;
    } else {
        write_text(a.theta_path, theta_text);
    }
    if (!a.c.output.empty()) {
        Sink sink(a.c.output, out);
        std::vector<std::string> header = table.columns;
        header.push_back("posterior");
        header.push_back("local_idr");
        write_row(*sink, header);
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            std::vector<std::string> row = table.rows[r];
            row.push_back(fmt(result.posterior[r]));
            row.push_back(fmt(1.0 - result.posterior[r]));
            write_row(*sink, row);
        }
    }

    RunManifest m = base_manifest("fit", a.c, seed);
    record_pairs_input(m, a.in);
    m.flags["inits"] = std::to_string(a.inits);
    m.flags["max-outer"] = std::to_string(a.max_outer);
    m.flags["theta"] = a.theta_path;
    Common c = a.c;
    if (c.output.empty()) c.output = a.theta_path;
    emit_manifest(c, m);
    if (a.c.strict && !result.converged) throw NotConverged("copula mixture fit did not converge");
}

// ---------------------------------------------------------------- curve

struct CurveArgs {
    Common c;
    PairsInput in;
    std::size_t grid = kDefaultCurveGrid;
    double df = kDefaultSplineDf;
};

void run_curve(const CurveArgs& a, std::ostream& out, std::ostream&) {
    const Table table = read_table(a.in.input);
    const RankedPairSet ranked = rank_scores(scores_of(table, a.in));
    const CorrespondenceCurve curve = correspondence_curve(ranked, a.grid, a.df);
    Sink sink(a.c.output, out);
    write_row(*sink, {"t", "psi", "psi_prime"}, ',');
    for (std::size_t i = 0; i < curve.t_grid.size(); ++i) {
        write_row(*sink, {fmt(curve.t_grid[i]), fmt(curve.psi[i]), fmt(curve.psi_prime[i])}, ',');
    }
    RunManifest m = base_manifest("curve", a.c, 0);
    record_pairs_input(m, a.in);
    m.flags["grid"] = std::to_string(a.grid);
    m.flags["df"] = fmt(a.df);
    emit_manifest(a.c, m);
}

// ---------------------------------------------------------------- select

struct SelectArgs {
    Common c;
    std::string input;
    double threshold = 0.05;
};

void run_select(const SelectArgs& a, std::ostream& out, std::ostream& err) {
    const Table table = read_table(a.input);
    if (table.rows.empty()) throw EmptyInput("fit table has no rows");
    const std::vector<double> idr = table.real_column("local_idr");
    for (std::size_t r = 0; r < idr.size(); ++r) {
        if (idr[r] < 0.0 || idr[r] > 1.0) {
            throw ParseError(table.source_lines[r], table.column("local_idr") + 1, "local_idr outside [0, 1]");
        }
    }
    const IdrTable sorted = idr_table(idr);
    const std::size_t selected = select_at_idr(sorted, a.threshold);

    Sink sink(a.c.output, out);
    std::vector<std::string> header = table.columns;
    header.push_back("cumulative_idr");
    write_row(*sink, header);
    for (std::size_t k = 0; k < selected; ++k) {
        std::vector<std::string> row = table.rows[sorted.entries[k].index];
        row.push_back(fmt(sorted.cumulative_idr[k]));
        write_row(*sink, row);
    }
    err << "selected " << selected << " of " << table.rows.size() << " signals at IDR " << fmt(a.threshold) << "\n";

    RunManifest m = base_manifest("select", a.c, 0);
    m.flags["input"] = a.input;
    m.flags["idr-threshold"] = fmt(a.threshold);
    m.inputs = {{a.input, sha256_file(a.input)}};
    emit_manifest(a.c, m);
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    Common c;
    std::string scenario = "S1";
    std::size_t n = 10000;
    std::size_t reps = 10;
    std::size_t inits = 10;
    std::string out_dir;
};

SimScenario load_scenario(const std::string& name_or_path, std::size_t n, std::uint64_t seed) {
    if (name_or_path.size() == 2 && name_or_path[0] == 'S') {
        return scenario_preset(parse_scenario_name(name_or_path), n, seed);
    }
    json j;
    try {
        j = json::parse(read_file(name_or_path));
    } catch (const json::parse_error& e) {
        throw ParseError(0, e.byte, std::string("invalid scenario JSON: ") + e.what());
    }
    SimScenario s;
    s.n = n;
    s.seed = seed;
    try {
        s.label = j.value("label", name_or_path);
        for (const auto& c : j.at("components")) {
            s.components.push_back({c.at("pi").get<double>(), c.at("mu").get<double>(), c.at("rho").get<double>(),
                                    c.at("sigma_sq").get<double>()});
        }
    } catch (const json::exception& e) {
        throw ParseError(0, 0, std::string("invalid scenario description: ") + e.what());
    }
    s.validate();
    return s;
}

void write_params(std::ostream& os, const std::vector<ParamSummary>& params) {
    write_row(os, {"parameter", "truth", "mean", "sd"}, ',');
    for (const auto& p : params) write_row(os, {p.name, fmt(p.truth), fmt(p.mean), fmt(p.sd)}, ',');
}

void write_calibration(std::ostream& os, const CalibrationTable& t) {
    write_row(os, {"method", "nominal", "empirical_fdr", "mean_selected"}, ',');
    for (const auto& r : t.rows) {
        write_row(os, {std::string(method_name(r.method)), fmt(r.nominal), fmt(r.empirical_fdr), fmt(r.mean_selected)},
                  ',');
    }
}

void write_tradeoff(std::ostream& os, const TradeoffTable& t) {
    write_row(os, {"rep", "method", "threshold", "incorrect", "correct"}, ',');
    for (const auto& r : t.rows) {
        write_row(os, {std::to_string(r.rep), std::string(method_name(r.method)), fmt(r.threshold),
                       std::to_string(r.incorrect), std::to_string(r.correct)},
                  ',');
    }
}

void write_matched(std::ostream& os, const TradeoffTable& t) {
    write_row(os, {"rep", "method", "max_incorrect", "correct"}, ',');
    for (const auto& r : t.matched) {
        write_row(os, {std::to_string(r.rep), std::string(method_name(r.method)), std::to_string(r.max_incorrect),
                       std::to_string(r.correct)},
                  ',');
    }
}

void run_simulate(const SimulateArgs& a, std::ostream& out, std::ostream&) {
    const std::uint64_t seed = resolve_seed(a.c);
    const SimScenario scenario = load_scenario(a.scenario, a.n, seed);
    ExperimentConfig cfg;
    cfg.n_reps = a.reps;
    cfg.fit = make_fit_config(a.inits, seed, 1);
    cfg.threads = a.c.threads;
    const ExperimentReport report = run_experiments(scenario, cfg);

    {
        Sink sink(a.c.output, out);
        write_params(*sink, report.params);
    }
    if (!a.out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(a.out_dir, ec);
        if (ec) throw DomainError("cannot create '" + a.out_dir + "': " + ec.message());
        std::ofstream cal(a.out_dir + "/calibration.csv", std::ios::binary);
        std::ofstream trade(a.out_dir + "/tradeoff.csv", std::ios::binary);
        std::ofstream matched(a.out_dir + "/matched.csv", std::ios::binary);
        std::ofstream params(a.out_dir + "/params.csv", std::ios::binary);
        if (!cal || !trade || !matched || !params) throw DomainError("cannot write into '" + a.out_dir + "'");
        write_calibration(cal, report.calibration);
        write_tradeoff(trade, report.tradeoff);
        write_matched(matched, report.tradeoff);
        write_params(params, report.params);
    }

    RunManifest m = base_manifest("simulate", a.c, seed);
    m.flags["scenario"] = a.scenario;
    m.flags["n"] = std::to_string(a.n);
    m.flags["reps"] = std::to_string(a.reps);
    m.flags["inits"] = std::to_string(a.inits);
    m.flags["out-dir"] = a.out_dir;
    if (!(a.scenario.size() == 2 && a.scenario[0] == 'S')) m.inputs = {{a.scenario, sha256_file(a.scenario)}};
    Common c = a.c;
    if (c.manifest.empty() && c.output.empty() && !a.out_dir.empty()) c.manifest = a.out_dir + "/manifest.json";
    emit_manifest(c, m);

    if (a.c.strict) {
        for (const auto& r : report.replicates) {
            if (!r.converged) throw NotConverged("replicate " + std::to_string(r.rep) + " did not converge");
        }
    }
}

// ---------------------------------------------------------------- compare

struct CompareArgs {
    Common c;
    std::string input;
    std::string p1 = "p1";
    std::string p2 = "p2";
    std::string truth;
    std::size_t inits = 10;
};

void run_compare(const CompareArgs& a, std::ostream& out, std::ostream&) {
    const std::uint64_t seed = resolve_seed(a.c);
    const Table table = read_table(a.input);
    if (table.rows.empty()) throw EmptyInput("input table has no rows");
    const std::vector<double> p1 = table.real_column(a.p1);
    const std::vector<double> p2 = table.real_column(a.p2);
    for (std::size_t r = 0; r < p1.size(); ++r) {
        for (const auto& [v, col] : {std::pair{p1[r], a.p1}, std::pair{p2[r], a.p2}}) {
            if (!(v > 0.0 && v < 1.0)) throw ParseError(table.source_lines[r], table.column(col) + 1, "p-value outside (0, 1)");
        }
    }
    std::vector<int> truth;
    if (!a.truth.empty()) truth = table.label_column(a.truth);
    ReplicateOutcome outcome = evaluate_methods(p1, p2, truth, make_fit_config(a.inits, seed, a.c.threads));

    Sink sink(a.c.output, out);
    const auto thresholds = default_tradeoff_thresholds();
    if (!truth.empty()) {
        const TradeoffTable t = tradeoff(a.input, {outcome}, thresholds, {50, 100, 200, 500});
        write_row(*sink, {"method", "threshold", "incorrect", "correct"}, ',');
        for (const auto& r : t.rows) {
            write_row(*sink, {std::string(method_name(r.method)), fmt(r.threshold), std::to_string(r.incorrect),
                              std::to_string(r.correct)},
                      ',');
        }
    } else {
        write_row(*sink, {"method", "threshold", "selected"}, ',');
        for (Method m : kAllMethods) {
            const auto& stat = outcome.statistic[static_cast<int>(m)];
            for (double thr : thresholds) {
                std::size_t count = 0;
                if (m == Method::Idr) {
                    // IDR selects on the running mean of local idr.
                    for (double c : outcome.cumulative_idr) count += c <= thr;
                } else {
                    for (double s : stat) count += s <= thr;
                }
                write_row(*sink, {std::string(method_name(m)), fmt(thr), std::to_string(count)}, ',');
            }
        }
    }

    RunManifest m = base_manifest("compare", a.c, seed);
    m.flags["input"] = a.input;
    m.flags["p1"] = a.p1;
    m.flags["p2"] = a.p2;
    m.flags["truth"] = a.truth;
    m.flags["inits"] = std::to_string(a.inits);
    m.inputs = {{a.input, sha256_file(a.input)}};
    emit_manifest(a.c, m);
    if (a.c.strict && !outcome.converged) throw NotConverged("copula mixture fit did not converge");
}

// ---------------------------------------------------------------- lrt

struct LrtArgs {
    Common c;
    PairsInput in;
    std::size_t bootstrap = 100;
    std::size_t inits = 10;
};

void run_lrt(const LrtArgs& a, std::ostream& out, std::ostream& err) {
    const std::uint64_t seed = resolve_seed(a.c);
    const Table table = read_table(a.in.input);
    const RankedPairSet ranked = rank_scores(scores_of(table, a.in));
    const FitConfig cfg = make_fit_config(a.inits, seed, a.c.threads);
    const LrtResult r = bootstrap_lrt(ranked, a.bootstrap, seed, cfg);
    if (r.two_log_lambda < -kNegativeStatTolerance) {
        err << "warning: negative likelihood-ratio statistic " << fmt(r.two_log_lambda) << "\n";
    }

    json j;
    j["rho_null"] = r.rho_null;
    j["loglik_null"] = r.loglik_null;
    j["loglik_alt"] = r.loglik_alt;
    j["two_log_lambda"] = r.two_log_lambda;
    j["p_value"] = r.p_value;
    j["n_bootstrap"] = r.n_bootstrap;
    j["negative_statistic"] = r.negative_statistic;
    j["failed_draws"] = r.failed_draws;
    auto& stats = j["bootstrap_stats"] = json::array();
    // JSON has no infinity; failed draws appear as null.
    for (double s : r.bootstrap_stats) stats.push_back(std::isfinite(s) ? json(s) : json(nullptr));
    Sink sink(a.c.output, out);
    *sink << j.dump(2) << "\n";

    RunManifest m = base_manifest("lrt", a.c, seed);
    record_pairs_input(m, a.in);
    m.flags["bootstrap"] = std::to_string(a.bootstrap);
    m.flags["inits"] = std::to_string(a.inits);
    emit_manifest(a.c, m);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Reproducibility analysis of ranked replicate signals", "idrkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    std::function<void()> action;

    PairArgs pair;
    auto* sp = app.add_subcommand("pair", "pair overlapping peaks across two replicates");
    sp->add_option("--rep1", pair.rep1, "replicate-1 peak file")->required()->check(CLI::ExistingFile);
    sp->add_option("--rep2", pair.rep2, "replicate-2 peak file")->required()->check(CLI::ExistingFile);
    sp->add_option("--format", pair.format)->check(CLI::IsMember({"narrowPeak", "bed-score"}))->capture_default_str();
    sp->add_option("--score-column", pair.score_column)
        ->check(CLI::IsMember({"score", "signalValue", "pValue", "qValue"}))
        ->capture_default_str();
    sp->add_option("--score-direction", pair.score_direction)
        ->check(CLI::IsMember({"high-is-better", "low-is-better"}))
        ->capture_default_str();
    sp->add_option("--width", pair.width, "truncation width in bp")->check(CLI::PositiveNumber)->capture_default_str();
    add_threads(sp, pair.c);
    add_output(sp, pair.c, "paired TSV");
    sp->callback([&] { action = [&] { run_pair(pair, out, err); }; });

    FitArgs fa;
    auto* sf = app.add_subcommand("fit", "fit the copula mixture and report posteriors");
    add_pairs_input(sf, fa.in);
    sf->add_option("--inits", fa.inits, "random starts")->check(CLI::PositiveNumber)->capture_default_str();
    sf->add_option("--max-outer", fa.max_outer, "outer iterations per start")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sf->add_option("--theta", fa.theta_path, "parameter JSON path (default: standard output)");
    add_seed(sf, fa.c);
    add_threads(sf, fa.c);
    sf->add_flag("--strict", fa.c.strict, "exit 3 when the fit does not converge");
    add_output(sf, fa.c, "per-signal TSV");
    sf->callback([&] { action = [&] { run_fit(fa, out, err); }; });

    CurveArgs ca;
    auto* sc = app.add_subcommand("curve", "correspondence curve and its derivative");
    add_pairs_input(sc, ca.in);
    sc->add_option("--grid", ca.grid, "number of grid points")->capture_default_str();
    sc->add_option("--df", ca.df, "smoothing-spline degrees of freedom")->capture_default_str();
    add_output(sc, ca.c, "curve CSV");
    sc->callback([&] { action = [&] { run_curve(ca, out, err); }; });

    SelectArgs sa;
    auto* ss = app.add_subcommand("select", "select signals at a target IDR");
    ss->add_option("--input,-i", sa.input, "TSV written by fit")->required();
    ss->add_option("--idr-threshold", sa.threshold)->capture_default_str();
    add_output(ss, sa.c, "selected rows TSV");
    ss->callback([&] { action = [&] { run_select(sa, out, err); }; });

    SimulateArgs sim;
    auto* sm = app.add_subcommand("simulate", "simulation study on a scenario");
    sm->add_option("--scenario", sim.scenario, "S1, S2, S3, S4 or a scenario JSON file")->capture_default_str();
    sm->add_option("--n", sim.n, "signals per dataset")->check(CLI::PositiveNumber)->capture_default_str();
    sm->add_option("--reps", sim.reps, "datasets")->check(CLI::PositiveNumber)->capture_default_str();
    sm->add_option("--inits", sim.inits, "random starts per fit")->check(CLI::PositiveNumber)->capture_default_str();
    sm->add_option("--out-dir", sim.out_dir, "directory for calibration, trade-off and parameter CSVs (created if missing)");
    add_seed(sm, sim.c);
    add_threads(sm, sim.c);
    sm->add_flag("--strict", sim.c.strict, "exit 3 when any replicate does not converge");
    add_output(sm, sim.c, "parameter summary CSV");
    sm->callback([&] { action = [&] { run_simulate(sim, out, err); }; });

    CompareArgs cmp;
    auto* so = app.add_subcommand("compare", "IDR against Fisher, Stouffer and single-replicate BH");
    so->add_option("--input,-i", cmp.input, "paired p-value TSV")->required();
    so->add_option("--p1", cmp.p1, "replicate-1 p-value column")->capture_default_str();
    so->add_option("--p2", cmp.p2, "replicate-2 p-value column")->capture_default_str();
    so->add_option("--truth", cmp.truth, "0/1 label column for the trade-off table");
    so->add_option("--inits", cmp.inits, "random starts")->check(CLI::PositiveNumber)->capture_default_str();
    add_seed(so, cmp.c);
    add_threads(so, cmp.c);
    so->add_flag("--strict", cmp.c.strict, "exit 3 when the fit does not converge");
    add_output(so, cmp.c, "comparison CSV");
    so->callback([&] { action = [&] { run_compare(cmp, out, err); }; });

    LrtArgs la;
    auto* sl = app.add_subcommand("lrt", "one- vs two-component bootstrap likelihood-ratio test");
    add_pairs_input(sl, la.in);
    sl->add_option("--bootstrap", la.bootstrap, "bootstrap samples")->check(CLI::PositiveNumber)->capture_default_str();
    sl->add_option("--inits", la.inits, "random starts per fit")->check(CLI::PositiveNumber)->capture_default_str();
    add_seed(sl, la.c);
    add_threads(sl, la.c);
    add_output(sl, la.c, "result JSON");
    sl->callback([&] { action = [&] { run_lrt(la, out, err); }; });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        err << "error[usage]: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        action();
    } catch (const UsageError& e) {
        err << "error[usage]: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NotConverged& e) {
        err << "error[not-converged]: " << e.what() << "\n";
        return kExitNotConverged;
    } catch (const Error& e) {
        err << "error[" << e.code() << "]: " << e.what() << "\n";
        return kExitData;
    }
    return kExitOk;
}

}  // namespace idrkit::cli
