#include "idrkit/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "idrkit/combine.hpp"
#include "idrkit/errors.hpp"
#include "idrkit/idr_selection.hpp"
#include "idrkit/parallel.hpp"
#include "idrkit/random.hpp"
#include "idrkit/stats_dist.hpp"

namespace idrkit {

namespace {

constexpr double kPMin = std::numeric_limits<double>::min();
const double kPMax = std::nextafter(1.0, 0.0);

// p-value of the one-sided z-test applied to the t5-scale value of z.
double pvalue_of_latent(const SimScenario& scenario, double z) {
    const double lower = scenario_marginal_cdf(scenario, z);
    double x;
    if (lower <= 0.5) {
        x = t5_quantile(std::max(lower, kPMin));
    } else {
        x = -t5_quantile(std::max(scenario_marginal_sf(scenario, z), kPMin));
    }
    return std::clamp(normal_sf(x), kPMin, kPMax);
}

}  // namespace

void SimScenario::validate() const {
    if (components.size() < 2) throw DomainError("a scenario needs at least two components");
    double total = 0.0;
    for (const auto& c : components) {
        if (!(c.pi > 0.0 && c.pi < 1.0)) throw DomainError("component weights must lie in (0, 1)");
        if (!(c.rho >= 0.0 && c.rho < 1.0)) throw DomainError("component correlations must lie in [0, 1)");
        if (!(c.sigma_sq > 0.0)) throw DomainError("component variances must be positive");
        total += c.pi;
    }
    if (std::fabs(total - 1.0) > 1e-9) throw DomainError("component weights must sum to 1");
    const auto& null = components.front();
    if (null.mu != 0.0 || null.rho != 0.0 || null.sigma_sq != 1.0) {
        throw DomainError("component 0 must be the (pi0, 0, 0, 1) irreproducible component");
    }
    if (n < 2) throw DomainError("a scenario needs n >= 2");
}

Theta SimScenario::true_theta() const {
    const auto& c = components.at(1);
    return Theta{c.pi, c.mu, c.sigma_sq, c.rho};
}

ScenarioName parse_scenario_name(std::string_view name) {
    if (name == "S1") return ScenarioName::S1;
    if (name == "S2") return ScenarioName::S2;
    if (name == "S3") return ScenarioName::S3;
    if (name == "S4") return ScenarioName::S4;
    throw DomainError("unknown scenario '" + std::string(name) + "'");
}

SimScenario scenario_preset(ScenarioName name, std::size_t n, std::uint64_t seed) {
    SimScenario s;
    s.n = n;
    s.seed = seed;
    switch (name) {
        case ScenarioName::S1:
            s.label = "S1";
            s.components = {{0.35, 0.0, 0.0, 1.0}, {0.65, 2.5, 0.84, 1.0}};
            break;
        case ScenarioName::S2:
            s.label = "S2";
            s.components = {{0.70, 0.0, 0.0, 1.0}, {0.30, 2.5, 0.40, 1.0}};
            break;
        case ScenarioName::S3:
            s.label = "S3";
            s.components = {{0.95, 0.0, 0.0, 1.0}, {0.05, 2.5, 0.84, 1.0}};
            break;
        case ScenarioName::S4:
            s.label = "S4";
            s.components = {{0.28, 0.0, 0.0, 1.0}, {0.65, 3.0, 0.84, 1.0}, {0.07, 0.0, 0.64, 1.0}};
            break;
    }
    return s;
}

double scenario_marginal_cdf(const SimScenario& scenario, double z) {
    double total = 0.0;
    for (const auto& c : scenario.components) total += c.pi * normal_cdf((z - c.mu) / std::sqrt(c.sigma_sq));
    return total;
}

double scenario_marginal_sf(const SimScenario& scenario, double z) {
    double total = 0.0;
    for (const auto& c : scenario.components) total += c.pi * normal_sf((z - c.mu) / std::sqrt(c.sigma_sq));
    return total;
}

SimDataset simulate_dataset(const SimScenario& scenario) {
    scenario.validate();
    auto rng = make_stream(scenario.seed, 0x5151ULL);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<double> cumulative;
    double acc = 0.0;
    for (const auto& c : scenario.components) cumulative.push_back(acc += c.pi);

    SimDataset data;
    data.pvalues1.resize(scenario.n);
    data.pvalues2.resize(scenario.n);
    data.truth.resize(scenario.n);
    data.z1.resize(scenario.n);
    data.z2.resize(scenario.n);
    for (std::size_t i = 0; i < scenario.n; ++i) {
        const double draw = unif(rng);
        std::size_t k = 0;
        while (k + 1 < cumulative.size() && draw >= cumulative[k]) ++k;
        const auto& c = scenario.components[k];
        const double tau = std::sqrt(c.rho * c.sigma_sq);
        const double omega = std::sqrt((1.0 - c.rho) * c.sigma_sq);
        const double latent = c.mu + tau * gauss(rng);
        data.z1[i] = latent + omega * gauss(rng);
        data.z2[i] = latent + omega * gauss(rng);
        data.truth[i] = static_cast<int>(k);
    }
    for (std::size_t i = 0; i < scenario.n; ++i) {
        data.pvalues1[i] = pvalue_of_latent(scenario, data.z1[i]);
        data.pvalues2[i] = pvalue_of_latent(scenario, data.z2[i]);
    }
    return data;
}

SimScenario replicate_scenario(const SimScenario& scenario, std::size_t rep) {
    SimScenario out = scenario;
    out.seed = mix_seed(scenario.seed ^ (0xa5a5a5a5ULL + rep * 0x9e3779b97f4a7c15ULL));
    return out;
}

std::string_view method_name(Method m) {
    switch (m) {
        case Method::Idr: return "idr";
        case Method::SingleReplicate: return "single";
        case Method::Fisher: return "fisher";
        case Method::Stouffer: return "stouffer";
    }
    return "unknown";
}

std::vector<double> default_nominal_levels() {
    std::vector<double> levels{0.0};
    for (int k = 1; k <= 40; ++k) levels.push_back(k / 200.0);
    return levels;
}

std::vector<double> default_tradeoff_thresholds() {
    std::vector<double> t;
    for (int k = 1; k <= 40; ++k) t.push_back(k / 200.0);
    for (int k = 5; k <= 20; ++k) t.push_back(k / 20.0);
    return t;
}

ReplicateOutcome evaluate_methods(std::span<const double> pvalues1, std::span<const double> pvalues2,
                                  std::vector<int> truth, const FitConfig& fit_config) {
    const std::size_t n = pvalues1.size();
    if (pvalues2.size() != n) throw DomainError("p-value vectors differ in length");
    if (!truth.empty() && truth.size() != n) throw DomainError("truth labels differ in length from p-values");

    // high score = strong evidence
    std::vector<double> s1(n), s2(n);
    for (std::size_t i = 0; i < n; ++i) {
        s1[i] = -pvalues1[i];
        s2[i] = -pvalues2[i];
    }
    const auto ranked = rank_scores(ScoredPairSet(std::move(s1), std::move(s2)));
    const auto fitted = fit(ranked, fit_config);

    ReplicateOutcome out;
    out.theta = fitted.theta;
    out.loglik = fitted.loglik;
    out.converged = fitted.converged;
    out.truth = std::move(truth);

    auto& idr = out.statistic[static_cast<int>(Method::Idr)];
    idr.resize(n);
    for (std::size_t i = 0; i < n; ++i) idr[i] = 1.0 - fitted.posterior[i];
    const auto table = idr_table(idr);
    out.cumulative_idr = table.cumulative_idr;
    out.idr_order.resize(n);
    for (std::size_t k = 0; k < n; ++k) out.idr_order[k] = table.entries[k].index;

    out.statistic[static_cast<int>(Method::SingleReplicate)] = bh_adjust(pvalues1);
    out.statistic[static_cast<int>(Method::Fisher)] = bh_adjust(fisher_combined_pvalues(pvalues1, pvalues2));
    out.statistic[static_cast<int>(Method::Stouffer)] = bh_adjust(stouffer_combined_pvalues(pvalues1, pvalues2));
    return out;
}

ReplicateOutcome run_replicate(const SimScenario& scenario, std::size_t rep, const FitConfig& fit_config) {
    const SimDataset data = simulate_dataset(replicate_scenario(scenario, rep));
    ReplicateOutcome out = evaluate_methods(data.pvalues1, data.pvalues2, data.truth, fit_config);
    out.rep = rep;
    return out;
}

const CalibrationRow& CalibrationTable::at(Method method, double nominal) const {
    for (const auto& r : rows) {
        if (r.method == method && std::fabs(r.nominal - nominal) < 1e-12) return r;
    }
    throw DomainError("no calibration row for the requested level");
}

CalibrationTable calibrate(const SimScenario& scenario, const std::vector<ReplicateOutcome>& reps,
                           const std::vector<double>& nominal_levels) {
    CalibrationTable table;
    table.label = scenario.label;
    table.n_reps = reps.size();
    for (Method m : kAllMethods) {
        for (double level : nominal_levels) {
            double fdr_sum = 0.0;
            double selected_sum = 0.0;
            for (const auto& rep : reps) {
                std::size_t selected = 0;
                std::size_t false_calls = 0;
                if (level > 0.0) {
                    if (m == Method::Idr) {
                        if (level < 1.0) {
                            const auto it =
                                std::upper_bound(rep.cumulative_idr.begin(), rep.cumulative_idr.end(), level);
                            selected = static_cast<std::size_t>(it - rep.cumulative_idr.begin());
                        } else {
                            selected = rep.idr_order.size();
                        }
                        for (std::size_t k = 0; k < selected; ++k) false_calls += rep.truth[rep.idr_order[k]] != 1;
                    } else {
                        const auto& q = rep.statistic[static_cast<int>(m)];
                        for (std::size_t i = 0; i < q.size(); ++i) {
                            if (q[i] <= level) {
                                ++selected;
                                false_calls += rep.truth[i] != 1;
                            }
                        }
                    }
                }
                fdr_sum += selected == 0 ? 0.0 : static_cast<double>(false_calls) / static_cast<double>(selected);
                selected_sum += static_cast<double>(selected);
            }
            const double count = std::max<double>(1.0, static_cast<double>(reps.size()));
            table.rows.push_back(CalibrationRow{m, level, fdr_sum / count, selected_sum / count});
        }
    }
    return table;
}

std::size_t TradeoffTable::matched_correct(std::size_t rep, Method method, std::size_t max_incorrect) const {
    for (const auto& r : matched) {
        if (r.rep == rep && r.method == method && r.max_incorrect == max_incorrect) return r.correct;
    }
    throw DomainError("no matched trade-off entry for the requested replicate");
}

TradeoffTable tradeoff(const SimScenario& scenario, const std::vector<ReplicateOutcome>& reps,
                       const std::vector<double>& thresholds, const std::vector<std::size_t>& matched_incorrect) {
    return tradeoff(scenario.label, reps, thresholds, matched_incorrect);
}

TradeoffTable tradeoff(const std::string& label, const std::vector<ReplicateOutcome>& reps,
                       const std::vector<double>& thresholds, const std::vector<std::size_t>& matched_incorrect) {
    TradeoffTable table;
    table.label = label;
    table.n_reps = reps.size();
    for (const auto& rep : reps) {
        const std::size_t n = rep.truth.size();
        for (Method m : kAllMethods) {
            const auto& stat = rep.statistic[static_cast<int>(m)];
            std::vector<std::size_t> order(n);
            for (std::size_t i = 0; i < n; ++i) order[i] = i;
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return stat[a] < stat[b]; });

            // threshold sweep: a call is made when the statistic is <= threshold
            std::size_t pos = 0;
            std::size_t correct = 0;
            std::size_t incorrect = 0;
            auto sorted_thresholds = thresholds;
            std::sort(sorted_thresholds.begin(), sorted_thresholds.end());
            for (double thr : sorted_thresholds) {
                while (pos < n && stat[order[pos]] <= thr) {
                    (rep.truth[order[pos]] == 1 ? correct : incorrect) += 1;
                    ++pos;
                }
                table.rows.push_back(TradeoffRow{rep.rep, m, thr, incorrect, correct});
            }

            // exact matched counts over every distinct statistic value;
            // tied statistics enter together
            std::vector<std::size_t> best(matched_incorrect.size(), 0);
            correct = 0;
            incorrect = 0;
            pos = 0;
            while (pos < n) {
                std::size_t end = pos;
                while (end < n && stat[order[end]] == stat[order[pos]]) {
                    (rep.truth[order[end]] == 1 ? correct : incorrect) += 1;
                    ++end;
                }
                pos = end;
                for (std::size_t j = 0; j < matched_incorrect.size(); ++j) {
                    if (incorrect <= matched_incorrect[j]) best[j] = std::max(best[j], correct);
                }
            }
            for (std::size_t j = 0; j < matched_incorrect.size(); ++j) {
                table.matched.push_back(MatchedRow{rep.rep, m, matched_incorrect[j], best[j]});
            }
        }
    }
    return table;
}

std::vector<ParamSummary> summarize_parameters(const SimScenario& scenario, const std::vector<ReplicateOutcome>& reps) {
    const Theta truth = scenario.true_theta();
    auto summarize = [&](const std::string& name, double true_value, auto getter) {
        ParamSummary s{name, true_value, 0.0, 0.0};
        if (reps.empty()) return s;
        for (const auto& r : reps) s.mean += getter(r.theta);
        s.mean /= static_cast<double>(reps.size());
        if (reps.size() > 1) {
            double ss = 0.0;
            for (const auto& r : reps) ss += std::pow(getter(r.theta) - s.mean, 2);
            s.sd = std::sqrt(ss / static_cast<double>(reps.size() - 1));
        }
        return s;
    };
    return {
        summarize("pi1", truth.pi1, [](const Theta& t) { return t.pi1; }),
        summarize("rho1", truth.rho1, [](const Theta& t) { return t.rho1; }),
        summarize("mu1", truth.mu1, [](const Theta& t) { return t.mu1; }),
        summarize("sigma1_sq", truth.sigma1_sq, [](const Theta& t) { return t.sigma1_sq; }),
    };
}

ExperimentReport run_experiments(const SimScenario& scenario, const ExperimentConfig& config) {
    scenario.validate();
    if (config.n_reps < 1) throw DomainError("n_reps must be >= 1");
    ExperimentReport report;
    report.scenario = scenario;
    report.replicates.resize(config.n_reps);
    // parallelism goes to replicates; each replicate's fit runs single-threaded
    FitConfig fit_config = config.fit;
    if (config.threads > 1) fit_config.threads = 1;
    parallel_for(config.n_reps, config.threads,
                 [&](std::size_t r) { report.replicates[r] = run_replicate(scenario, r, fit_config); });

    const auto levels = config.nominal_levels.empty() ? default_nominal_levels() : config.nominal_levels;
    const auto thresholds =
        config.tradeoff_thresholds.empty() ? default_tradeoff_thresholds() : config.tradeoff_thresholds;
    report.calibration = calibrate(scenario, report.replicates, levels);
    report.tradeoff = tradeoff(scenario, report.replicates, thresholds, config.matched_incorrect);
    report.params = summarize_parameters(scenario, report.replicates);
    return report;
}

CalibrationTable calibration_experiment(const SimScenario& scenario, std::size_t n_reps) {
    ExperimentConfig config;
    config.n_reps = n_reps;
    config.fit.rng_seed = scenario.seed;
    return run_experiments(scenario, config).calibration;
}

TradeoffTable discrimination_experiment(const SimScenario& scenario, std::size_t n_reps) {
    ExperimentConfig config;
    config.n_reps = n_reps;
    config.fit.rng_seed = scenario.seed;
    return run_experiments(scenario, config).tradeoff;
}

}  // namespace idrkit
