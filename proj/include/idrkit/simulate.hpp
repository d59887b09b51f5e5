#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "idrkit/copula_mixture.hpp"

namespace idrkit {

/// One latent component: Z | K=k ~ N(mu, rho sigma^2) plus per-replicate
/// noise N(0, (1 - rho) sigma^2), so the replicate correlation is rho.
struct SimComponent {
    double pi = 0.0;
    double mu = 0.0;
    double rho = 0.0;
    double sigma_sq = 1.0;
};

struct SimScenario {
    std::vector<SimComponent> components;  ///< [0] is the irreproducible (pi0, 0, 0, 1) component
    std::size_t n = 10000;
    std::uint64_t seed = 1;
    std::string label;

    void validate() const;
    /// Copula-mixture parameters of component 1.
    Theta true_theta() const;
};

struct SimDataset {
    std::vector<double> pvalues1;
    std::vector<double> pvalues2;
    std::vector<int> truth;
    std::vector<double> z1;  ///< latent replicate values before the t5 / z-test transform
    std::vector<double> z2;
    std::size_t size() const noexcept { return truth.size(); }
};

enum class ScenarioName { S1, S2, S3, S4 };

/// Parses "S1".."S4"; DomainError otherwise.
ScenarioName parse_scenario_name(std::string_view name);
SimScenario scenario_preset(ScenarioName name, std::size_t n = 10000, std::uint64_t seed = 1);

/// Marginal CDF of a latent replicate value under the scenario's mixture.
double scenario_marginal_cdf(const SimScenario& scenario, double z);
double scenario_marginal_sf(const SimScenario& scenario, double z);

SimDataset simulate_dataset(const SimScenario& scenario);

/// Scenario with `seed` replaced by the derived seed of replicate `rep`.
SimScenario replicate_scenario(const SimScenario& scenario, std::size_t rep);

enum class Method { Idr = 0, SingleReplicate = 1, Fisher = 2, Stouffer = 3 };
inline constexpr std::array<Method, 4> kAllMethods{Method::Idr, Method::SingleReplicate, Method::Fisher,
                                                   Method::Stouffer};
std::string_view method_name(Method m);

struct ExperimentConfig {
    std::size_t n_reps = 10;
    FitConfig fit{};
    std::vector<double> nominal_levels;          ///< calibration grid; defaults to {0, 0.005, ..., 0.2}
    std::vector<double> tradeoff_thresholds;     ///< defaults to the nominal grid then 0.25 .. 1.0
    std::vector<std::size_t> matched_incorrect{50, 100, 200, 500};
    unsigned threads = 1;
};

std::vector<double> default_nominal_levels();
std::vector<double> default_tradeoff_thresholds();

/// Per-replicate evidence: smaller statistic = stronger call for every method
/// (local idr for IDR, BH q-values for the baselines).
struct ReplicateOutcome {
    std::size_t rep = 0;
    Theta theta;
    double loglik = 0.0;
    bool converged = false;
    std::vector<int> truth;
    std::array<std::vector<double>, 4> statistic;
    std::vector<double> cumulative_idr;      ///< aligned with idr_order
    std::vector<std::size_t> idr_order;      ///< signal indices by ascending local idr
};

/// Fits the copula mixture to -p scores and computes every method's
/// statistic. `truth` may be empty for unlabeled data.
ReplicateOutcome evaluate_methods(std::span<const double> pvalues1, std::span<const double> pvalues2,
                                  std::vector<int> truth, const FitConfig& fit_config);

ReplicateOutcome run_replicate(const SimScenario& scenario, std::size_t rep, const FitConfig& fit_config);

struct CalibrationRow {
    Method method;
    double nominal = 0.0;
    double empirical_fdr = 0.0;   ///< mean over replicates; empty selections count as 0
    double mean_selected = 0.0;
};

struct CalibrationTable {
    std::string label;
    std::size_t n_reps = 0;
    std::vector<CalibrationRow> rows;
    /// Row for (method, nominal); DomainError when absent.
    const CalibrationRow& at(Method method, double nominal) const;
};

struct TradeoffRow {
    std::size_t rep = 0;
    Method method;
    double threshold = 0.0;
    std::size_t incorrect = 0;
    std::size_t correct = 0;
};

/// Correct calls achievable with at most `max_incorrect` incorrect calls.
struct MatchedRow {
    std::size_t rep = 0;
    Method method;
    std::size_t max_incorrect = 0;
    std::size_t correct = 0;
};

struct TradeoffTable {
    std::string label;
    std::size_t n_reps = 0;
    std::vector<TradeoffRow> rows;
    std::vector<MatchedRow> matched;
    std::size_t matched_correct(std::size_t rep, Method method, std::size_t max_incorrect) const;
};

struct ParamSummary {
    std::string name;
    double truth = 0.0;
    double mean = 0.0;
    double sd = 0.0;
};

struct ExperimentReport {
    SimScenario scenario;
    std::vector<ReplicateOutcome> replicates;
    CalibrationTable calibration;
    TradeoffTable tradeoff;
    std::vector<ParamSummary> params;
};

CalibrationTable calibrate(const SimScenario& scenario, const std::vector<ReplicateOutcome>& reps,
                           const std::vector<double>& nominal_levels);
TradeoffTable tradeoff(const SimScenario& scenario, const std::vector<ReplicateOutcome>& reps,
                       const std::vector<double>& thresholds, const std::vector<std::size_t>& matched_incorrect);
/// Same as above for replicates that carry truth labels but no scenario.
TradeoffTable tradeoff(const std::string& label, const std::vector<ReplicateOutcome>& reps,
                       const std::vector<double>& thresholds, const std::vector<std::size_t>& matched_incorrect);
std::vector<ParamSummary> summarize_parameters(const SimScenario& scenario, const std::vector<ReplicateOutcome>& reps);

/// Simulates config.n_reps datasets and evaluates every method on them.
ExperimentReport run_experiments(const SimScenario& scenario, const ExperimentConfig& config);

CalibrationTable calibration_experiment(const SimScenario& scenario, std::size_t n_reps);
TradeoffTable discrimination_experiment(const SimScenario& scenario, std::size_t n_reps);

}  // namespace idrkit
