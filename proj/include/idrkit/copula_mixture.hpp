#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "idrkit/rank_transform.hpp"

namespace idrkit {

/// Parameters of the reproducible component. The irreproducible component
/// is fixed at mean 0, variance 1, correlation 0 with weight 1 - pi1.
struct Theta {
    double pi1 = 0.5;
    double mu1 = 2.0;
    double sigma1_sq = 1.0;
    double rho1 = 0.5;

    double pi0() const noexcept { return 1.0 - pi1; }
    double sigma1() const;
    /// Throws DomainError unless 0 < pi1 < 1, sigma1_sq > 0, |rho1| < 1.
    void validate() const;
    /// Applies the estimation clamps on pi1 and rho1.
    Theta clamped() const;

    friend bool operator==(const Theta&, const Theta&) = default;
};

inline constexpr double kPiMin = 1e-4;
inline constexpr double kPiMax = 1.0 - 1e-4;
inline constexpr double kRhoMin = 1e-4;
inline constexpr double kRhoMax = 0.999;
/// Minimum summed responsibility before a component counts as starved.
inline constexpr double kMinComponentMass = 10.0;

/// Latent-scale pseudo-observations z = G^{-1}(u; theta).
struct PseudoData {
    std::vector<double> z1;
    std::vector<double> z2;
    std::size_t size() const noexcept { return z1.size(); }
};

/// Marginal of either latent coordinate: pi1 N(mu1, sigma1^2) + pi0 N(0, 1).
double marginal_mixture_cdf(double z, const Theta& theta);
double marginal_mixture_sf(double z, const Theta& theta);
double marginal_mixture_log_pdf(double z, const Theta& theta);
/// Inverse of marginal_mixture_cdf with |G(z) - u| < 1e-12. DomainError off (0, 1).
double marginal_mixture_quantile(double u, const Theta& theta);

PseudoData compute_pseudo_data(const RankedPairSet& ranked, const Theta& theta);

/// Mixture log-likelihood of the pseudo-data: sum log(pi0 h0 + pi1 h1).
double log_likelihood(const PseudoData& pseudo, const Theta& theta);
/// Copula log-likelihood: the mixture log-likelihood minus the log marginal
/// densities of both coordinates; comparable across parameter values.
double copula_log_likelihood(const PseudoData& pseudo, const Theta& theta);

/// Posterior P(K = 1 | z) per signal.
std::vector<double> posterior_reproducible(const PseudoData& pseudo, const Theta& theta);

struct InnerEmResult {
    Theta theta;
    std::vector<double> posterior;       ///< for the returned theta
    std::vector<double> loglik_trace;    ///< mixture log-likelihood per E-step
};

/// EM on fixed pseudo-data; stops when the log-likelihood gain drops below
/// `tol` or after `max_iters` M-steps. Throws DegenerateComponent when either
/// component's responsibility mass falls below kMinComponentMass.
InnerEmResult em_inner(const PseudoData& pseudo, const Theta& theta0, double tol, std::size_t max_iters);

struct ParamRange {
    double lo;
    double hi;
};

struct InitRanges {
    ParamRange pi1{0.05, 0.95};
    ParamRange mu1{1.0, 4.0};
    ParamRange sigma1_sq{0.5, 2.0};
    ParamRange rho1{0.1, 0.9};
};

/// Likelihood tracked across outer steps for the stopping rule and for
/// choosing among random starts.
enum class OuterMonitor {
    Copula,   ///< copula log-likelihood (marginal densities removed)
    Mixture,  ///< mixture log-likelihood of the refreshed pseudo-data
};

struct FitConfig {
    std::size_t n_inits = 10;
    double inner_tol = 1e-4;
    std::size_t inner_max_iters = 30;
    double outer_tol = 0.01;
    std::size_t outer_max_iters = 100;
    std::uint64_t rng_seed = 1;
    InitRanges init_ranges{};
    /// Extrapolate the outer fixed-point map (squared iteration with a
    /// likelihood safeguard). When false every outer step is a plain
    /// pseudo-data refresh followed by inner EM.
    bool accelerate = false;
    OuterMonitor monitor = OuterMonitor::Copula;
    unsigned threads = 1;

    void validate() const;
};

/// One random start of the two-stage procedure.
struct StartResult {
    std::size_t init_index = 0;
    Theta initial;
    Theta theta;
    double loglik = 0.0;                              ///< copula log-likelihood at the end
    std::vector<double> loglik_trace;                 ///< copula log-likelihood after each outer step
    std::vector<std::vector<double>> inner_traces;    ///< one mixture trace per inner EM phase
    std::size_t n_outer_iters = 0;
    bool converged = false;
    bool failed = false;                              ///< discarded after DegenerateComponent
};

struct FitResult {
    Theta theta;
    double loglik = 0.0;
    std::vector<double> loglik_trace;
    std::vector<std::vector<double>> inner_traces;
    std::vector<double> posterior;
    PseudoData pseudo;
    std::size_t n_outer_iters = 0;
    bool converged = false;
    std::size_t init_index = 0;
    std::vector<StartResult> starts;
    bool small_sample = false;
};

inline constexpr std::size_t kRecommendedMinSignals = 50;

/// Draws the starting point of random init `index` from the seeded stream.
Theta random_initial_theta(const FitConfig& config, std::size_t index);

/// Runs the alternating pseudo-data / EM procedure from a single start.
StartResult fit_from(const RankedPairSet& ranked, const Theta& theta0, const FitConfig& config,
                     std::size_t init_index = 0);

/// Best of config.n_inits random starts by final copula log-likelihood,
/// ties broken by the lower init index. Throws DegenerateComponent when
/// every start degenerates.
FitResult fit(const RankedPairSet& ranked, const FitConfig& config);

}  // namespace idrkit
