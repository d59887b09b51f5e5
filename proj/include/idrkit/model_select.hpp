#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "idrkit/copula_mixture.hpp"
#include "idrkit/rank_transform.hpp"

namespace idrkit {

/// Minimum number of signals accepted by fit_one_component.
inline constexpr std::size_t kMinOneComponentSignals = 50;

struct OneComponentFit {
    double rho = 0.0;
    double loglik = 0.0;   ///< Gaussian-copula log-likelihood at rho
};

/// Single Gaussian copula on z = Phi^{-1}(u). The correlation is found by
/// Brent search over (-0.999, 0.999). Throws DomainError below
/// kMinOneComponentSignals.
OneComponentFit fit_one_component(const RankedPairSet& ranked);

/// Gaussian-copula log-likelihood of normal scores at correlation rho.
double gaussian_copula_log_likelihood(const std::vector<double>& z1, const std::vector<double>& z2, double rho);

struct LrtResult {
    double rho_null = 0.0;
    double loglik_null = 0.0;
    double loglik_alt = 0.0;
    double two_log_lambda = 0.0;
    std::vector<double> bootstrap_stats;   ///< +inf for draws that kept failing
    double p_value = 1.0;
    std::size_t n_bootstrap = 0;
    /// Set when two_log_lambda < 0, which means the two-component optimizer
    /// stopped below the nested one-component optimum.
    bool negative_statistic = false;
    std::size_t failed_draws = 0;
};

inline constexpr std::size_t kMaxBootstrapRetries = 3;

/// Tolerance below zero accepted for two_log_lambda before it is treated as
/// an optimizer failure rather than noise.
inline constexpr double kNegativeStatTolerance = 0.1;

/// Add-one bootstrap p-value (#{stat >= observed} + 1) / (B + 1).
double bootstrap_p_value(const std::vector<double>& bootstrap_stats, double observed);

/// One-component vs two-component likelihood ratio with a parametric
/// bootstrap null drawn from the fitted single Gaussian copula.
LrtResult bootstrap_lrt(const RankedPairSet& ranked, std::size_t n_bootstrap, std::uint64_t seed,
                        const FitConfig& fit_config);

}  // namespace idrkit
