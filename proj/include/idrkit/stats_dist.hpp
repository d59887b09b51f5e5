#pragma once

#include <span>
#include <vector>

namespace idrkit {

/// Equal-margin bivariate normal: both coordinates share mean and variance.
struct BivariateGaussianParams {
    double mean = 0.0;
    double variance = 1.0;
    double rho = 0.0;

    /// Throws DomainError unless variance > 0 and |rho| < 1.
    void validate() const;
};

double normal_pdf(double z);
double normal_log_pdf(double z);
/// Standard normal CDF, accurate in both tails.
double normal_cdf(double z);
/// Upper tail 1 - Phi(z) without cancellation.
double normal_sf(double z);
/// Inverse of normal_cdf on (0, 1). Throws DomainError outside.
double normal_quantile(double p);

double bivariate_normal_density(double z1, double z2, const BivariateGaussianParams& params);
double bivariate_normal_log_density(double z1, double z2, const BivariateGaussianParams& params);

/// P(chi^2_df > x) for even df by the finite Poisson sum.
double chisq_survival_even_df(double x, int df);

/// Student t with five degrees of freedom.
double t5_pdf(double x);
double t5_cdf(double x);
double t5_quantile(double p);

/// Benjamini-Hochberg step-up adjusted p-values, returned in input order.
std::vector<double> bh_adjust(std::span<const double> pvalues);

}  // namespace idrkit
