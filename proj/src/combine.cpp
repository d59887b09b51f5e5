#include "idrkit/combine.hpp"

#include <cmath>
#include <numbers>

#include "idrkit/errors.hpp"
#include "idrkit/stats_dist.hpp"

namespace idrkit {

CombinedResult fisher_combine(double p1, double p2) {
    if (!(p1 > 0.0 && p1 <= 1.0) || !(p2 > 0.0 && p2 <= 1.0)) {
        throw DomainError("Fisher combination requires p-values in (0, 1]");
    }
    CombinedResult out;
    out.method = CombineMethod::Fisher;
    // -0.0 when both are 1; keep the statistic non-negative
    out.statistic = std::fabs(-2.0 * (std::log(p1) + std::log(p2)));
    out.combined_p = chisq_survival_even_df(out.statistic, 4);
    return out;
}

CombinedResult stouffer_combine(double p1, double p2) {
    if (!(p1 > 0.0 && p1 < 1.0) || !(p2 > 0.0 && p2 < 1.0)) {
        throw DomainError("Stouffer combination requires p-values in (0, 1)");
    }
    CombinedResult out;
    out.method = CombineMethod::Stouffer;
    // Phi^-1(1 - p) = -Phi^-1(p), which avoids rounding 1 - p for tiny p
    out.statistic = -(normal_quantile(p1) + normal_quantile(p2)) / std::numbers::sqrt2;
    out.combined_p = normal_sf(out.statistic);
    return out;
}

std::vector<double> fisher_combined_pvalues(std::span<const double> p1, std::span<const double> p2) {
    if (p1.size() != p2.size()) throw DomainError("p-value vectors differ in length");
    std::vector<double> out(p1.size());
    for (std::size_t i = 0; i < p1.size(); ++i) out[i] = fisher_combine(p1[i], p2[i]).combined_p;
    return out;
}

std::vector<double> stouffer_combined_pvalues(std::span<const double> p1, std::span<const double> p2) {
    if (p1.size() != p2.size()) throw DomainError("p-value vectors differ in length");
    std::vector<double> out(p1.size());
    for (std::size_t i = 0; i < p1.size(); ++i) out[i] = stouffer_combine(p1[i], p2[i]).combined_p;
    return out;
}

}  // namespace idrkit
