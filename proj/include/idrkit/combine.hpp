#pragma once

#include <span>
#include <vector>

namespace idrkit {

enum class CombineMethod { Fisher, Stouffer };

struct CombinedResult {
    double statistic = 0.0;
    double combined_p = 1.0;
    CombineMethod method = CombineMethod::Fisher;
};

/// Q = -2 (log p1 + log p2) referred to chi^2 with 4 df. p in (0, 1].
CombinedResult fisher_combine(double p1, double p2);

/// S = (Phi^-1(1 - p1) + Phi^-1(1 - p2)) / sqrt(2) referred to N(0, 1). p in (0, 1).
CombinedResult stouffer_combine(double p1, double p2);

std::vector<double> fisher_combined_pvalues(std::span<const double> p1, std::span<const double> p2);
std::vector<double> stouffer_combined_pvalues(std::span<const double> p1, std::span<const double> p2);

}  // namespace idrkit
