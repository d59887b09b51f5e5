#include "idrkit/copula_mixture.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "idrkit/errors.hpp"
#include "idrkit/parallel.hpp"
#include "idrkit/random.hpp"
#include "idrkit/stats_dist.hpp"

namespace idrkit {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;
constexpr double kSigmaSqMin = 1e-6;
constexpr double kMuMin = 1e-6;

double log_sum_exp(double a, double b) {
    const double m = std::max(a, b);
    if (m == -std::numeric_limits<double>::infinity()) return m;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Per-theta constants of the two component log densities.
struct ComponentTerms {
    double log_pi0;
    double log_pi1;
    double mu;
    double log_norm1;
    double inv_scale1;  // 1 / (sigma^2 (1 - rho^2))
    double rho;

    explicit ComponentTerms(const Theta& theta)
        : log_pi0(std::log(theta.pi0())),
          log_pi1(std::log(theta.pi1)),
          mu(theta.mu1),
          log_norm1(-kLogTwoPi - std::log(theta.sigma1_sq) - 0.5 * std::log1p(-theta.rho1 * theta.rho1)),
          inv_scale1(1.0 / (theta.sigma1_sq * (1.0 - theta.rho1 * theta.rho1))),
          rho(theta.rho1) {}

    double weighted_log_h0(double z1, double z2) const { return log_pi0 - kLogTwoPi - 0.5 * (z1 * z1 + z2 * z2); }

    double weighted_log_h1(double z1, double z2) const {
        const double a = z1 - mu;
        const double b = z2 - mu;
        return log_pi1 + log_norm1 - 0.5 * inv_scale1 * ((a * a + b * b) - 2.0 * rho * (a * b));
    }
};

// Monotone residual of G(z) = u, evaluated on the smaller tail.
double quantile_residual(double z, double u, const Theta& theta) {
    return u <= 0.5 ? marginal_mixture_cdf(z, theta) - u : (1.0 - u) - marginal_mixture_sf(z, theta);
}

// Safeguarded Newton inside a bracket [lo, hi] with G(lo) < u < G(hi).
double solve_quantile(double u, const Theta& theta, double lo, double hi, double guess) {
    double z = (guess > lo && guess < hi) ? guess : 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = quantile_residual(z, u, theta);
        if (std::fabs(f) < 1e-14) break;
        if (f < 0.0) lo = z; else hi = z;
        const double dens = std::exp(marginal_mixture_log_pdf(z, theta));
        double next = dens > 0.0 ? z - f / dens : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == z || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(z))) {
            z = next;
            break;
        }
        z = next;
    }
    return z;
}

std::pair<double, double> global_bracket(double u, const Theta& theta) {
    double lo = -10.0;
    while (marginal_mixture_cdf(lo, theta) >= u) lo -= 10.0;
    const double sigma = theta.sigma1();
    double hi = theta.mu1 + 10.0 * sigma;
    while (quantile_residual(hi, u, theta) <= 0.0) hi += 10.0 * std::max(1.0, sigma);
    return {lo, hi};
}

void check_theta_for_estimation(const Theta& theta) {
    theta.validate();
}

}  // namespace

double Theta::sigma1() const { return std::sqrt(sigma1_sq); }

void Theta::validate() const {
    if (!(pi1 > 0.0 && pi1 < 1.0)) throw DomainError("pi1 must lie in (0, 1)");
    if (!std::isfinite(mu1)) throw DomainError("mu1 must be finite");
    if (!(sigma1_sq > 0.0) || !std::isfinite(sigma1_sq)) throw DomainError("sigma1_sq must be > 0");
    if (!(std::fabs(rho1) < 1.0)) throw DomainError("rho1 must lie in (-1, 1)");
}

Theta Theta::clamped() const {
    Theta out = *this;
    out.pi1 = std::clamp(pi1, kPiMin, kPiMax);
    out.rho1 = std::clamp(rho1, kRhoMin, kRhoMax);
    return out;
}

double marginal_mixture_cdf(double z, const Theta& theta) {
    return theta.pi1 * normal_cdf((z - theta.mu1) / theta.sigma1()) + theta.pi0() * normal_cdf(z);
}

double marginal_mixture_sf(double z, const Theta& theta) {
    return theta.pi1 * normal_sf((z - theta.mu1) / theta.sigma1()) + theta.pi0() * normal_sf(z);
}

double marginal_mixture_log_pdf(double z, const Theta& theta) {
    const double sigma = theta.sigma1();
    const double x = (z - theta.mu1) / sigma;
    return log_sum_exp(std::log(theta.pi0()) + normal_log_pdf(z), std::log(theta.pi1) + normal_log_pdf(x) - std::log(sigma));
}

double marginal_mixture_quantile(double u, const Theta& theta) {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("marginal_mixture_quantile requires u in (0, 1)");
    const auto [lo, hi] = global_bracket(u, theta);
    return solve_quantile(u, theta, lo, hi, 0.5 * (lo + hi));
}

PseudoData compute_pseudo_data(const RankedPairSet& ranked, const Theta& theta) {
    theta.validate();
    const std::size_t n = ranked.size();
    // u values are rank / (n + 1), so both coordinates share one table of
    // quantiles indexed by rank. Solve in increasing rank order, warm-starting
    // each bracket at the previous solution.
    std::vector<bool> used(n + 1, false);
    for (std::size_t i = 0; i < n; ++i) {
        used[ranked.ranks1[i]] = true;
        used[ranked.ranks2[i]] = true;
    }
    const double denom = static_cast<double>(n) + 1.0;
    std::vector<double> z_of_rank(n + 1, 0.0);
    bool have_prev = false;
    double prev_z = 0.0;
    double prev_u = 0.0;
    double hi = 0.0;
    for (std::size_t r = 1; r <= n; ++r) {
        if (!used[r]) continue;
        const double u = static_cast<double>(r) / denom;
        double lo;
        double guess;
        if (!have_prev) {
            std::tie(lo, hi) = global_bracket(u, theta);
            guess = 0.5 * (lo + hi);
        } else {
            lo = prev_z;
            while (quantile_residual(hi, u, theta) <= 0.0) hi += 10.0;
            const double dens = std::exp(marginal_mixture_log_pdf(prev_z, theta));
            guess = prev_z + (u - prev_u) / std::max(dens, 1e-300);
        }
        const double z = solve_quantile(u, theta, lo, hi, guess);
        z_of_rank[r] = z;
        prev_z = z;
        prev_u = u;
        have_prev = true;
    }

    PseudoData out;
    out.z1.resize(n);
    out.z2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.z1[i] = z_of_rank[ranked.ranks1[i]];
        out.z2[i] = z_of_rank[ranked.ranks2[i]];
    }
    return out;
}

double log_likelihood(const PseudoData& pseudo, const Theta& theta) {
    theta.validate();
    const ComponentTerms terms(theta);
    double total = 0.0;
    for (std::size_t i = 0; i < pseudo.size(); ++i) {
        const double l = log_sum_exp(terms.weighted_log_h0(pseudo.z1[i], pseudo.z2[i]),
                                     terms.weighted_log_h1(pseudo.z1[i], pseudo.z2[i]));
        if (!std::isfinite(l)) throw NumericalUnderflow("mixture density vanished at signal " + std::to_string(i));
        total += l;
    }
    return total;
}

double copula_log_likelihood(const PseudoData& pseudo, const Theta& theta) {
    double marginal = 0.0;
    for (std::size_t i = 0; i < pseudo.size(); ++i) {
        marginal += marginal_mixture_log_pdf(pseudo.z1[i], theta) + marginal_mixture_log_pdf(pseudo.z2[i], theta);
    }
    return log_likelihood(pseudo, theta) - marginal;
}

namespace {

// E-step: fills responsibilities for component 1, returns the log-likelihood.
double expectation(const PseudoData& pseudo, const Theta& theta, std::vector<double>& gamma) {
    const ComponentTerms terms(theta);
    gamma.resize(pseudo.size());
    double total = 0.0;
    for (std::size_t i = 0; i < pseudo.size(); ++i) {
        const double l0 = terms.weighted_log_h0(pseudo.z1[i], pseudo.z2[i]);
        const double l1 = terms.weighted_log_h1(pseudo.z1[i], pseudo.z2[i]);
        const double l = log_sum_exp(l0, l1);
        if (!std::isfinite(l)) throw NumericalUnderflow("mixture density vanished at signal " + std::to_string(i));
        gamma[i] = std::exp(l1 - l);
        total += l;
    }
    return total;
}

Theta maximization(const PseudoData& pseudo, const std::vector<double>& gamma) {
    const std::size_t n = pseudo.size();
    double mass = 0.0;
    double sum_z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mass += gamma[i];
        sum_z += gamma[i] * (pseudo.z1[i] + pseudo.z2[i]);
    }
    if (mass < kMinComponentMass) {
        throw DegenerateComponent("reproducible component mass " + std::to_string(mass) + " fell below " +
                                  std::to_string(kMinComponentMass));
    }
    Theta next;
    next.pi1 = std::clamp(mass / static_cast<double>(n), kPiMin, kPiMax);
    next.mu1 = std::max(sum_z / (2.0 * mass), kMuMin);

    double sq = 0.0;     // sum gamma (a^2 + b^2) / 2
    double cross = 0.0;  // sum gamma a b
    for (std::size_t i = 0; i < n; ++i) {
        const double a = pseudo.z1[i] - next.mu1;
        const double b = pseudo.z2[i] - next.mu1;
        sq += 0.5 * gamma[i] * (a * a + b * b);
        cross += gamma[i] * (a * b);
    }
    const double rho = sq > 0.0 ? cross / sq : 0.0;
    next.rho1 = std::clamp(rho, kRhoMin, kRhoMax);
    // variance maximizing the expected complete log-likelihood at the
    // (possibly clamped) correlation; equals sq / mass when unclamped
    const double r2 = next.rho1 * next.rho1;
    next.sigma1_sq = std::max((sq - next.rho1 * cross) / (mass * (1.0 - r2)), kSigmaSqMin);
    return next;
}

}  // namespace

std::vector<double> posterior_reproducible(const PseudoData& pseudo, const Theta& theta) {
    theta.validate();
    std::vector<double> gamma;
    expectation(pseudo, theta, gamma);
    return gamma;
}

InnerEmResult em_inner(const PseudoData& pseudo, const Theta& theta0, double tol, std::size_t max_iters) {
    check_theta_for_estimation(theta0);
    if (!(tol > 0.0)) throw DomainError("EM tolerance must be positive");

    InnerEmResult out;
    out.theta = theta0;
    for (std::size_t it = 0;; ++it) {
        const double ll = expectation(pseudo, out.theta, out.posterior);
        out.loglik_trace.push_back(ll);
        const std::size_t len = out.loglik_trace.size();
        if (len >= 2 && out.loglik_trace[len - 1] - out.loglik_trace[len - 2] < tol) break;
        if (it == max_iters) break;
        out.theta = maximization(pseudo, out.posterior);
    }
    return out;
}

void FitConfig::validate() const {
    if (n_inits < 1) throw DomainError("n_inits must be >= 1");
    if (!(inner_tol > 0.0) || !(outer_tol > 0.0)) throw DomainError("tolerances must be positive");
    auto check = [](const ParamRange& r, const char* name) {
        if (!(r.lo <= r.hi)) throw DomainError(std::string("empty init range for ") + name);
    };
    check(init_ranges.pi1, "pi1");
    check(init_ranges.mu1, "mu1");
    check(init_ranges.sigma1_sq, "sigma1_sq");
    check(init_ranges.rho1, "rho1");
}

Theta random_initial_theta(const FitConfig& config, std::size_t index) {
    auto rng = make_stream(config.rng_seed, 0x1d1f17ULL, index);
    auto draw = [&](const ParamRange& r) { return std::uniform_real_distribution<double>(r.lo, r.hi)(rng); };
    Theta theta;
    theta.pi1 = draw(config.init_ranges.pi1);
    theta.mu1 = draw(config.init_ranges.mu1);
    theta.sigma1_sq = draw(config.init_ranges.sigma1_sq);
    theta.rho1 = draw(config.init_ranges.rho1);
    return theta.clamped();
}

namespace {

double monitored_loglik(const PseudoData& pseudo, const Theta& theta, const FitConfig& config) {
    return config.monitor == OuterMonitor::Copula ? copula_log_likelihood(pseudo, theta) : log_likelihood(pseudo, theta);
}

// One application of the outer map: EM on the pseudo-data of `theta`,
// then the pseudo-data refresh at the new estimate.
struct OuterState {
    Theta theta;
    PseudoData pseudo;  // pseudo-data at theta
    double loglik = 0.0;
};

OuterState outer_step(const RankedPairSet& ranked, const OuterState& from, const FitConfig& config,
                      std::vector<std::vector<double>>& inner_traces) {
    auto inner = em_inner(from.pseudo, from.theta, config.inner_tol, config.inner_max_iters);
    inner_traces.push_back(std::move(inner.loglik_trace));
    OuterState next;
    next.theta = inner.theta;
    next.pseudo = compute_pseudo_data(ranked, next.theta);
    next.loglik = monitored_loglik(next.pseudo, next.theta, config);
    return next;
}

OuterState state_at(const RankedPairSet& ranked, const Theta& theta, const FitConfig& config) {
    OuterState s;
    s.theta = theta;
    s.pseudo = compute_pseudo_data(ranked, theta);
    s.loglik = monitored_loglik(s.pseudo, theta, config);
    return s;
}

// Unconstrained coordinates for extrapolation.
std::array<double, 4> to_free(const Theta& t) {
    return {std::log(t.pi1 / (1.0 - t.pi1)), std::log(t.mu1), std::log(t.sigma1_sq), std::atanh(t.rho1)};
}

Theta from_free(const std::array<double, 4>& x) {
    Theta t;
    t.pi1 = 1.0 / (1.0 + std::exp(-x[0]));
    t.mu1 = std::max(std::exp(x[1]), kMuMin);
    t.sigma1_sq = std::max(std::exp(x[2]), kSigmaSqMin);
    t.rho1 = std::tanh(x[3]);
    return t.clamped();
}

}  // namespace

StartResult fit_from(const RankedPairSet& ranked, const Theta& theta0, const FitConfig& config,
                     std::size_t init_index) {
    StartResult run;
    run.init_index = init_index;
    run.initial = theta0;

    OuterState state = state_at(ranked, theta0, config);
    run.loglik_trace.push_back(state.loglik);
    std::size_t steps = 0;
    auto finish_step = [&](OuterState next) {
        const double previous = state.loglik;
        state = std::move(next);
        run.loglik_trace.push_back(state.loglik);
        return std::fabs(state.loglik - previous) < config.outer_tol;
    };

    while (steps < config.outer_max_iters) {
        if (!config.accelerate || steps + 2 > config.outer_max_iters) {
            ++steps;
            if (finish_step(outer_step(ranked, state, config, run.inner_traces))) {
                run.converged = true;
                break;
            }
            continue;
        }

        // squared extrapolation: two plain steps define the secant direction
        const OuterState first = outer_step(ranked, state, config, run.inner_traces);
        OuterState second = outer_step(ranked, first, config, run.inner_traces);
        steps += 2;

        const auto x0 = to_free(state.theta);
        const auto x1 = to_free(first.theta);
        const auto x2 = to_free(second.theta);
        double r2 = 0.0;
        double v2 = 0.0;
        std::array<double, 4> r{}, v{};
        for (int k = 0; k < 4; ++k) {
            r[k] = x1[k] - x0[k];
            v[k] = x2[k] - 2.0 * x1[k] + x0[k];
            r2 += r[k] * r[k];
            v2 += v[k] * v[k];
        }
        OuterState chosen = std::move(second);
        if (v2 > 0.0 && steps < config.outer_max_iters) {
            const double alpha = std::min(-1.0, -std::sqrt(r2 / v2));
            if (alpha < -1.0) {
                std::array<double, 4> x{};
                for (int k = 0; k < 4; ++k) x[k] = x0[k] - 2.0 * alpha * r[k] + alpha * alpha * v[k];
                try {
                    const OuterState jumped = state_at(ranked, from_free(x), config);
                    std::vector<std::vector<double>> traces;
                    OuterState settled = outer_step(ranked, jumped, config, traces);
                    ++steps;
                    if (std::isfinite(settled.loglik) && settled.loglik >= chosen.loglik) {
                        chosen = std::move(settled);
                        for (auto& t : traces) run.inner_traces.push_back(std::move(t));
                    }
                } catch (const DegenerateComponent&) {
                    // the extrapolated point starved a component; keep the plain step
                }
            }
        }
        if (finish_step(std::move(chosen))) {
            run.converged = true;
            break;
        }
    }
    run.theta = state.theta;
    run.n_outer_iters = steps;
    run.loglik = state.loglik;
    return run;
}

FitResult fit(const RankedPairSet& ranked, const FitConfig& config) {
    config.validate();
    if (ranked.size() < 2) throw EmptyInput("at least two scored pairs are required");

    std::vector<StartResult> starts(config.n_inits);
    parallel_for(config.n_inits, config.threads, [&](std::size_t k) {
        const Theta theta0 = random_initial_theta(config, k);
        try {
            starts[k] = fit_from(ranked, theta0, config, k);
        } catch (const DegenerateComponent&) {
            starts[k] = StartResult{};
            starts[k].init_index = k;
            starts[k].initial = theta0;
            starts[k].failed = true;
        }
    });

    const StartResult* best = nullptr;
    for (const auto& s : starts) {
        if (s.failed) continue;
        if (best == nullptr || s.loglik > best->loglik) best = &s;
    }
    if (best == nullptr) throw DegenerateComponent("every random start degenerated");

    FitResult out;
    out.theta = best->theta;
    out.loglik = best->loglik;
    out.loglik_trace = best->loglik_trace;
    out.inner_traces = best->inner_traces;
    out.n_outer_iters = best->n_outer_iters;
    out.converged = best->converged;
    out.init_index = best->init_index;
    out.pseudo = compute_pseudo_data(ranked, out.theta);
    out.posterior = posterior_reproducible(out.pseudo, out.theta);
    out.small_sample = ranked.size() < kRecommendedMinSignals;
    out.starts = std::move(starts);
    return out;
}

}  // namespace idrkit
