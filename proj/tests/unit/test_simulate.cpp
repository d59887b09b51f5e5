#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "idrkit/errors.hpp"
#include "idrkit/simulate.hpp"
#include "idrkit/stats_dist.hpp"
#include "test_support.hpp"

using namespace idrkit;
using doctest::Approx;

namespace {

double correlation(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

SimScenario small_scenario(std::size_t n) {
    SimScenario s;
    s.components = {{0.4, 0.0, 0.0, 1.0}, {0.6, 3.0, 0.9, 1.0}};
    s.n = n;
    s.seed = 5;
    s.label = "small";
    return s;
}

}  // namespace

TEST_SUITE("simulate") {

TEST_CASE("presets") {
    const auto s1 = scenario_preset(ScenarioName::S1);
    REQUIRE(s1.components.size() == 2);
    CHECK(s1.components[1].pi == 0.65);
    CHECK(s1.components[1].mu == 2.5);
    CHECK(s1.components[1].rho == 0.84);
    CHECK(s1.components[1].sigma_sq == 1.0);
    CHECK(s1.true_theta() == Theta{0.65, 2.5, 1.0, 0.84});
    CHECK(scenario_preset(ScenarioName::S2).components[1].rho == 0.40);
    CHECK(scenario_preset(ScenarioName::S2).components[1].pi == 0.30);
    CHECK(scenario_preset(ScenarioName::S3).components[1].pi == 0.05);
    const auto s4 = scenario_preset(ScenarioName::S4);
    REQUIRE(s4.components.size() == 3);
    CHECK(s4.components[0].pi == Approx(0.28));
    CHECK(s4.components[1].mu == 3.0);
    CHECK(s4.components[2].pi == 0.07);
    CHECK(s4.components[2].rho == 0.64);
    CHECK(s4.components[2].mu == 0.0);
    for (auto name : {ScenarioName::S1, ScenarioName::S2, ScenarioName::S3, ScenarioName::S4}) {
        CHECK_NOTHROW(scenario_preset(name).validate());
    }
    CHECK(parse_scenario_name("S3") == ScenarioName::S3);
    CHECK_THROWS_AS(parse_scenario_name("S5"), DomainError);
}

TEST_CASE("scenario validation") {
    SimScenario s = small_scenario(100);
    s.components[1].pi = 0.7;
    CHECK_THROWS_AS(s.validate(), DomainError);
    s = small_scenario(100);
    s.components[0].mu = 0.1;
    CHECK_THROWS_AS(s.validate(), DomainError);
    s = small_scenario(100);
    s.components[1].rho = 1.0;
    CHECK_THROWS_AS(s.validate(), DomainError);
}

TEST_CASE("latent correlation of reproducible signals") {
    const auto d = simulate_dataset(scenario_preset(ScenarioName::S1, 10000, 2));
    std::vector<double> a, b, a0, b0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        (d.truth[i] == 1 ? a : a0).push_back(d.z1[i]);
        (d.truth[i] == 1 ? b : b0).push_back(d.z2[i]);
    }
    CHECK(std::fabs(correlation(a, b) - 0.84) < 0.02);
    CHECK(std::fabs(correlation(a0, b0)) < 3.0 / std::sqrt(static_cast<double>(a0.size())));
    CHECK(std::fabs(static_cast<double>(a.size()) / d.size() - 0.65) < 0.02);
}

TEST_CASE("probability integral transform of latent values is uniform") {
    const auto s = scenario_preset(ScenarioName::S2, 10000, 7);
    const auto d = simulate_dataset(s);
    std::vector<double> u;
    for (double z : d.z1) u.push_back(scenario_marginal_cdf(s, z));
    CHECK(test::ks_distance(u, [](double x) { return x; }) < 0.02);
    std::vector<double> u2;
    for (double z : d.z2) u2.push_back(scenario_marginal_cdf(s, z));
    CHECK(test::ks_distance(u2, [](double x) { return x; }) < 0.02);
}

TEST_CASE("p-values follow the t5 z-test transform") {
    const auto s = scenario_preset(ScenarioName::S3, 2000, 1);
    const auto d = simulate_dataset(s);
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(d.pvalues1[i] > 0.0);
        CHECK(d.pvalues1[i] < 1.0);
        const double x = t5_quantile(scenario_marginal_cdf(s, d.z1[i]));
        CHECK(d.pvalues1[i] == Approx(normal_sf(x)).epsilon(1e-9));
        CHECK(scenario_marginal_cdf(s, d.z1[i]) + scenario_marginal_sf(s, d.z1[i]) == Approx(1.0));
    }
}

TEST_CASE("datasets are determined by the seed") {
    const auto a = simulate_dataset(small_scenario(500));
    const auto b = simulate_dataset(small_scenario(500));
    CHECK(a.pvalues1 == b.pvalues1);
    CHECK(a.truth == b.truth);
    auto other = small_scenario(500);
    other.seed = 6;
    CHECK(simulate_dataset(other).pvalues1 != a.pvalues1);
    CHECK(replicate_scenario(small_scenario(10), 1).seed != replicate_scenario(small_scenario(10), 2).seed);
}

TEST_CASE("calibration and trade-off bookkeeping") {
    ExperimentConfig cfg;
    cfg.n_reps = 2;
    cfg.fit.n_inits = 2;
    const auto report = run_experiments(small_scenario(1500), cfg);
    REQUIRE(report.replicates.size() == 2);
    for (Method m : kAllMethods) {
        CHECK(report.calibration.at(m, 0.0).empirical_fdr == 0.0);
        CHECK(report.calibration.at(m, 0.0).mean_selected == 0.0);
    }
    CHECK_THROWS_AS(report.calibration.at(Method::Idr, 0.0123), DomainError);

    // brute-force the matched counts for one replicate
    const auto& rep = report.replicates[0];
    for (Method m : kAllMethods) {
        const auto& stat = rep.statistic[static_cast<int>(m)];
        for (std::size_t budget : cfg.matched_incorrect) {
            std::size_t best = 0;
            for (double thr : stat) {
                std::size_t correct = 0, incorrect = 0;
                for (std::size_t i = 0; i < stat.size(); ++i) {
                    if (stat[i] <= thr) (rep.truth[i] == 1 ? correct : incorrect) += 1;
                }
                if (incorrect <= budget) best = std::max(best, correct);
            }
            CHECK(report.tradeoff.matched_correct(0, m, budget) == best);
        }
    }
    // the threshold sweep is cumulative
    for (std::size_t k = 1; k < report.tradeoff.rows.size(); ++k) {
        const auto& a = report.tradeoff.rows[k - 1];
        const auto& b = report.tradeoff.rows[k];
        if (a.rep == b.rep && a.method == b.method) {
            CHECK(b.correct >= a.correct);
            CHECK(b.incorrect >= a.incorrect);
        }
    }
    REQUIRE(report.params.size() == 4);
    CHECK(report.params[0].name == "pi1");
    CHECK(report.params[0].truth == 0.6);
    CHECK(report.params[0].mean == Approx((report.replicates[0].theta.pi1 + report.replicates[1].theta.pi1) / 2));
}

TEST_CASE("experiments are thread independent") {
    ExperimentConfig cfg;
    cfg.n_reps = 3;
    cfg.fit.n_inits = 2;
    const auto a = run_experiments(small_scenario(600), cfg);
    cfg.threads = 3;
    const auto b = run_experiments(small_scenario(600), cfg);
    for (std::size_t r = 0; r < 3; ++r) CHECK(a.replicates[r].theta == b.replicates[r].theta);
    REQUIRE(a.calibration.rows.size() == b.calibration.rows.size());
    for (std::size_t k = 0; k < a.calibration.rows.size(); ++k) {
        CHECK(a.calibration.rows[k].empirical_fdr == b.calibration.rows[k].empirical_fdr);
    }
}

TEST_CASE("default grids") {
    const auto nominal = default_nominal_levels();
    CHECK(nominal.front() == 0.0);
    CHECK(nominal.back() == Approx(0.2));
    CHECK(nominal.size() == 41);
    const auto thr = default_tradeoff_thresholds();
    CHECK(thr.back() == Approx(1.0));
    CHECK(method_name(Method::Fisher) == "fisher");
}

}
