// Acceptance suite: one line per criterion, PASS/FAIL plus the observed
// margin. Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "shuffle/reports.hpp"
#include "shuffle/risk.hpp"

namespace {

using shuffle::GaussianMeansModel;
using shuffle::MultinomialModel;
using shuffle::SaemConfig;
using shuffle::ShuffleGroup;
using shuffle::SplitMix64;
using shuffle::Vec;

int g_failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
    if (!ok) ++g_failures;
    std::printf("%s %s%s%s%s\n", ok ? "PASS" : "FAIL", name, detail.empty() ? "" : " (",
                detail.c_str(), detail.empty() ? "" : ")");
    std::fflush(stdout);
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

double max_gap(const Vec& a, const Vec& b) {
    double gap = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
    return gap;
}

// --- 1. Two-coin toy: exact enumeration and the sampler find (1/2, 1/2). ---
void binomial_toy() {
    MultinomialModel m(2, 3);
    ShuffleGroup g = ShuffleGroup::full(2);
    Vec x{2.0, 1.0};
    Vec half{0.5, 0.5};

    auto exact = shuffle::exact_mle(m, x, g);
    const double exact_gap =
        std::max(max_gap(exact.psi_hat, half), max_gap(exact.theta_shuffle, half));

    SaemConfig config;  // full default budget
    auto sampled = shuffle::saem_fit(m, x, g, config);
    const double saem_gap =
        std::max(max_gap(sampled.psi_hat, half), max_gap(sampled.theta_shuffle, half));

    report(exact.converged && exact_gap <= 1e-6 && saem_gap <= 0.02, "binomial_toy",
           fmt("exact_gap=%.2e saem_gap=%.3f", exact_gap, saem_gap));
}

// --- 2. The sampler agrees with exact enumeration across random instances. ---
void saem_oracle_agreement() {
    SplitMix64 gen(2026);
    SaemConfig config;  // default sampling budget
    config.oracle_loglik = false;

    double worst_psi = 0.0;
    double worst_theta = 0.0;

    const auto compare = [&](const auto& m, const Vec& x) {
        ShuffleGroup g = ShuffleGroup::full(m.p);
        auto oracle = shuffle::exact_mle(m, x, g);
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            config.seed = seed;
            auto res = shuffle::saem_fit(m, x, g, config);
            worst_psi = std::max(worst_psi, max_gap(res.psi_hat, oracle.psi_hat));
            worst_theta = std::max(worst_theta, max_gap(res.theta_shuffle, oracle.theta_shuffle));
        }
    };

    // Gaussian means on a jittered grid with pairwise separation of at least
    // two noise standard deviations, presented in random order.  Closer
    // spacings can tie coordinates of the maximizer, and on the resulting
    // likelihood plateau the argmax location stops being a meaningful target
    // for any stochastic fit.
    for (int k = 0; k < 20; ++k) {
        const int p = 2 + k % 5;
        Vec x(static_cast<std::size_t>(p));
        for (int i = 0; i < p; ++i) {
            x[static_cast<std::size_t>(i)] = 3.0 * i + gen.next_double() - 0.5 - 1.5 * (p - 1);
        }
        shuffle::Permutation sigma = ShuffleGroup::full(p).random_element(gen);
        x = shuffle::apply(sigma, x);
        compare(GaussianMeansModel(p, 1.0), x);
    }
    for (int k = 0; k < 20; ++k) {
        const int p = 2 + k % 4;
        const long long n = 10 + static_cast<long long>(gen.next_below(21));
        const Vec theta = shuffle::dirichlet_uniform_draw(p, gen);
        const auto counts = shuffle::multinomial_draw(n, theta, gen);
        compare(MultinomialModel(p, n), Vec(counts.begin(), counts.end()));
    }

    report(worst_psi <= 0.05 && worst_theta <= 0.05, "saem_oracle_agreement",
           fmt("max_psi_gap=%.4f max_theta_gap=%.4f tol=0.05", worst_psi, worst_theta));
}

// --- 3. The Metropolis chain has the exact permutation posterior as its
// stationary distribution. ---
void mh_stationarity() {
    double worst_tv = 0.0;
    std::uint64_t seed = 100;

    const auto check = [&](const auto& m, const Vec& x, const Vec& psi) {
        ShuffleGroup g = ShuffleGroup::full(m.p);
        SplitMix64 rng(seed++);
        auto emp = shuffle::mh_stationarity_check(m, x, psi, g, 100000, rng);
        auto exact = shuffle::exact_permutation_posterior(m, x, psi, g);
        double tv = 0.0;
        for (std::size_t k = 0; k < emp.weights.size(); ++k) {
            tv += std::abs(emp.weights[k] - exact.weights[k]);
        }
        worst_tv = std::max(worst_tv, tv / 2.0);
    };

    check(GaussianMeansModel(3, 1.0), {0.0, 0.7, 1.3}, {0.0, 0.7, 1.3});
    check(GaussianMeansModel(4, 1.0), {-2.0, -1.0, 1.0, 2.0}, {-1.5, -1.5, 1.5, 1.5});
    check(MultinomialModel(3, 5), {3.0, 1.0, 1.0}, {0.6, 0.2, 0.2});

    report(worst_tv <= 0.02, "mh_stationarity", fmt("max_tv=%.4f tol=0.02", worst_tv));
}

// --- 4. Bayes risks are unchanged by prior symmetrization whenever the risk
// function is orbit-invariant; symmetrization is idempotent and fixes exactly
// the exchangeable priors. ---
void bayes_risk_symmetrization() {
    using shuffle::SymmetrizationCaseKind;
    const SymmetrizationCaseKind kinds[4] = {
        SymmetrizationCaseKind::orbit_invariant_tables, SymmetrizationCaseKind::exchangeable_prior,
        SymmetrizationCaseKind::equivariant_bernoulli, SymmetrizationCaseKind::noninvariant_control};

    int cases = 0;
    double worst_eq = 0.0;
    double worst_idem = 0.0;
    bool ok = true;

    for (int c = 0; c < 100; ++c) {
        SplitMix64 rng = shuffle::rng_stream(7, static_cast<std::uint64_t>(c));
        auto tc = shuffle::make_symmetrization_case(kinds[c % 4], rng);
        auto res = shuffle::check_symmetrization_invariance(tc.problem, tc.prior, tc.group);
        ++cases;

        if (tc.expect_invariant && !res.risk_invariant) ok = false;
        if (tc.kind == SymmetrizationCaseKind::noninvariant_control && res.risk_invariant) ok = false;
        if (tc.expect_equal) {
            worst_eq = std::max(
                worst_eq, std::abs(res.bayes_risk_symmetrized - res.bayes_risk_original));
        }

        auto once = shuffle::symmetrize(tc.problem.thetas, tc.prior.weights, tc.group);
        auto twice = shuffle::symmetrize(once.thetas, once.weights, tc.group);
        if (twice.thetas != once.thetas) ok = false;
        worst_idem = std::max(worst_idem, max_gap(twice.weights, once.weights));

        if (!shuffle::is_exchangeable(once.thetas, once.weights, tc.group)) ok = false;
        const bool fixes_prior = max_gap(once.weights, tc.prior.weights) <= 1e-12;
        const bool exchangeable =
            shuffle::is_exchangeable(tc.problem.thetas, tc.prior.weights, tc.group);
        if (exchangeable != fixes_prior) ok = false;
    }

    report(ok && cases >= 100 && worst_eq <= 1e-12 && worst_idem <= 1e-12,
           "bayes_risk_symmetrization",
           fmt("cases=%g max_equality_gap=%.2e max_idempotence_gap=%.2e",
               static_cast<double>(cases), worst_eq, worst_idem));
}

// --- 5. Conditional mean of a category probability given its count equals
// the expected-count ratio, exactly, on every enumerable problem size. ---
void conditional_mean_identity() {
    SplitMix64 rng(55);
    double worst = 0.0;
    for (int p = 2; p <= 4; ++p) {
        for (int n = 1; n <= 6; ++n) {
            std::vector<Vec> thetas;
            thetas.push_back(Vec(static_cast<std::size_t>(p), 1.0 / p));
            if (p == 2) thetas.push_back({0.3, 0.7});
            if (p == 3) thetas.push_back({0.2, 0.3, 0.5});
            if (p == 4) thetas.push_back({0.1, 0.2, 0.3, 0.4});
            for (int r = 0; r < 2; ++r) {
                Vec draw = shuffle::dirichlet_uniform_draw(p, rng);
                double s = 0.0;
                for (std::size_t i = 0; i + 1 < draw.size(); ++i) s += draw[i];
                draw.back() = 1.0 - s;  // close the simplex to machine exactness
                thetas.push_back(draw);
            }
            for (const Vec& theta : thetas) {
                for (const auto& pt : shuffle::good_identity_check(p, n, theta)) {
                    worst = std::max(worst, std::abs(pt.conditional_mean - pt.count_ratio));
                }
            }
        }
    }
    report(worst <= 1e-12, "conditional_mean_identity", fmt("max_gap=%.2e tol=1e-12", worst));
}

// --- 6. The unseen-mass estimate equals the singleton share, and summing the
// per-category estimate over unseen categories recovers the same number. ---
void unseen_mass_formula() {
    const std::vector<std::vector<long long>> cases{
        {2, 1, 1, 0}, {1, 1, 1}, {5, 0, 0}, {3, 2, 0, 0, 1}};
    double worst = 0.0;
    bool ok = true;
    for (const auto& x : cases) {
        auto cc = shuffle::count_of_counts(x);
        const auto n1 = cc.counts.find(1);
        const double singletons = n1 == cc.counts.end() ? 0.0 : static_cast<double>(n1->second);
        const double direct = singletons / static_cast<double>(cc.n);
        const double unseen = shuffle::good_turing_unseen_mass(cc);
        worst = std::max(worst, std::abs(unseen - direct));

        const auto n0 = cc.counts.find(0);
        if (n0 != cc.counts.end() && n0->second > 0) {
            // Sum of the per-category estimate over the unseen categories.
            const double summed = static_cast<double>(n0->second) *
                                  shuffle::good_turing_percount(cc, 0);
            worst = std::max(worst, std::abs(unseen - summed));
        }
        if (x == std::vector<long long>{2, 1, 1, 0} && std::abs(unseen - 0.5) > 1e-15) ok = false;
        if (x == std::vector<long long>{5, 0, 0} && unseen != 0.0) ok = false;
    }
    report(ok && worst <= 1e-15, "unseen_mass_formula", fmt("max_gap=%.2e", worst));
}

// --- 7. The 1970 batting-average holdout: raw-scale prediction errors land
// on the published values. Without the season table, fall back to internal
// consistency of the embedded first-45 counts. ---
void batting_average_holdout() {
    const std::string path = "data/baseball_1970.csv";
    if (std::filesystem::exists(path)) {
        auto records = shuffle::load_baseball_records(path);
        double err_mle = 0.0;
        double err_js = 0.0;
        double worst_shuffled = 0.0;
        bool ok = true;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            SaemConfig config;  // full default budget
            config.seed = seed;
            auto run = shuffle::baseball_run(records, shuffle::BaseballVariant::standard, config);
            err_mle = run.error_mle;
            err_js = run.error_james_stein;
            worst_shuffled = std::max(worst_shuffled, std::abs(run.error_shuffled - 0.027));
            if (std::abs(run.error_shuffled - 0.027) > 0.004) ok = false;
        }
        ok = ok && std::abs(err_mle - 0.086) <= 0.001 && std::abs(err_js - 0.027) <= 0.003;
        report(ok, "batting_average_holdout",
               fmt("mle=%.4f js=%.4f max_shuffled_dev=%.4f", err_mle, err_js, worst_shuffled));
        return;
    }

    // Fallback: no holdout table shipped alongside the binary.
    const auto& hits = shuffle::baseball_first45_hits();
    std::vector<std::string> players(hits.size());
    for (std::size_t i = 0; i < players.size(); ++i) players[i] = "P" + std::to_string(i);
    SaemConfig config;
    auto fit = shuffle::baseball_fit(players, hits, config);
    const double agree = max_gap(fit.shuffled_t, fit.james_stein_t);

    std::vector<int> boosted = hits;
    boosted[0] = 20;
    auto boost = shuffle::baseball_fit(players, boosted, config);
    const double d_shuffled = std::abs(boost.shuffled_t[0] - boost.mle_t[0]);
    const double d_js = std::abs(boost.james_stein_t[0] - boost.mle_t[0]);

    report(agree <= 0.01 && d_shuffled < d_js, "batting_average_holdout",
           fmt("fallback: transformed_gap=%.3f boost_shuffled_to_mle=%.3f boost_js_to_mle=%.3f",
               agree, d_shuffled, d_js));
}

// --- 8. Species abundance simulation: at many categories the error medians
// order as conjugate Bayes <= shuffled < observed proportions. ---
void species_error_ordering() {
    shuffle::SpeciesConfig config;
    config.p_values = {25, 50};
    config.replicates = 50;
    auto records = shuffle::species_sim(config);

    bool ok = true;
    std::string detail;
    for (int p : config.p_values) {
        auto median_of = [&](const std::string& estimator) {
            std::vector<double> errs;
            for (const auto& rec : records) {
                if (rec.p == p && rec.estimator == estimator) errs.push_back(rec.error);
            }
            std::sort(errs.begin(), errs.end());
            const std::size_t m = errs.size();
            return m % 2 == 1 ? errs[m / 2] : 0.5 * (errs[m / 2 - 1] + errs[m / 2]);
        };
        const double med_mle = median_of("mle");
        const double med_shuffled = median_of("shuffled");
        const double med_bayes = median_of("bayes");
        if (!(med_bayes <= med_shuffled && med_shuffled < med_mle)) ok = false;
        detail += fmt("p=%g: bayes=%.4f shuffled=%.4f ", static_cast<double>(p), med_bayes,
                      med_shuffled) +
                  fmt("mle=%.4f; ", med_mle);
    }
    if (!detail.empty()) detail.pop_back(), detail.pop_back();
    report(ok, "species_error_ordering", detail);
}

// --- 9. Seeded pipelines are byte-identical across reruns. ---
void seeded_determinism() {
    bool ok = true;

    shuffle::SpeciesConfig species;
    species.p_values = {4};
    species.replicates = 3;
    species.saem_iterations = 2000;
    species.saem_restarts = 1;
    species.seed = 13;
    const std::string species_a = shuffle::species_csv(shuffle::species_sim(species));
    const std::string species_b = shuffle::species_csv(shuffle::species_sim(species));
    if (species_a != species_b) ok = false;
    species.seed = 14;
    if (species_a == shuffle::species_csv(shuffle::species_sim(species))) ok = false;

    if (std::filesystem::exists("data/baseball_1970.csv")) {
        auto records = shuffle::load_baseball_records("data/baseball_1970.csv");
        SaemConfig config;
        config.iterations = 20000;
        config.restarts = 2;
        config.seed = 11;
        auto r1 = shuffle::baseball_run(records, shuffle::BaseballVariant::standard, config);
        auto r2 = shuffle::baseball_run(records, shuffle::BaseballVariant::standard, config);
        if (shuffle::baseball_csv(r1) != shuffle::baseball_csv(r2)) ok = false;
    }

    GaussianMeansModel m(5, 1.0);
    ShuffleGroup g = ShuffleGroup::full(5);
    Vec x{-1.2, 0.0, 0.4, 1.1, 2.5};
    SaemConfig config;
    config.iterations = 30000;
    config.restarts = 2;
    config.seed = 99;
    if (shuffle::saem_csv(shuffle::saem_fit(m, x, g, config)) !=
        shuffle::saem_csv(shuffle::saem_fit(m, x, g, config))) {
        ok = false;
    }

    report(ok, "seeded_determinism", "");
}

void run(void (*criterion)(), const char* name) {
    try {
        criterion();
    } catch (const std::exception& e) {
        report(false, name, std::string("exception: ") + e.what());
    }
}

}  // namespace

int main() {
    run(binomial_toy, "binomial_toy");
    run(saem_oracle_agreement, "saem_oracle_agreement");
    run(mh_stationarity, "mh_stationarity");
    run(bayes_risk_symmetrization, "bayes_risk_symmetrization");
    run(conditional_mean_identity, "conditional_mean_identity");
    run(unseen_mass_formula, "unseen_mass_formula");
    run(batting_average_holdout, "batting_average_holdout");
    run(species_error_ordering, "species_error_ordering");
    run(seeded_determinism, "seeded_determinism");
    return g_failures == 0 ? 0 : 1;
}
