// Command-line front end for shuffled-parameter estimation: exact and
// stochastic fits, the batting-average and species-abundance studies, the
// Bayes-risk symmetrization checks, and Good-Turing summaries.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "shuffle/reports.hpp"
#include "shuffle/risk.hpp"

namespace {

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    shuffle::write_file(out_path, content);
  }
}

std::vector<long long> as_counts(const shuffle::Vec& row) {
  std::vector<long long> counts;
  counts.reserve(row.size());
  for (double v : row) {
    if (v < 0 || v != std::floor(v)) {
      throw std::invalid_argument("multinomial data must be nonnegative integer counts");
    }
    counts.push_back(static_cast<long long>(v));
  }
  return counts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shuffled-parameter estimation toolkit"};
  app.require_subcommand(1);

  // exact-mle: enumerate the permutation group and iterate EM to the fixed
  // point.
  auto* exact = app.add_subcommand("exact-mle", "Exact multiset MLE by group enumeration");
  std::string exact_data, exact_model = "gaussian", exact_group = "full", exact_out;
  double exact_sigma2 = 1.0, exact_tol = 1e-10;
  int exact_max_iter = 100000;
  exact->add_option("--data", exact_data, "observation file, one row of numbers")->required();
  exact->add_option("--model", exact_model, "gaussian or multinomial")
      ->check(CLI::IsMember({"gaussian", "multinomial"}));
  exact->add_option("--sigma2", exact_sigma2, "gaussian observation variance");
  exact->add_option("--group", exact_group, "identity, full, or fix=i,j,...");
  exact->add_option("--tol", exact_tol, "max-norm convergence tolerance");
  exact->add_option("--max-iter", exact_max_iter, "iteration cap");
  exact->add_option("--out", exact_out, "output CSV path (default stdout)");

  // saem-fit: stochastic-approximation fit for groups of any size.
  auto* saem = app.add_subcommand("saem-fit", "Stochastic-approximation multiset fit");
  std::string saem_data, saem_model = "gaussian", saem_group = "full", saem_out;
  double saem_sigma2 = 1.0, saem_gamma = 1000.0;
  int saem_iters = 100000, saem_restarts = 10;
  std::uint64_t saem_seed = 0;
  saem->add_option("--data", saem_data, "observation file, one row of numbers")->required();
  saem->add_option("--model", saem_model, "gaussian or multinomial")
      ->check(CLI::IsMember({"gaussian", "multinomial"}));
  saem->add_option("--sigma2", saem_sigma2, "gaussian observation variance");
  saem->add_option("--group", saem_group, "identity, full, or fix=i,j,...");
  saem->add_option("--iters", saem_iters, "iterations per restart");
  saem->add_option("--restarts", saem_restarts, "number of restarts");
  saem->add_option("--gamma-offset", saem_gamma, "step size offset: gamma = 1/(iter + offset)");
  saem->add_option("--seed", saem_seed, "random seed");
  saem->add_option("--out", saem_out, "output CSV path (default stdout)");

  // baseball: the 1970 batting-average study.
  auto* ball = app.add_subcommand("baseball", "Batting-average estimates from the first 45 at-bats");
  std::string ball_data, ball_out;
  int ball_iters = 100000, ball_restarts = 10;
  double ball_gamma = 1000.0;
  std::uint64_t ball_seed = 0;
  bool ball_boost = false;
  ball->add_option("--data", ball_data, "batting table CSV")->required();
  ball->add_option("--iters", ball_iters, "sampler iterations per restart");
  ball->add_option("--restarts", ball_restarts, "sampler restarts");
  ball->add_option("--gamma-offset", ball_gamma, "step size offset");
  ball->add_option("--seed", ball_seed, "random seed");
  ball->add_flag("--clemente-boost", ball_boost, "counterfactual hot start for Clemente");
  ball->add_option("--out", ball_out, "output CSV path (default stdout)");

  // species-sim: simulated multinomial estimation.
  auto* species = app.add_subcommand("species-sim", "Species-abundance simulation");
  std::vector<int> species_p;
  long long species_n = 50;
  int species_reps = 100, species_iters = 20000, species_restarts = 2;
  double species_gamma = 1000.0;
  std::uint64_t species_seed = 0;
  std::string species_out;
  species->add_option("--p", species_p, "category counts to simulate (default 5 10 25 50)");
  species->add_option("--n", species_n, "sample size per replicate");
  species->add_option("--reps", species_reps, "replicates per category count");
  species->add_option("--iters", species_iters, "sampler iterations per restart");
  species->add_option("--restarts", species_restarts, "sampler restarts");
  species->add_option("--gamma-offset", species_gamma, "step size offset");
  species->add_option("--seed", species_seed, "random seed");
  species->add_option("--out", species_out, "output CSV path (default stdout)");

  // risk-check: randomized Bayes-risk symmetrization checks.
  auto* riskc = app.add_subcommand("risk-check", "Randomized prior-symmetrization checks");
  int risk_cases = 200;
  std::uint64_t risk_seed = 0;
  std::string risk_out;
  riskc->add_option("--cases", risk_cases, "number of randomized problems");
  riskc->add_option("--seed", risk_seed, "random seed");
  riskc->add_option("--out", risk_out, "output CSV path (default stdout)");

  // good-turing: frequency-of-frequencies estimates from a count vector.
  auto* gt = app.add_subcommand("good-turing", "Good-Turing estimates from category counts");
  std::string gt_counts, gt_out;
  gt->add_option("--counts", gt_counts, "count file, one row of integers")->required();
  gt->add_option("--out", gt_out, "output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (exact->parsed()) {
      const shuffle::Vec x = shuffle::read_single_row(exact_data);
      const int p = static_cast<int>(x.size());
      const shuffle::ShuffleGroup group = shuffle::parse_group(exact_group, p);
      shuffle::ExactMleResult res;
      if (exact_model == "gaussian") {
        res = shuffle::exact_mle(shuffle::GaussianMeansModel(p, exact_sigma2), x, group,
                                 exact_tol, exact_max_iter);
      } else {
        const std::vector<long long> counts = as_counts(x);
        long long n = 0;
        for (long long c : counts) n += c;
        res = shuffle::exact_mle(shuffle::MultinomialModel(p, n), x, group, exact_tol,
                                 exact_max_iter);
      }
      emit(exact_out, shuffle::exact_mle_csv(res));
    } else if (saem->parsed()) {
      const shuffle::Vec x = shuffle::read_single_row(saem_data);
      const int p = static_cast<int>(x.size());
      const shuffle::ShuffleGroup group = shuffle::parse_group(saem_group, p);
      shuffle::SaemConfig config;
      config.iterations = saem_iters;
      config.restarts = saem_restarts;
      config.gamma_offset = saem_gamma;
      config.seed = saem_seed;
      shuffle::SaemResult res;
      if (saem_model == "gaussian") {
        res = shuffle::saem_fit(shuffle::GaussianMeansModel(p, saem_sigma2), x, group, config);
      } else {
        const std::vector<long long> counts = as_counts(x);
        long long n = 0;
        for (long long c : counts) n += c;
        res = shuffle::saem_fit(shuffle::MultinomialModel(p, n), x, group, config);
      }
      emit(saem_out, shuffle::saem_csv(res));
    } else if (ball->parsed()) {
      const std::vector<shuffle::BaseballRecord> records =
          shuffle::load_baseball_records(ball_data);
      shuffle::SaemConfig config;
      config.iterations = ball_iters;
      config.restarts = ball_restarts;
      config.gamma_offset = ball_gamma;
      config.seed = ball_seed;
      const shuffle::BaseballRun run = shuffle::baseball_run(
          records,
          ball_boost ? shuffle::BaseballVariant::clemente_boost
                     : shuffle::BaseballVariant::standard,
          config);
      emit(ball_out, shuffle::baseball_csv(run));
    } else if (species->parsed()) {
      shuffle::SpeciesConfig config;
      if (!species_p.empty()) config.p_values = species_p;
      config.n = species_n;
      config.replicates = species_reps;
      config.seed = species_seed;
      config.saem_iterations = species_iters;
      config.saem_restarts = species_restarts;
      config.gamma_offset = species_gamma;
      emit(species_out, shuffle::species_csv(shuffle::species_sim(config)));
    } else if (riskc->parsed()) {
      if (risk_cases < 1) throw std::invalid_argument("risk-check: --cases must be positive");
      int passed = 0;
      double max_dev = 0.0;
      for (int c = 0; c < risk_cases; ++c) {
        const auto kind = static_cast<shuffle::SymmetrizationCaseKind>(c % 4);
        shuffle::SplitMix64 rng = shuffle::rng_stream(risk_seed, static_cast<std::uint64_t>(c));
        const shuffle::SymmetrizationCase tc = shuffle::make_symmetrization_case(kind, rng);
        const shuffle::SymmetrizationCheck chk =
            shuffle::check_symmetrization_invariance(tc.problem, tc.prior, tc.group);
        const double dev = std::abs(chk.bayes_risk_symmetrized - chk.bayes_risk_original);
        bool ok;
        if (tc.expect_equal) {
          ok = dev <= 1e-12 && (!tc.expect_invariant || chk.risk_invariant);
          max_dev = std::max(max_dev, dev);
        } else {
          ok = !chk.risk_invariant;
        }
        if (ok) ++passed;
      }
      std::string out = "cases,passed,max_deviation\n";
      out += std::to_string(risk_cases) + "," + std::to_string(passed) + "," +
             shuffle::fmt_sig6(max_dev) + "\n";
      emit(risk_out, out);
      if (passed != risk_cases) return 2;
    } else if (gt->parsed()) {
      const std::vector<long long> counts = shuffle::read_count_row(gt_counts);
      emit(gt_out, shuffle::good_turing_csv(shuffle::count_of_counts(counts)));
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
