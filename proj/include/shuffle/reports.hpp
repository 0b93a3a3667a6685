#pragma once

#include <string>
#include <vector>

#include "shuffle/baselines.hpp"
#include "shuffle/experiments.hpp"
#include "shuffle/io.hpp"
#include "shuffle/oracle.hpp"
#include "shuffle/saem.hpp"

namespace shuffle {

// CSV renderers for the command-line tools. Values carry 6 significant
// digits, log-likelihoods 12. Diagnostics trail the table as '#' comment
// lines so the data rows stay machine readable.

inline std::string estimate_table_csv(const Vec& psi_hat, const Vec& theta_shuffle) {
  std::string out = "index,psi_hat,theta_shuffle\n";
  for (std::size_t i = 0; i < psi_hat.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += fmt_sig6(psi_hat[i]);
    out += ',';
    out += fmt_sig6(theta_shuffle[i]);
    out += '\n';
  }
  return out;
}

inline std::string exact_mle_csv(const ExactMleResult& r) {
  std::string out = estimate_table_csv(r.psi_hat, r.theta_shuffle);
  out += "# loglik," + fmt_sig12(r.loglik) + "\n";
  out += "# converged," + std::string(r.converged ? "1" : "0") + "\n";
  out += "# iterations," + std::to_string(r.iterations) + "\n";
  return out;
}

inline std::string saem_csv(const SaemResult& r) {
  std::string out = estimate_table_csv(r.psi_hat, r.theta_shuffle);
  out += "# acceptance_rate," + fmt_sig6(r.acceptance_rate) + "\n";
  out += "# iterations_total," + std::to_string(r.iterations_total) + "\n";
  out += "# loglik," +
         (r.final_loglik_estimate ? fmt_sig12(*r.final_loglik_estimate) : std::string("NA")) +
         "\n";
  return out;
}

inline std::string baseball_csv(const BaseballRun& run) {
  std::string out = "player,avg_first,mle,james_stein,shuffled,avg_remain\n";
  for (std::size_t i = 0; i < run.fit.players.size(); ++i) {
    out += run.fit.players[i];
    out += ',';
    out += fmt_sig6(run.fit.avg_first[i]);
    out += ',';
    out += fmt_sig6(run.fit.mle[i]);
    out += ',';
    out += fmt_sig6(run.fit.james_stein[i]);
    out += ',';
    out += fmt_sig6(run.fit.shuffled[i]);
    out += ',';
    out += fmt_sig6(run.avg_remain[i]);
    out += '\n';
  }
  out += "# error_mle," + fmt_sig6(run.error_mle) + "\n";
  out += "# error_james_stein," + fmt_sig6(run.error_james_stein) + "\n";
  out += "# error_shuffled," + fmt_sig6(run.error_shuffled) + "\n";
  out += "# acceptance_rate," + fmt_sig6(run.fit.saem.acceptance_rate) + "\n";
  return out;
}

inline std::string species_csv(const std::vector<ExperimentRecord>& records) {
  std::string out = "experiment,estimator,replicate,p,error,seed\n";
  for (const ExperimentRecord& rec : records) {
    out += rec.experiment;
    out += ',';
    out += rec.estimator;
    out += ',';
    out += std::to_string(rec.replicate);
    out += ',';
    out += std::to_string(rec.p);
    out += ',';
    out += fmt_sig6(rec.error);
    out += ',';
    out += std::to_string(rec.seed);
    out += '\n';
  }
  return out;
}

inline std::string good_turing_csv(const CountOfCounts& cc) {
  std::string out = "k,categories,estimate\n";
  for (const auto& [k, nk] : cc.counts) {
    out += std::to_string(k);
    out += ',';
    out += std::to_string(nk);
    out += ',';
    out += fmt_sig6(good_turing_percount(cc, k));
    out += '\n';
  }
  out += "# unseen_mass," + fmt_sig6(good_turing_unseen_mass(cc)) + "\n";
  return out;
}

}  // namespace shuffle
