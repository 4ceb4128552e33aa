#pragma once

#include <string>
#include <vector>

#include "exp/config.hpp"
#include "model/train.hpp"
#include "synth/episode.hpp"

namespace hmmvae::exp {

// final evaluation numbers for one trained run (the metrics.csv content)
struct RunSummary {
  std::vector<double> abs_corr;  // per true source, permutation/sign-matched
  double mean_abs_corr = 0.0;
  std::vector<double> state_accuracy;  // per source, label-matched
  double mean_state_accuracy = 0.0;
  std::vector<double> transition_tv;  // learned vs empirical, per source
  double mean_transition_tv = 0.0;
  std::vector<bool> learned_diag_dominant;
  std::vector<bool> empirical_diag_dominant;
  double final_total = 0.0, final_rec = 0.0, final_logq = 0.0, final_logp = 0.0;
  std::vector<double> posterior_var;
};

// Full pipeline: realize the episode, train, evaluate, and write loss.csv,
// sources.csv, states.csv, transitions.csv, metrics.csv, priors.json and
// (unless disabled) SVG plots under config.output_dir. On divergence the
// partial loss trace and a diagnostics file are written, then the
// TrainingDiverged propagates.
RunSummary run_experiment(const ExperimentConfig& config);

// same pipeline on an episode the caller already holds
RunSummary run_on_episode(const ExperimentConfig& config, const synth::EpisodeData& episode);

// generate the configured episode and save it to out_path
void generate_episode(const ExperimentConfig& config, const std::string& out_path);

// Runs branches 1-3 on one shared episode into branch1/2/3 subdirectories
// and writes comparison.csv (per-branch summary plus the episode hash).
void compare_branches(const ExperimentConfig& config);

// FNV-1a hash of the episode's serialized form, as 16 hex digits
std::string episode_hash(const synth::EpisodeData& episode);

}  // namespace hmmvae::exp
