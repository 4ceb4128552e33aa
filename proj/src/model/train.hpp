#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ad/tensor.hpp"
#include "common/rng.hpp"
#include "model/adam.hpp"
#include "model/mlp.hpp"
#include "prior/params.hpp"
#include "synth/episode.hpp"

namespace hmmvae::model {

struct TrainConfig {
  prior::Branch branch = prior::Branch::kGaussianEmission;
  std::size_t num_states = 2;
  std::size_t flow_layers = 1;
  double beta = 0.05;
  bool beta_warmup = true;  // ramp beta linearly over the first tenth of epochs
  double learning_rate = 1e-3;
  std::size_t epochs = 3000;
  std::uint64_t seed = 0;
  std::vector<std::size_t> encoder_hidden = {32, 32};
  std::vector<std::size_t> decoder_hidden = {};  // empty = affine decoder
  std::size_t log_every = 50;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  // throws std::invalid_argument on the first violated constraint
  void validate() const;
};

// Everything a run mutates: parameters, optimizer moments, the noise stream,
// and the epoch counter. A checkpoint is this struct serialized.
struct TrainState {
  TrainConfig config;
  std::size_t epoch = 0;
  std::size_t observed_dim = 0;
  std::size_t latent_dim = 0;
  Mlp encoder;
  Mlp decoder;
  ad::Tensor log_var;  // [n] posterior log-variances
  std::vector<prior::SourcePriorParams> priors;
  Adam optimizer;
  Rng noise_rng{0};
};

struct LossPoint {
  std::size_t epoch = 0;
  double total = 0.0, rec = 0.0, logq = 0.0, logp = 0.0, beta = 0.0;
};

// cadence row: loss components plus source-recovery diagnostics
struct ReportRow {
  std::size_t epoch = 0;
  double total = 0.0, rec = 0.0, logq = 0.0, logp = 0.0, beta = 0.0;
  std::vector<double> abs_corr;  // per true source, permutation-matched
  double mean_abs_corr = 0.0;
  std::vector<double> posterior_log_var;
  std::vector<prior::SourceSnapshot> priors;
};

struct TrainReport {
  std::vector<LossPoint> loss_curve;  // one entry per epoch
  std::vector<ReportRow> logged;      // every log_every epochs plus the last
};

// all trainable tensors in a fixed order (encoder, decoder, log-variances,
// then each source prior); this order defines the checkpoint layout
std::vector<ad::Tensor> collect_trainable(const TrainState& state);

// fresh state from the seed; the weight-init draws and the training noise
// share one stream so the whole run is a function of (episode, config)
TrainState init_train_state(const TrainConfig& config, std::size_t observed_dim,
                            std::size_t latent_dim);
TrainState init_train_state(const TrainConfig& config, const synth::EpisodeData& episode);

// Runs n_epochs full-sequence gradient steps, appending to the report.
// Throws TrainingDiverged when the loss stops being finite; the offending
// epoch is recorded in the loss curve before the throw.
void train_epochs(TrainState& state, const synth::EpisodeData& episode, std::size_t n_epochs,
                  TrainReport& report);

struct TrainResult {
  TrainState state;
  TrainReport report;
};

// validate + init + train for config.epochs
TrainResult train(const synth::EpisodeData& episode, const TrainConfig& config);

// JSON view of a prior snapshot, shared by checkpoints and report files
nlohmann::json snapshot_to_json(const prior::SourceSnapshot& s);
prior::SourceSnapshot snapshot_from_json(const nlohmann::json& j);

// JSON checkpoint: config, epoch, parameter values, optimizer moments, noise
// stream state, and the report so far; reload resumes bit-identically
void save_checkpoint(const TrainState& state, const TrainReport& report, const std::string& path);

struct Checkpoint {
  TrainState state;
  TrainReport report;
};

Checkpoint load_checkpoint(const std::string& path);

}  // namespace hmmvae::model
