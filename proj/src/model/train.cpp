#include "model/train.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ad/tape.hpp"
#include "common/errors.hpp"
#include "eval/metrics.hpp"
#include "model/losses.hpp"

namespace hmmvae::model {

void TrainConfig::validate() const {
  if (beta <= 0.0) throw std::invalid_argument("config: beta must be positive");
  if (epochs < 1) throw std::invalid_argument("config: at least one epoch required");
  if (learning_rate < 0.0) throw std::invalid_argument("config: negative learning rate");
  if (num_states < 1) throw std::invalid_argument("config: at least one state required");
  if (flow_layers < 1) throw std::invalid_argument("config: at least one flow layer required");
  if (log_every < 1) throw std::invalid_argument("config: log cadence must be at least 1");
  if (adam_beta1 < 0.0 || adam_beta1 >= 1.0 || adam_beta2 < 0.0 || adam_beta2 >= 1.0)
    throw std::invalid_argument("config: optimizer moment decays must lie in [0, 1)");
  if (adam_eps <= 0.0) throw std::invalid_argument("config: optimizer epsilon must be positive");
  for (std::size_t w : encoder_hidden)
    if (w == 0) throw std::invalid_argument("config: zero-width encoder layer");
  for (std::size_t w : decoder_hidden)
    if (w == 0) throw std::invalid_argument("config: zero-width decoder layer");
}

std::vector<ad::Tensor> collect_trainable(const TrainState& state) {
  std::vector<ad::Tensor> out;
  for (const auto& t : state.encoder.trainable()) out.push_back(t);
  for (const auto& t : state.decoder.trainable()) out.push_back(t);
  out.push_back(state.log_var);
  for (const auto& p : state.priors)
    for (const auto& t : p.trainable()) out.push_back(t);
  return out;
}

TrainState init_train_state(const TrainConfig& config, std::size_t observed_dim,
                            std::size_t latent_dim) {
  if (observed_dim == 0 || latent_dim == 0)
    throw std::invalid_argument("init_train_state: zero dimension");
  TrainState s;
  s.config = config;
  s.observed_dim = observed_dim;
  s.latent_dim = latent_dim;

  Rng rng(config.seed);
  std::vector<std::size_t> enc_widths{observed_dim};
  enc_widths.insert(enc_widths.end(), config.encoder_hidden.begin(), config.encoder_hidden.end());
  enc_widths.push_back(latent_dim);
  s.encoder = make_mlp(enc_widths, rng);

  std::vector<std::size_t> dec_widths{latent_dim};
  dec_widths.insert(dec_widths.end(), config.decoder_hidden.begin(), config.decoder_hidden.end());
  dec_widths.push_back(observed_dim);
  s.decoder = make_mlp(dec_widths, rng);

  s.log_var = ad::Tensor::param({latent_dim},
                                std::vector<double>(latent_dim, std::log(0.5)));
  for (std::size_t j = 0; j < latent_dim; ++j)
    s.priors.push_back(
        prior::make_source_prior(config.branch, config.num_states, config.flow_layers, rng));

  s.optimizer = Adam(config.learning_rate, config.adam_beta1, config.adam_beta2, config.adam_eps);
  s.optimizer.attach(collect_trainable(s));
  s.noise_rng = rng;  // continues the init stream
  return s;
}

TrainState init_train_state(const TrainConfig& config, const synth::EpisodeData& episode) {
  return init_train_state(config, episode.observations.cols, episode.sources.cols);
}

namespace {

double effective_beta(const TrainConfig& config, std::size_t epoch) {
  if (!config.beta_warmup) return config.beta;
  const std::size_t warmup = std::max<std::size_t>(1, config.epochs / 10);
  if (epoch >= warmup) return config.beta;
  return config.beta * static_cast<double>(epoch + 1) / static_cast<double>(warmup);
}

bool column_variances_ok(const Mat& m) {
  for (std::size_t c = 0; c < m.cols; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < m.rows; ++r) mean += m(r, c);
    mean /= static_cast<double>(m.rows);
    double var = 0.0;
    for (std::size_t r = 0; r < m.rows; ++r) {
      const double d = m(r, c) - mean;
      var += d * d;
    }
    if (var <= 0.0) return false;
  }
  return true;
}

ReportRow make_report_row(const TrainState& state, const synth::EpisodeData& episode,
                          const LossPoint& point, const Mat& latent_mean) {
  ReportRow row;
  row.epoch = point.epoch;
  row.total = point.total;
  row.rec = point.rec;
  row.logq = point.logq;
  row.logp = point.logp;
  row.beta = point.beta;
  row.posterior_log_var = state.log_var.value();
  const std::size_t n = state.latent_dim;
  row.abs_corr.assign(n, 0.0);
  if (column_variances_ok(latent_mean) && column_variances_ok(episode.sources)) {
    const auto match = eval::match_sources(latent_mean, episode.sources);
    row.abs_corr = match.abs_corr;
    row.mean_abs_corr = match.mean_abs_corr;
  }
  for (const auto& p : state.priors) row.priors.push_back(prior::snapshot_source(p));
  return row;
}

}  // namespace

void train_epochs(TrainState& state, const synth::EpisodeData& episode, std::size_t n_epochs,
                  TrainReport& report) {
  if (episode.observations.cols != state.observed_dim ||
      episode.sources.cols != state.latent_dim)
    throw std::invalid_argument("train_epochs: episode dimensions disagree with the model");
  const std::size_t T = episode.observations.rows;
  if (T == 0) throw std::invalid_argument("train_epochs: empty episode");

  for (std::size_t i = 0; i < n_epochs; ++i) {
    const double beta = effective_beta(state.config, state.epoch);
    const Mat noise = draw_noise(T, state.latent_dim, state.noise_rng);

    ad::Tape tape;
    ad::Tape::Scope scope(tape);
    const LossBreakdown loss = total_loss(episode.observations, state.encoder, state.decoder,
                                          state.log_var, state.priors, beta, noise);

    LossPoint point{state.epoch, loss.total_value, loss.rec, loss.logq, loss.logp, beta};
    report.loss_curve.push_back(point);

    if (!std::isfinite(loss.total_value)) {
      std::ostringstream msg;
      msg << "training diverged at epoch " << state.epoch << ": total=" << loss.total_value
          << " rec=" << loss.rec << " logq=" << loss.logq << " logp=" << loss.logp;
      throw TrainingDiverged(msg.str());
    }

    tape.backward(loss.total);
    state.optimizer.step();
    state.optimizer.zero_grads();

    const bool last = state.epoch + 1 == state.config.epochs;
    if (state.epoch % state.config.log_every == 0 || last) {
      Mat mu(T, state.latent_dim);
      mu.d = loss.latent_mean.value();
      report.logged.push_back(make_report_row(state, episode, point, mu));
    }
    ++state.epoch;
  }
}

TrainResult train(const synth::EpisodeData& episode, const TrainConfig& config) {
  config.validate();
  TrainResult result;
  result.state = init_train_state(config, episode);
  train_epochs(result.state, episode, config.epochs, result.report);
  return result;
}

namespace {

using nlohmann::json;

json config_to_json(const TrainConfig& c) {
  json j;
  j["branch"] = prior::branch_to_int(c.branch);
  j["num_states"] = c.num_states;
  j["flow_layers"] = c.flow_layers;
  j["beta"] = c.beta;
  j["beta_warmup"] = c.beta_warmup;
  j["learning_rate"] = c.learning_rate;
  j["epochs"] = c.epochs;
  j["seed"] = c.seed;
  j["encoder_hidden"] = c.encoder_hidden;
  j["decoder_hidden"] = c.decoder_hidden;
  j["log_every"] = c.log_every;
  j["adam_beta1"] = c.adam_beta1;
  j["adam_beta2"] = c.adam_beta2;
  j["adam_eps"] = c.adam_eps;
  return j;
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  c.branch = prior::branch_from_int(j.at("branch").get<int>());
  c.num_states = j.at("num_states").get<std::size_t>();
  c.flow_layers = j.at("flow_layers").get<std::size_t>();
  c.beta = j.at("beta").get<double>();
  c.beta_warmup = j.at("beta_warmup").get<bool>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.encoder_hidden = j.at("encoder_hidden").get<std::vector<std::size_t>>();
  c.decoder_hidden = j.at("decoder_hidden").get<std::vector<std::size_t>>();
  c.log_every = j.at("log_every").get<std::size_t>();
  c.adam_beta1 = j.at("adam_beta1").get<double>();
  c.adam_beta2 = j.at("adam_beta2").get<double>();
  c.adam_eps = j.at("adam_eps").get<double>();
  return c;
}

}  // namespace

nlohmann::json snapshot_to_json(const prior::SourceSnapshot& s) {
  json j;
  j["branch"] = s.branch;
  j["initial"] = s.initial;
  json rows = json::array();
  for (std::size_t r = 0; r < s.transition.rows; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < s.transition.cols; ++c) row.push_back(s.transition(r, c));
    rows.push_back(std::move(row));
  }
  j["transition"] = std::move(rows);
  json payload = json::array();  // array of [name, values] pairs, order kept
  for (const auto& [name, values] : s.payload) payload.push_back(json::array({name, values}));
  j["payload"] = std::move(payload);
  return j;
}

prior::SourceSnapshot snapshot_from_json(const nlohmann::json& j) {
  prior::SourceSnapshot s;
  s.branch = j.at("branch").get<int>();
  s.initial = j.at("initial").get<std::vector<double>>();
  const auto& rows = j.at("transition");
  s.transition = Mat(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < s.transition.rows; ++r)
    for (std::size_t c = 0; c < s.transition.cols; ++c)
      s.transition(r, c) = rows[r][c].get<double>();
  for (const auto& entry : j.at("payload"))
    s.payload.emplace_back(entry[0].get<std::string>(), entry[1].get<std::vector<double>>());
  return s;
}

namespace {

json report_to_json(const TrainReport& r) {
  json curve = json::array();
  for (const auto& p : r.loss_curve)
    curve.push_back(json::array({p.epoch, p.total, p.rec, p.logq, p.logp, p.beta}));
  json logged = json::array();
  for (const auto& row : r.logged) {
    json e;
    e["epoch"] = row.epoch;
    e["total"] = row.total;
    e["rec"] = row.rec;
    e["logq"] = row.logq;
    e["logp"] = row.logp;
    e["beta"] = row.beta;
    e["abs_corr"] = row.abs_corr;
    e["mean_abs_corr"] = row.mean_abs_corr;
    e["posterior_log_var"] = row.posterior_log_var;
    json priors = json::array();
    for (const auto& s : row.priors) priors.push_back(snapshot_to_json(s));
    e["priors"] = std::move(priors);
    logged.push_back(std::move(e));
  }
  return json{{"loss_curve", std::move(curve)}, {"logged", std::move(logged)}};
}

TrainReport report_from_json(const json& j) {
  TrainReport r;
  for (const auto& p : j.at("loss_curve"))
    r.loss_curve.push_back({p[0].get<std::size_t>(), p[1].get<double>(), p[2].get<double>(),
                            p[3].get<double>(), p[4].get<double>(), p[5].get<double>()});
  for (const auto& e : j.at("logged")) {
    ReportRow row;
    row.epoch = e.at("epoch").get<std::size_t>();
    row.total = e.at("total").get<double>();
    row.rec = e.at("rec").get<double>();
    row.logq = e.at("logq").get<double>();
    row.logp = e.at("logp").get<double>();
    row.beta = e.at("beta").get<double>();
    row.abs_corr = e.at("abs_corr").get<std::vector<double>>();
    row.mean_abs_corr = e.at("mean_abs_corr").get<double>();
    row.posterior_log_var = e.at("posterior_log_var").get<std::vector<double>>();
    for (const auto& s : e.at("priors")) row.priors.push_back(snapshot_from_json(s));
    r.logged.push_back(std::move(row));
  }
  return r;
}

}  // namespace

void save_checkpoint(const TrainState& state, const TrainReport& report,
                     const std::string& path) {
  json j;
  j["config"] = config_to_json(state.config);
  j["epoch"] = state.epoch;
  j["observed_dim"] = state.observed_dim;
  j["latent_dim"] = state.latent_dim;
  j["noise_rng"] = state.noise_rng.state();
  json params = json::array();
  for (const auto& t : collect_trainable(state)) params.push_back(t.value());
  j["params"] = std::move(params);
  j["adam"] = json{{"steps", state.optimizer.steps_taken()},
                   {"m", state.optimizer.first_moments()},
                   {"v", state.optimizer.second_moments()}};
  j["report"] = report_to_json(report);

  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw IoError("malformed checkpoint " + path + ": " + ex.what());
  }

  Checkpoint cp;
  const TrainConfig config = config_from_json(j.at("config"));
  cp.state = init_train_state(config, j.at("observed_dim").get<std::size_t>(),
                              j.at("latent_dim").get<std::size_t>());
  cp.state.epoch = j.at("epoch").get<std::size_t>();
  cp.state.noise_rng.set_state(j.at("noise_rng").get<std::uint64_t>());

  auto tensors = collect_trainable(cp.state);
  const auto& params = j.at("params");
  if (params.size() != tensors.size())
    throw IoError("checkpoint parameter list disagrees with the architecture");
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    auto values = params[i].get<std::vector<double>>();
    if (values.size() != tensors[i].numel())
      throw IoError("checkpoint parameter size mismatch");
    tensors[i].mutable_value() = std::move(values);
  }

  const auto& adam = j.at("adam");
  cp.state.optimizer.restore(adam.at("m").get<std::vector<std::vector<double>>>(),
                             adam.at("v").get<std::vector<std::vector<double>>>(),
                             adam.at("steps").get<std::size_t>());
  cp.report = report_from_json(j.at("report"));
  return cp;
}

}  // namespace hmmvae::model
