#include "exp/config.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "common/errors.hpp"

namespace hmmvae::exp {

namespace {

using nlohmann::json;

model::TrainConfig train_from_json(const json& j) {
  model::TrainConfig c;
  c.branch = prior::branch_from_int(j.at("branch").get<int>());
  c.num_states = j.at("num_states").get<std::size_t>();
  if (j.contains("flow_layers")) c.flow_layers = j.at("flow_layers").get<std::size_t>();
  if (j.contains("beta")) c.beta = j.at("beta").get<double>();
  if (j.contains("beta_warmup")) c.beta_warmup = j.at("beta_warmup").get<bool>();
  if (j.contains("learning_rate")) c.learning_rate = j.at("learning_rate").get<double>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("encoder_hidden"))
    c.encoder_hidden = j.at("encoder_hidden").get<std::vector<std::size_t>>();
  if (j.contains("decoder_hidden"))
    c.decoder_hidden = j.at("decoder_hidden").get<std::vector<std::size_t>>();
  if (j.contains("log_every")) c.log_every = j.at("log_every").get<std::size_t>();
  if (j.contains("adam_beta1")) c.adam_beta1 = j.at("adam_beta1").get<double>();
  if (j.contains("adam_beta2")) c.adam_beta2 = j.at("adam_beta2").get<double>();
  if (j.contains("adam_eps")) c.adam_eps = j.at("adam_eps").get<double>();
  return c;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (episode_from_file()) {
    if (!std::filesystem::exists(episode_path))
      throw ConfigError("episode file does not exist: " + episode_path);
  } else {
    if (source_specs.empty()) throw ConfigError("episode: at least one source required");
    if (episode_length < 2) throw ConfigError("episode: length must be at least 2");
    try {
      for (const auto& s : source_specs) s.validate();
      mixing.validate(source_specs.size());
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(std::string("episode: ") + ex.what());
    }
  }
  try {
    train.validate();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("model: ") + ex.what());
  }
  if (train.learning_rate <= 0.0) throw ConfigError("model: learning rate must be positive");
  if (output_dir.empty()) throw ConfigError("output directory must not be empty");
}

synth::EpisodeData ExperimentConfig::realize_episode() const {
  if (episode_from_file()) return synth::load_episode(episode_path);
  return synth::make_episode(source_specs, mixing, episode_length, episode_seed);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw ConfigError("config is not valid JSON: " + std::string(ex.what()));
  }

  ExperimentConfig cfg;
  try {
    const auto& episode = j.at("episode");
    if (episode.contains("path")) {
      cfg.episode_path = episode.at("path").get<std::string>();
      // a relative episode path is resolved against the config's directory
      const auto base = std::filesystem::path(path).parent_path();
      if (!cfg.episode_path.empty() && std::filesystem::path(cfg.episode_path).is_relative())
        cfg.episode_path = (base / cfg.episode_path).string();
    } else {
      cfg.episode_length = episode.at("T").get<std::size_t>();
      cfg.episode_seed = episode.at("seed").get<std::uint64_t>();
      for (const auto& s : episode.at("sources"))
        cfg.source_specs.push_back(synth::source_spec_from_json(s));
      cfg.mixing = synth::mixing_spec_from_json(episode.at("mixing"));
    }
    cfg.train = train_from_json(j.at("model"));
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("plots")) cfg.plots = j.at("plots").get<bool>();
  } catch (const json::exception& ex) {
    throw ConfigError("config field error: " + std::string(ex.what()));
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("config: ") + ex.what());
  }

  cfg.validate();
  return cfg;
}

}  // namespace hmmvae::exp
