#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "model/train.hpp"
#include "synth/episode.hpp"

namespace hmmvae::exp {

// One experiment = an episode (inline spec or file reference), a training
// configuration, and output settings. Parsed from a single JSON file.
struct ExperimentConfig {
  // episode section: either a path to a saved episode...
  std::string episode_path;
  // ...or an inline generator spec
  std::vector<synth::SourceSpec> source_specs;
  synth::MixingSpec mixing;
  std::size_t episode_length = 0;
  std::uint64_t episode_seed = 0;

  model::TrainConfig train;
  std::string output_dir = "out";
  bool plots = true;

  bool episode_from_file() const { return !episode_path.empty(); }

  // throws ConfigError on any structural or range problem
  void validate() const;

  // produce the episode this config describes (loads or generates)
  synth::EpisodeData realize_episode() const;
};

// parse + validate; throws ConfigError with a line-level description
ExperimentConfig load_config(const std::string& path);

}  // namespace hmmvae::exp
