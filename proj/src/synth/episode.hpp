#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "common/mat.hpp"
#include "common/rng.hpp"
#include "synth/specs.hpp"

namespace hmmvae::synth {

// One generated training episode: ground-truth sources and state paths plus
// the mixed observations, bundled with everything needed to reproduce them.
struct EpisodeData {
  std::size_t T = 0;
  std::uint64_t seed = 0;
  std::vector<SourceSpec> source_specs;
  MixingSpec mixing;
  Mat sources;       // [T,n]
  IMat states;       // [T,n], labels in 1..K
  Mat observations;  // [T,m]
};

// c1 ~ Categorical(initial); c_t | c_{t-1}=a ~ Categorical(row a). 1-based.
std::vector<int> sample_state_path(const SourceSpec& spec, std::size_t T, Rng& rng);

// Draws one trajectory conditioned on a 1-based state path.
std::vector<double> sample_source(const SourceSpec& spec, const std::vector<int>& states,
                                  Rng& rng);

// Applies the observation map row by row and adds i.i.d. Gaussian noise.
Mat mix(const MixingSpec& spec, const Mat& sources, Rng& rng);

// Deterministic in (specs, mixing, T, seed). Draw order: for each source in
// turn its state path then its trajectory, then the observation noise.
EpisodeData make_episode(const std::vector<SourceSpec>& specs, const MixingSpec& mixing,
                         std::size_t T, std::uint64_t seed);

// JSON views of SourceSpec and MixingSpec, shared by episode files and experiment
// configs; numbers serialize with shortest-round-trip precision
nlohmann::json source_spec_to_json(const SourceSpec& s);
SourceSpec source_spec_from_json(const nlohmann::json& j);
nlohmann::json mixing_spec_to_json(const MixingSpec& m);
MixingSpec mixing_spec_from_json(const nlohmann::json& j);

// Compact single-line serialization (also the on-disk payload); numbers are
// written with shortest-round-trip precision so load is exact.
std::string episode_json(const EpisodeData& e);

void save_episode(const EpisodeData& e, const std::string& path);
EpisodeData load_episode(const std::string& path);

}  // namespace hmmvae::synth
