#include "synth/episode.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "common/errors.hpp"
#include "flow/flow.hpp"

namespace hmmvae::synth {

std::vector<int> sample_state_path(const SourceSpec& spec, std::size_t T, Rng& rng) {
  if (T < 1) throw std::invalid_argument("sample_state_path: T must be at least 1");
  const std::size_t k = spec.num_states;
  std::vector<int> path(T);
  path[0] = static_cast<int>(rng.categorical(spec.initial)) + 1;
  std::vector<double> row(k);
  for (std::size_t t = 1; t < T; ++t) {
    const std::size_t a = static_cast<std::size_t>(path[t - 1] - 1);
    for (std::size_t b = 0; b < k; ++b) row[b] = spec.transition(a, b);
    path[t] = static_cast<int>(rng.categorical(row)) + 1;
  }
  return path;
}

namespace {

double apply_flow(const std::vector<FlowLayerSpec>& layers, double x) {
  for (const auto& l : layers) x = flow::sash_forward(x, l.skew, l.tail_weight);
  return x;
}

}  // namespace

std::vector<double> sample_source(const SourceSpec& spec, const std::vector<int>& states,
                                  Rng& rng) {
  if (states.empty()) throw std::invalid_argument("sample_source: empty state path");
  const std::size_t T = states.size();
  std::vector<double> s(T);
  for (std::size_t t = 0; t < T; ++t) {
    const auto k = static_cast<std::size_t>(states[t] - 1);
    if (k >= spec.num_states)
      throw std::invalid_argument("sample_source: state label out of range");
    switch (spec.kind) {
      case SourceKind::kGaussianEmission:
        s[t] = rng.normal(spec.means[k], std::sqrt(spec.variances[k]));
        break;
      case SourceKind::kMsar:
        if (t == 0) {
          s[t] = rng.normal(spec.initial_mean(k), std::sqrt(spec.initial_var(k)));
        } else {
          const double mean = spec.means[k] + spec.ar_coeffs[k] * (s[t - 1] - spec.means[k]);
          s[t] = rng.normal(mean, std::sqrt(spec.innov_variances[k]));
        }
        break;
      case SourceKind::kStateFlow:
        if (t == 0) {
          s[t] = rng.normal(spec.initial_mean(k), std::sqrt(spec.initial_var(k)));
        } else {
          const double innovation = apply_flow(spec.flows[k], rng.normal());
          s[t] = spec.ar_coeffs[k] * s[t - 1] + spec.scales[k] * innovation;
        }
        break;
    }
  }
  return s;
}

Mat mix(const MixingSpec& spec, const Mat& sources, Rng& rng) {
  const std::size_t n = sources.cols;
  spec.validate(n);
  const std::size_t T = sources.rows;
  const std::size_t m = spec.observed_dim();
  Mat y(T, m);
  std::vector<double> hidden;
  for (std::size_t t = 0; t < T; ++t) {
    if (spec.kind == MixingKind::kLinear) {
      for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += spec.matrix(i, j) * sources(t, j);
        y(t, i) = acc;
      }
    } else {
      const std::size_t h = spec.w1.rows;
      hidden.assign(h, 0.0);
      for (std::size_t i = 0; i < h; ++i) {
        double acc = spec.b1[i];
        for (std::size_t j = 0; j < n; ++j) acc += spec.w1(i, j) * sources(t, j);
        hidden[i] = std::tanh(acc);
      }
      for (std::size_t i = 0; i < m; ++i) {
        double acc = spec.b2[i];
        for (std::size_t j = 0; j < h; ++j) acc += spec.w2(i, j) * hidden[j];
        y(t, i) = acc;
      }
    }
    if (spec.noise_std > 0.0)
      for (std::size_t i = 0; i < m; ++i) y(t, i) += rng.normal(0.0, spec.noise_std);
  }
  return y;
}

EpisodeData make_episode(const std::vector<SourceSpec>& specs, const MixingSpec& mixing,
                         std::size_t T, std::uint64_t seed) {
  if (T < 1) throw std::invalid_argument("make_episode: T must be at least 1");
  if (specs.empty()) throw std::invalid_argument("make_episode: at least one source required");
  for (const auto& s : specs) s.validate();
  const std::size_t n = specs.size();
  mixing.validate(n);

  EpisodeData e;
  e.T = T;
  e.seed = seed;
  e.source_specs = specs;
  e.mixing = mixing;
  e.sources = Mat(T, n);
  e.states = IMat(T, n);

  Rng rng(seed);
  for (std::size_t j = 0; j < n; ++j) {
    const auto path = sample_state_path(specs[j], T, rng);
    const auto traj = sample_source(specs[j], path, rng);
    for (std::size_t t = 0; t < T; ++t) {
      e.states(t, j) = path[t];
      e.sources(t, j) = traj[t];
    }
  }
  e.observations = mix(mixing, e.sources, rng);
  return e;
}

namespace {

using nlohmann::json;

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols; ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat mat_from_json(const json& j) {
  std::vector<std::vector<double>> rows;
  rows.reserve(j.size());
  for (const auto& row : j) rows.push_back(row.get<std::vector<double>>());
  return Mat::from_rows(rows);
}

}  // namespace

nlohmann::json source_spec_to_json(const SourceSpec& s) {
  json j;
  j["kind"] = source_kind_to_string(s.kind);
  j["num_states"] = s.num_states;
  j["initial"] = s.initial;
  j["transition"] = mat_to_json(s.transition);
  switch (s.kind) {
    case SourceKind::kGaussianEmission:
      j["means"] = s.means;
      j["variances"] = s.variances;
      break;
    case SourceKind::kMsar:
      j["means"] = s.means;
      j["ar_coeffs"] = s.ar_coeffs;
      j["innov_variances"] = s.innov_variances;
      break;
    case SourceKind::kStateFlow: {
      j["ar_coeffs"] = s.ar_coeffs;
      j["scales"] = s.scales;
      json flows = json::array();
      for (const auto& f : s.flows) {
        json layers = json::array();
        for (const auto& l : f)
          layers.push_back(json{{"skew", l.skew}, {"tail_weight", l.tail_weight}});
        flows.push_back(std::move(layers));
      }
      j["flows"] = std::move(flows);
      break;
    }
  }
  return j;
}

SourceSpec source_spec_from_json(const nlohmann::json& j) {
  SourceSpec s;
  s.kind = source_kind_from_string(j.at("kind").get<std::string>());
  s.num_states = j.at("num_states").get<std::size_t>();
  s.initial = j.at("initial").get<std::vector<double>>();
  s.transition = mat_from_json(j.at("transition"));
  switch (s.kind) {
    case SourceKind::kGaussianEmission:
      s.means = j.at("means").get<std::vector<double>>();
      s.variances = j.at("variances").get<std::vector<double>>();
      break;
    case SourceKind::kMsar:
      s.means = j.at("means").get<std::vector<double>>();
      s.ar_coeffs = j.at("ar_coeffs").get<std::vector<double>>();
      s.innov_variances = j.at("innov_variances").get<std::vector<double>>();
      break;
    case SourceKind::kStateFlow:
      s.ar_coeffs = j.at("ar_coeffs").get<std::vector<double>>();
      s.scales = j.at("scales").get<std::vector<double>>();
      for (const auto& f : j.at("flows")) {
        std::vector<FlowLayerSpec> layers;
        for (const auto& l : f)
          layers.push_back({l.at("skew").get<double>(), l.at("tail_weight").get<double>()});
        s.flows.push_back(std::move(layers));
      }
      break;
  }
  return s;
}

nlohmann::json mixing_spec_to_json(const MixingSpec& m) {
  json j;
  j["noise_std"] = m.noise_std;
  if (m.kind == MixingKind::kLinear) {
    j["kind"] = "linear";
    j["matrix"] = mat_to_json(m.matrix);
  } else {
    j["kind"] = "mlp";
    j["w1"] = mat_to_json(m.w1);
    j["b1"] = m.b1;
    j["w2"] = mat_to_json(m.w2);
    j["b2"] = m.b2;
  }
  return j;
}

MixingSpec mixing_spec_from_json(const nlohmann::json& j) {
  MixingSpec m;
  m.noise_std = j.at("noise_std").get<double>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "linear") {
    m.kind = MixingKind::kLinear;
    m.matrix = mat_from_json(j.at("matrix"));
  } else if (kind == "mlp") {
    m.kind = MixingKind::kMlp;
    m.w1 = mat_from_json(j.at("w1"));
    m.b1 = j.at("b1").get<std::vector<double>>();
    m.w2 = mat_from_json(j.at("w2"));
    m.b2 = j.at("b2").get<std::vector<double>>();
  } else {
    throw std::invalid_argument("mixing: unknown kind \"" + kind + "\"");
  }
  return m;
}

namespace {

json episode_to_json(const EpisodeData& e) {
  json j;
  j["T"] = e.T;
  j["seed"] = e.seed;
  json specs = json::array();
  for (const auto& s : e.source_specs) specs.push_back(source_spec_to_json(s));
  j["source_specs"] = std::move(specs);
  j["mixing"] = mixing_spec_to_json(e.mixing);
  j["sources"] = mat_to_json(e.sources);
  json states = json::array();
  for (std::size_t r = 0; r < e.states.rows; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < e.states.cols; ++c) row.push_back(e.states(r, c));
    states.push_back(std::move(row));
  }
  j["states"] = std::move(states);
  j["observations"] = mat_to_json(e.observations);
  return j;
}

EpisodeData episode_from_json(const json& j) {
  EpisodeData e;
  e.T = j.at("T").get<std::size_t>();
  e.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& s : j.at("source_specs")) e.source_specs.push_back(source_spec_from_json(s));
  e.mixing = mixing_spec_from_json(j.at("mixing"));
  e.sources = mat_from_json(j.at("sources"));
  const auto& st = j.at("states");
  e.states = IMat(st.size(), st.empty() ? 0 : st[0].size());
  for (std::size_t r = 0; r < e.states.rows; ++r)
    for (std::size_t c = 0; c < e.states.cols; ++c)
      e.states(r, c) = st[r][c].get<int>();
  e.observations = mat_from_json(j.at("observations"));
  return e;
}

}  // namespace

std::string episode_json(const EpisodeData& e) { return episode_to_json(e).dump(); }

void save_episode(const EpisodeData& e, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << episode_to_json(e).dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path);
}

EpisodeData load_episode(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j;
  try {
    in >> j;
    return episode_from_json(j);
  } catch (const json::exception& ex) {
    throw IoError("malformed episode file " + path + ": " + ex.what());
  }
}

}  // namespace hmmvae::synth
