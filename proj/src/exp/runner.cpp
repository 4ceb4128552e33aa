#include "exp/runner.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "common/errors.hpp"
#include "eval/metrics.hpp"
#include "exp/csv.hpp"
#include "exp/svg.hpp"
#include "prior/decode.hpp"
#include "prior/scoring.hpp"

namespace fs = std::filesystem;

namespace hmmvae::exp {

namespace {

void write_loss_csv(const std::string& dir, const model::TrainReport& report, std::size_t n) {
  std::vector<std::string> header = {"epoch", "total", "rec", "logq", "logp"};
  for (std::size_t j = 0; j < n; ++j) header.push_back("abs_corr_src" + std::to_string(j + 1));
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : report.logged) {
    std::vector<std::string> cells = {fmt(row.epoch), fmt(row.total), fmt(row.rec),
                                      fmt(row.logq), fmt(row.logp)};
    for (std::size_t j = 0; j < n; ++j)
      cells.push_back(fmt(j < row.abs_corr.size() ? row.abs_corr[j] : 0.0));
    rows.push_back(std::move(cells));
  }
  write_csv(dir + "/loss.csv", header, rows);
}

bool columns_have_variance(const Mat& m) {
  for (std::size_t c = 0; c < m.cols; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < m.rows; ++r) mean += m(r, c);
    mean /= static_cast<double>(m.rows);
    double var = 0.0;
    for (std::size_t r = 0; r < m.rows; ++r) var += (m(r, c) - mean) * (m(r, c) - mean);
    if (var <= 0.0) return false;
  }
  return true;
}

std::vector<int> decode_states(const Mat& latents, std::size_t column,
                               const prior::SourcePriorParams& p) {
  const ad::Tensor traj = ad::Tensor::constant({latents.rows}, latents.col(column));
  const ad::Tensor local = prior::local_scores(traj, p);
  return prior::viterbi(local, p.init_logits, p.trans_logits);
}

}  // namespace

std::string episode_hash(const synth::EpisodeData& episode) {
  const std::string payload = synth::episode_json(episode);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : payload) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = hex[h & 0xF];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf);
}

RunSummary run_on_episode(const ExperimentConfig& config, const synth::EpisodeData& episode) {
  fs::create_directories(config.output_dir);
  const std::string dir = config.output_dir;
  const std::size_t n = episode.sources.cols;
  const std::size_t T = episode.T;
  const std::size_t K = config.train.num_states;

  model::TrainState state = model::init_train_state(config.train, episode);
  model::TrainReport report;
  try {
    model::train_epochs(state, episode, config.train.epochs, report);
  } catch (const TrainingDiverged& ex) {
    write_loss_csv(dir, report, n);
    nlohmann::json diag;
    diag["error"] = ex.what();
    diag["epochs_completed"] = report.loss_curve.empty() ? 0 : report.loss_curve.size() - 1;
    if (!report.loss_curve.empty()) {
      const auto& last = report.loss_curve.back();
      diag["last_epoch"] =
          nlohmann::json{{"epoch", last.epoch}, {"total", last.total},   {"rec", last.rec},
                         {"logq", last.logq},   {"logp", last.logp},     {"beta", last.beta}};
    }
    std::ofstream out(dir + "/diagnostics.json");
    out << diag.dump(2) << '\n';
    throw;
  }

  write_loss_csv(dir, report, n);

  RunSummary summary;
  const auto& final_point = report.loss_curve.back();
  summary.final_total = final_point.total;
  summary.final_rec = final_point.rec;
  summary.final_logq = final_point.logq;
  summary.final_logp = final_point.logp;
  for (double lv : state.log_var.value()) summary.posterior_var.push_back(std::exp(lv));

  // ---- source recovery ----
  const Mat mu = model::apply_mlp_values(state.encoder, episode.observations);
  eval::MatchResult match;
  if (columns_have_variance(mu) && columns_have_variance(episode.sources)) {
    match = eval::match_sources(mu, episode.sources);
  } else {
    match.permutation.resize(n);
    for (std::size_t j = 0; j < n; ++j) match.permutation[j] = j;
    match.signs.assign(n, 1);
    match.abs_corr.assign(n, 0.0);
  }
  summary.abs_corr = match.abs_corr;
  summary.mean_abs_corr = match.mean_abs_corr;

  {
    std::vector<std::string> header = {"t"};
    for (std::size_t j = 0; j < n; ++j) header.push_back("true_src" + std::to_string(j + 1));
    for (std::size_t j = 0; j < n; ++j) header.push_back("est_src" + std::to_string(j + 1));
    std::vector<std::vector<std::string>> rows;
    for (std::size_t t = 0; t < T; ++t) {
      std::vector<std::string> cells = {fmt(t)};
      for (std::size_t j = 0; j < n; ++j) cells.push_back(fmt(episode.sources(t, j)));
      for (std::size_t j = 0; j < n; ++j)
        cells.push_back(fmt(match.signs[j] * mu(t, match.permutation[j])));
      rows.push_back(std::move(cells));
    }
    write_csv(dir + "/sources.csv", header, rows);
  }

  // ---- state recovery ----
  std::vector<std::vector<int>> decoded_matched(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t latent = match.permutation[j];
    const auto decoded = decode_states(mu, latent, state.priors[latent]);
    const auto truth = episode.states.col(j);
    const auto sm = eval::match_states(decoded, truth, K);
    summary.state_accuracy.push_back(sm.accuracy);
    decoded_matched[j].resize(T);
    for (std::size_t t = 0; t < T; ++t)
      decoded_matched[j][t] = sm.label_map[static_cast<std::size_t>(decoded[t] - 1)];

    // learned vs empirical transition structure, in the model's label space
    const auto snapshot = prior::snapshot_source(state.priors[latent]);
    const auto empirical = eval::empirical_transition_matrix(decoded, K);
    std::vector<std::size_t> identity(K);
    for (std::size_t k = 0; k < K; ++k) identity[k] = k;
    const auto agree = eval::transition_agreement(snapshot.transition, empirical.matrix, identity);
    summary.transition_tv.push_back(agree.mean_tv);
    summary.learned_diag_dominant.push_back(agree.learned_diag_dominant);
    summary.empirical_diag_dominant.push_back(agree.empirical_diag_dominant);
  }
  double acc_sum = 0.0, tv_sum = 0.0;
  for (double a : summary.state_accuracy) acc_sum += a;
  for (double v : summary.transition_tv) tv_sum += v;
  summary.mean_state_accuracy = acc_sum / static_cast<double>(n);
  summary.mean_transition_tv = tv_sum / static_cast<double>(n);

  {
    std::vector<std::string> header = {"t"};
    for (std::size_t j = 0; j < n; ++j) header.push_back("true_src" + std::to_string(j + 1));
    for (std::size_t j = 0; j < n; ++j) header.push_back("decoded_src" + std::to_string(j + 1));
    std::vector<std::vector<std::string>> rows;
    for (std::size_t t = 0; t < T; ++t) {
      std::vector<std::string> cells = {fmt(t)};
      for (std::size_t j = 0; j < n; ++j) cells.push_back(fmt(episode.states(t, j)));
      for (std::size_t j = 0; j < n; ++j) cells.push_back(fmt(decoded_matched[j][t]));
      rows.push_back(std::move(cells));
    }
    write_csv(dir + "/states.csv", header, rows);
  }

  {
    std::vector<std::string> header = {"source", "kind", "row"};
    for (std::size_t k = 0; k < K; ++k) header.push_back("p" + std::to_string(k + 1));
    std::vector<std::vector<std::string>> rows;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t latent = match.permutation[j];
      const auto snapshot = prior::snapshot_source(state.priors[latent]);
      const auto decoded = decode_states(mu, latent, state.priors[latent]);
      const auto empirical = eval::empirical_transition_matrix(decoded, K);
      for (std::size_t r = 0; r < K; ++r) {
        std::vector<std::string> cells = {fmt(j + 1), "learned", fmt(r + 1)};
        for (std::size_t c = 0; c < K; ++c) cells.push_back(fmt(snapshot.transition(r, c)));
        rows.push_back(std::move(cells));
      }
      for (std::size_t r = 0; r < K; ++r) {
        std::vector<std::string> cells = {fmt(j + 1), "empirical", fmt(r + 1)};
        for (std::size_t c = 0; c < K; ++c) cells.push_back(fmt(empirical.matrix(r, c)));
        rows.push_back(std::move(cells));
      }
    }
    write_csv(dir + "/transitions.csv", header, rows);
  }

  {
    std::vector<std::vector<std::string>> rows;
    auto add = [&rows](const std::string& name, const std::string& value) {
      rows.push_back({name, value});
    };
    for (std::size_t j = 0; j < n; ++j)
      add("abs_corr_src" + std::to_string(j + 1), fmt(summary.abs_corr[j]));
    add("mean_abs_corr", fmt(summary.mean_abs_corr));
    for (std::size_t j = 0; j < n; ++j)
      add("state_accuracy_src" + std::to_string(j + 1), fmt(summary.state_accuracy[j]));
    add("mean_state_accuracy", fmt(summary.mean_state_accuracy));
    for (std::size_t j = 0; j < n; ++j)
      add("transition_tv_src" + std::to_string(j + 1), fmt(summary.transition_tv[j]));
    add("mean_transition_tv", fmt(summary.mean_transition_tv));
    for (std::size_t j = 0; j < n; ++j)
      add("learned_diag_dominant_src" + std::to_string(j + 1),
          summary.learned_diag_dominant[j] ? "1" : "0");
    for (std::size_t j = 0; j < n; ++j)
      add("empirical_diag_dominant_src" + std::to_string(j + 1),
          summary.empirical_diag_dominant[j] ? "1" : "0");
    add("final_total", fmt(summary.final_total));
    add("final_rec", fmt(summary.final_rec));
    add("final_logq", fmt(summary.final_logq));
    add("final_logp", fmt(summary.final_logp));
    for (std::size_t j = 0; j < n; ++j)
      add("posterior_var_src" + std::to_string(j + 1), fmt(summary.posterior_var[j]));
    add("epochs", fmt(config.train.epochs));
    add("episode_hash", episode_hash(episode));
    write_csv(dir + "/metrics.csv", {"metric", "value"}, rows);
  }

  {
    nlohmann::json priors = nlohmann::json::array();
    for (const auto& p : state.priors)
      priors.push_back(model::snapshot_to_json(prior::snapshot_source(p)));
    std::ofstream out(dir + "/priors.json");
    if (!out) throw IoError("cannot open " + dir + "/priors.json for writing");
    out << priors.dump(2) << '\n';
  }

  if (config.plots) render_plots(dir);
  return summary;
}

RunSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  return run_on_episode(config, config.realize_episode());
}

void generate_episode(const ExperimentConfig& config, const std::string& out_path) {
  config.validate();
  const auto episode = config.realize_episode();
  const auto parent = fs::path(out_path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  synth::save_episode(episode, out_path);
}

void compare_branches(const ExperimentConfig& config) {
  config.validate();
  const auto episode = config.realize_episode();
  fs::create_directories(config.output_dir);
  const std::string hash = episode_hash(episode);

  std::vector<std::vector<std::string>> rows;
  for (int b = 1; b <= 3; ++b) {
    ExperimentConfig sub = config;
    sub.train.branch = prior::branch_from_int(b);
    sub.output_dir = config.output_dir + "/branch" + std::to_string(b);
    const RunSummary s = run_on_episode(sub, episode);
    rows.push_back({fmt(b), fmt(s.mean_abs_corr), fmt(s.mean_state_accuracy),
                    fmt(s.mean_transition_tv), hash});
  }
  write_csv(config.output_dir + "/comparison.csv",
            {"branch", "mean_abs_corr", "mean_state_accuracy", "mean_transition_tv",
             "episode_hash"},
            rows);
}

}  // namespace hmmvae::exp
