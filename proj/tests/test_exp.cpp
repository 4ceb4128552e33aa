#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "common/errors.hpp"
#include "exp/config.hpp"
#include "exp/csv.hpp"
#include "exp/runner.hpp"
#include "synth/episode.hpp"

using namespace hmmvae;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hmmvae_exp_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(static_cast<bool>(f));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json inline_config_json(std::size_t epochs = 2) {
  json src1;
  src1["kind"] = "gaussian-emission";
  src1["num_states"] = 2;
  src1["initial"] = {0.5, 0.5};
  src1["transition"] = {{0.9, 0.1}, {0.1, 0.9}};
  src1["means"] = {-1.0, 1.0};
  src1["variances"] = {0.04, 0.04};
  json src2 = src1;
  src2["means"] = {-0.8, 1.2};

  json mixing;
  mixing["kind"] = "linear";
  mixing["noise_std"] = 0.01;
  mixing["matrix"] = {{0.8, 0.6}, {0.6, -0.8}};

  json cfg;
  cfg["episode"]["T"] = 60;
  cfg["episode"]["seed"] = 7;
  cfg["episode"]["sources"] = {src1, src2};
  cfg["episode"]["mixing"] = mixing;
  cfg["model"]["branch"] = 1;
  cfg["model"]["num_states"] = 2;
  cfg["model"]["epochs"] = epochs;
  cfg["model"]["seed"] = 3;
  cfg["model"]["encoder_hidden"] = {4};
  cfg["model"]["log_every"] = 1;
  cfg["model"]["beta"] = 0.05;
  cfg["plots"] = true;
  return cfg;
}

fs::path write_config(const fs::path& dir, const json& j, const std::string& name = "cfg.json") {
  const fs::path p = dir / name;
  std::ofstream out(p);
  out << j.dump(2) << '\n';
  return p;
}

}  // namespace

TEST_CASE("fmt renders doubles at nine significant digits, locale-free") {
  CHECK(exp::fmt(1.0 / 3.0) == "0.333333333");
  CHECK(exp::fmt(2.0) == "2");
  CHECK(exp::fmt(-0.25) == "-0.25");
  CHECK(exp::fmt(1e-10) == "1e-10");
  CHECK(exp::fmt(123456789.0) == "123456789");
  CHECK(exp::fmt(std::size_t{42}) == "42");
  CHECK(exp::fmt(-3) == "-3");
}

TEST_CASE("csv round-trips and resolves columns") {
  const auto dir = fresh_dir("csv");
  const std::string path = (dir / "t.csv").string();
  exp::write_csv(path, {"a", "b"}, {{"1", "x"}, {"2.5", "y"}});
  const exp::Csv csv = exp::read_csv(path);
  CHECK(csv.header == std::vector<std::string>{"a", "b"});
  REQUIRE(csv.rows.size() == 2);
  CHECK(csv.rows[1][0] == "2.5");
  CHECK(csv.column("b") == 1);
  CHECK_THROWS_AS(csv.column("nope"), std::invalid_argument);
  CHECK_THROWS_AS(exp::read_csv((dir / "absent.csv").string()), IoError);
  CHECK_THROWS_AS(exp::write_csv(path, {"a", "b"}, {{"only-one"}}), std::invalid_argument);
}

TEST_CASE("config loads an inline episode spec") {
  const auto dir = fresh_dir("cfg_ok");
  const auto path = write_config(dir, inline_config_json());
  const exp::ExperimentConfig cfg = exp::load_config(path.string());
  CHECK_FALSE(cfg.episode_from_file());
  CHECK(cfg.episode_length == 60);
  CHECK(cfg.episode_seed == 7);
  REQUIRE(cfg.source_specs.size() == 2);
  CHECK(cfg.source_specs[1].means == std::vector<double>{-0.8, 1.2});
  CHECK(cfg.mixing.noise_std == doctest::Approx(0.01));
  CHECK(cfg.train.branch == prior::Branch::kGaussianEmission);
  CHECK(cfg.train.epochs == 2);
  CHECK(cfg.train.encoder_hidden == std::vector<std::size_t>{4});
  CHECK(cfg.output_dir == "out");  // default when the file omits it
  CHECK(cfg.plots);

  const auto episode = cfg.realize_episode();
  CHECK(episode.T == 60);
  CHECK(episode.sources.cols == 2);
  CHECK(episode.observations.cols == 2);
}

TEST_CASE("config rejects structural problems with ConfigError") {
  const auto dir = fresh_dir("cfg_bad");

  CHECK_THROWS_AS(exp::load_config((dir / "missing.json").string()), ConfigError);

  {
    const fs::path p = dir / "notjson.json";
    std::ofstream(p) << "{ not json";
    CHECK_THROWS_AS(exp::load_config(p.string()), ConfigError);
  }
  {
    json j = inline_config_json();
    j.erase("model");
    CHECK_THROWS_AS(exp::load_config(write_config(dir, j, "nomodel.json").string()),
                    ConfigError);
  }
  {
    json j = inline_config_json();
    j["model"]["branch"] = 5;
    CHECK_THROWS_AS(exp::load_config(write_config(dir, j, "badbranch.json").string()),
                    ConfigError);
  }
  {
    json j = inline_config_json();
    j["episode"]["T"] = 1;
    CHECK_THROWS_AS(exp::load_config(write_config(dir, j, "shortT.json").string()),
                    ConfigError);
  }
  {
    json j = inline_config_json();
    j["model"]["learning_rate"] = 0.0;
    CHECK_THROWS_AS(exp::load_config(write_config(dir, j, "zerolr.json").string()),
                    ConfigError);
  }
  {
    json j = inline_config_json();
    j["episode"] = {{"path", (dir / "no_such_episode.json").string()}};
    CHECK_THROWS_AS(exp::load_config(write_config(dir, j, "noep.json").string()), ConfigError);
  }
  {
    json j = inline_config_json();
    j["episode"]["mixing"]["matrix"] = {{0.8, 0.6, 0.1}, {0.6, -0.8, 0.2}};  // 3 cols, 2 sources
    CHECK_THROWS_AS(exp::load_config(write_config(dir, j, "badmix.json").string()),
                    ConfigError);
  }
}

TEST_CASE("relative episode paths resolve against the config directory") {
  const auto dir = fresh_dir("cfg_rel");
  exp::ExperimentConfig gen = exp::load_config(write_config(dir, inline_config_json()).string());
  exp::generate_episode(gen, (dir / "ep.json").string());

  json j = inline_config_json();
  j["episode"] = {{"path", "ep.json"}};
  const exp::ExperimentConfig cfg =
      exp::load_config(write_config(dir, j, "file_ref.json").string());
  CHECK(cfg.episode_from_file());
  const auto episode = cfg.realize_episode();
  CHECK(episode.T == 60);
  CHECK(exp::episode_hash(episode) == exp::episode_hash(gen.realize_episode()));
}

TEST_CASE("run_experiment writes the full output set") {
  const auto dir = fresh_dir("run_full");
  json j = inline_config_json(/*epochs=*/2);
  j["output_dir"] = (dir / "out").string();
  const exp::ExperimentConfig cfg = exp::load_config(write_config(dir, j).string());
  const exp::RunSummary summary = exp::run_experiment(cfg);

  for (const char* f : {"loss.csv", "sources.csv", "states.csv", "transitions.csv",
                        "metrics.csv", "priors.json", "loss.svg", "sources.svg", "states.svg",
                        "transitions.svg"})
    CHECK_MESSAGE(fs::exists(dir / "out" / f), f);

  const exp::Csv loss = exp::read_csv((dir / "out" / "loss.csv").string());
  CHECK(loss.header == std::vector<std::string>{"epoch", "total", "rec", "logq", "logp",
                                                "abs_corr_src1", "abs_corr_src2"});
  CHECK(loss.rows.size() == 2);  // log_every=1, epochs=2

  const exp::Csv metrics = exp::read_csv((dir / "out" / "metrics.csv").string());
  CHECK(metrics.header == std::vector<std::string>{"metric", "value"});
  for (const char* key : {"mean_abs_corr", "mean_state_accuracy", "mean_transition_tv",
                          "final_total", "posterior_var_src2", "epochs", "episode_hash"}) {
    bool found = false;
    for (const auto& row : metrics.rows) found = found || row[0] == key;
    CHECK_MESSAGE(found, key);
  }
  for (const auto& row : metrics.rows)
    CHECK(row[0].find("time") == std::string::npos);  // nothing wall-clock dependent

  CHECK(summary.abs_corr.size() == 2);
  CHECK(summary.state_accuracy.size() == 2);
  CHECK(summary.transition_tv.size() == 2);
  CHECK(summary.posterior_var.size() == 2);
  CHECK(summary.mean_state_accuracy >= 0.0);
  CHECK(summary.mean_state_accuracy <= 1.0);

  const exp::Csv states = exp::read_csv((dir / "out" / "states.csv").string());
  CHECK(states.rows.size() == 60);
  const exp::Csv trans = exp::read_csv((dir / "out" / "transitions.csv").string());
  CHECK(trans.rows.size() == 2 * 2 * 2);  // 2 sources x {learned, empirical} x 2 rows

  // priors.json holds one snapshot per latent dimension
  json priors;
  std::ifstream((dir / "out" / "priors.json")) >> priors;
  REQUIRE(priors.is_array());
  CHECK(priors.size() == 2);
  CHECK(priors[0].contains("transition"));
}

TEST_CASE("a one-epoch run logs exactly one row") {
  const auto dir = fresh_dir("run_one");
  json j = inline_config_json(/*epochs=*/1);
  j["output_dir"] = (dir / "out").string();
  exp::run_experiment(exp::load_config(write_config(dir, j).string()));
  CHECK(exp::read_csv((dir / "out" / "loss.csv").string()).rows.size() == 1);
}

TEST_CASE("plots can be disabled") {
  const auto dir = fresh_dir("run_noplots");
  json j = inline_config_json();
  j["output_dir"] = (dir / "out").string();
  j["plots"] = false;
  exp::run_experiment(exp::load_config(write_config(dir, j).string()));
  CHECK(fs::exists(dir / "out" / "metrics.csv"));
  CHECK_FALSE(fs::exists(dir / "out" / "loss.svg"));
}

TEST_CASE("identical configs produce byte-identical outputs") {
  const auto dir = fresh_dir("run_det");
  for (const char* sub : {"a", "b"}) {
    json j = inline_config_json();
    j["output_dir"] = (dir / sub).string();
    exp::run_experiment(exp::load_config(write_config(dir, j, std::string(sub) + ".json").string()));
  }
  for (const char* f : {"loss.csv", "sources.csv", "states.csv", "transitions.csv",
                        "metrics.csv", "priors.json", "loss.svg", "sources.svg", "states.svg",
                        "transitions.svg"})
    CHECK_MESSAGE(slurp(dir / "a" / f) == slurp(dir / "b" / f), f);
}

TEST_CASE("generate_episode writes a loadable episode") {
  const auto dir = fresh_dir("gen");
  const exp::ExperimentConfig cfg =
      exp::load_config(write_config(dir, inline_config_json()).string());
  const std::string out = (dir / "nested" / "ep.json").string();
  exp::generate_episode(cfg, out);  // creates the intermediate directory
  const auto loaded = synth::load_episode(out);
  CHECK(loaded.T == 60);
  CHECK(loaded.seed == 7);
  CHECK(exp::episode_hash(loaded) == exp::episode_hash(cfg.realize_episode()));
}

TEST_CASE("episode_hash is stable and seed-sensitive") {
  const exp::ExperimentConfig cfg = [] {
    const auto dir = fresh_dir("hash");
    return exp::load_config(write_config(dir, inline_config_json()).string());
  }();
  const auto e1 = cfg.realize_episode();
  const std::string h = exp::episode_hash(e1);
  CHECK(h.size() == 16);
  for (char c : h) CHECK(((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')));
  CHECK(exp::episode_hash(e1) == h);

  exp::ExperimentConfig other = cfg;
  other.episode_seed = 8;
  CHECK(exp::episode_hash(other.realize_episode()) != h);
}

TEST_CASE("divergence leaves a partial loss trace and diagnostics behind") {
  const auto dir = fresh_dir("diverge");
  const exp::ExperimentConfig base =
      exp::load_config(write_config(dir, inline_config_json()).string());
  synth::EpisodeData episode = base.realize_episode();
  for (auto& v : episode.observations.d) v = 1e200;  // reconstruction overflows immediately
  const std::string ep_path = (dir / "bad_episode.json").string();
  synth::save_episode(episode, ep_path);

  json j = inline_config_json(/*epochs=*/3);
  j["episode"] = {{"path", ep_path}};
  j["output_dir"] = (dir / "out").string();
  const exp::ExperimentConfig cfg = exp::load_config(write_config(dir, j, "d.json").string());

  CHECK_THROWS_AS(exp::run_experiment(cfg), TrainingDiverged);
  CHECK(fs::exists(dir / "out" / "loss.csv"));
  REQUIRE(fs::exists(dir / "out" / "diagnostics.json"));
  json diag;
  std::ifstream((dir / "out" / "diagnostics.json")) >> diag;
  CHECK(diag.contains("error"));
  CHECK(diag.at("error").get<std::string>().find("diverged") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out" / "metrics.csv"));
}

TEST_CASE("compare_branches runs all three priors on one shared episode") {
  const auto dir = fresh_dir("compare");
  json j = inline_config_json(/*epochs=*/2);
  j["output_dir"] = (dir / "cmp").string();
  const exp::ExperimentConfig cfg = exp::load_config(write_config(dir, j).string());
  exp::compare_branches(cfg);

  const exp::Csv cmp = exp::read_csv((dir / "cmp" / "comparison.csv").string());
  CHECK(cmp.header == std::vector<std::string>{"branch", "mean_abs_corr",
                                               "mean_state_accuracy", "mean_transition_tv",
                                               "episode_hash"});
  REQUIRE(cmp.rows.size() == 3);
  CHECK(cmp.rows[0][0] == "1");
  CHECK(cmp.rows[1][0] == "2");
  CHECK(cmp.rows[2][0] == "3");
  CHECK(cmp.rows[0][4] == cmp.rows[1][4]);
  CHECK(cmp.rows[1][4] == cmp.rows[2][4]);
  for (int b = 1; b <= 3; ++b) {
    const fs::path sub = dir / "cmp" / ("branch" + std::to_string(b));
    CHECK(fs::exists(sub / "metrics.csv"));
    CHECK(fs::exists(sub / "priors.json"));
  }
}
