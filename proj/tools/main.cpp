#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include <hmmvae/hmmvae.h>

namespace {

int exit_code(hv_status st) {
  if (st == HV_OK) return 0;
  if (st == HV_ERR_DIVERGED) return 3;
  return 2;
}

int report(hv_status st) {
  if (st != HV_OK)
    std::fprintf(stderr, "error (%s): %s\n", hv_status_name(st), hv_last_error());
  return exit_code(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Switching-prior VAE experiments.\n"
      "Exit codes: 0 success, 2 configuration error, 3 training diverged."};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string episode_out;
  std::uint64_t seed = 0;
  std::uint64_t epochs = 0;
  bool no_plots = false;

  CLI::App* run = app.add_subcommand("run", "train on the configured episode, write outputs");
  run->add_option("config", config_path, "experiment config (JSON)")->required();
  CLI::Option* run_out = run->add_option("--out", out_dir, "override the output directory");
  CLI::Option* run_seed =
      run->add_option("--seed", seed, "override both the episode and training seed");
  CLI::Option* run_epochs = run->add_option("--epochs", epochs, "override the epoch count");
  run->add_flag("--no-plots", no_plots, "skip SVG plot rendering");

  CLI::App* gen = app.add_subcommand("gen", "generate the configured episode as JSON");
  gen->add_option("config", config_path, "experiment config (JSON)")->required();
  gen->add_option("out", episode_out, "destination episode file")->required();
  CLI::Option* gen_seed = gen->add_option("--seed", seed, "override the episode seed");

  CLI::App* compare =
      app.add_subcommand("compare", "run all three prior variants on one episode");
  compare->add_option("config", config_path, "experiment config (JSON)")->required();
  CLI::Option* cmp_out = compare->add_option("--out", out_dir, "override the output directory");
  CLI::Option* cmp_seed =
      compare->add_option("--seed", seed, "override both the episode and training seed");
  CLI::Option* cmp_epochs =
      compare->add_option("--epochs", epochs, "override the epoch count");
  compare->add_flag("--no-plots", no_plots, "skip SVG plot rendering");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the usage error
    return code == 0 ? 0 : 2;
  }

  hv_status st = HV_OK;
  hv_config* cfg = hv_config_open(config_path.c_str(), &st);
  if (cfg == nullptr) return report(st);

  do {
    const bool seed_given = run_seed->count() || gen_seed->count() || cmp_seed->count();
    if (seed_given && (st = hv_config_set_seed(cfg, seed)) != HV_OK) break;
    if ((run_epochs->count() || cmp_epochs->count()) &&
        (st = hv_config_set_epochs(cfg, epochs)) != HV_OK)
      break;
    if ((run_out->count() || cmp_out->count()) &&
        (st = hv_config_set_output_dir(cfg, out_dir.c_str())) != HV_OK)
      break;
    if (no_plots && (st = hv_config_set_plots(cfg, 0)) != HV_OK) break;

    if (run->parsed()) {
      st = hv_run_experiment(cfg);
    } else if (gen->parsed()) {
      st = hv_generate_episode(cfg, episode_out.c_str());
    } else {
      st = hv_compare_branches(cfg);
    }
  } while (false);

  const int rc = report(st);
  hv_config_close(cfg);
  return rc;
}
