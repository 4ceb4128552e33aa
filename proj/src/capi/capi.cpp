#include "hmmvae/hmmvae.h"

#include <new>
#include <stdexcept>
#include <string>

#include "common/errors.hpp"
#include "exp/config.hpp"
#include "exp/runner.hpp"

struct hv_config {
  hmmvae::exp::ExperimentConfig cfg;
};

namespace {

thread_local std::string g_last_error;

void clear_error() { g_last_error.clear(); }

hv_status fail(hv_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

// runs f(), translating exceptions into status codes + the thread-local message
template <typename F>
hv_status guarded(F&& f) {
  try {
    f();
    clear_error();
    return HV_OK;
  } catch (const hmmvae::TrainingDiverged& ex) {
    return fail(HV_ERR_DIVERGED, ex.what());
  } catch (const hmmvae::ConfigError& ex) {
    return fail(HV_ERR_CONFIG, ex.what());
  } catch (const hmmvae::IoError& ex) {
    return fail(HV_ERR_IO, ex.what());
  } catch (const std::invalid_argument& ex) {
    return fail(HV_ERR_CONFIG, ex.what());
  } catch (const std::bad_alloc&) {
    return fail(HV_ERR_INVALID, "out of memory");
  } catch (const std::exception& ex) {
    return fail(HV_ERR_INVALID, ex.what());
  } catch (...) {
    return fail(HV_ERR_INVALID, "unknown error");
  }
}

hv_status require_handle(const hv_config* config) {
  if (config == nullptr) return fail(HV_ERR_INVALID, "null configuration handle");
  return HV_OK;
}

}  // namespace

extern "C" {

hv_config* hv_config_open(const char* path, hv_status* status) {
  hv_config* handle = nullptr;
  hv_status st;
  if (path == nullptr) {
    st = fail(HV_ERR_INVALID, "null config path");
  } else {
    st = guarded([&] { handle = new hv_config{hmmvae::exp::load_config(path)}; });
  }
  if (status != nullptr) *status = st;
  return handle;
}

void hv_config_close(hv_config* config) { delete config; }

hv_status hv_config_set_seed(hv_config* config, uint64_t seed) {
  if (hv_status st = require_handle(config); st != HV_OK) return st;
  config->cfg.episode_seed = seed;
  config->cfg.train.seed = seed;
  clear_error();
  return HV_OK;
}

hv_status hv_config_set_epochs(hv_config* config, uint64_t epochs) {
  if (hv_status st = require_handle(config); st != HV_OK) return st;
  if (epochs == 0) return fail(HV_ERR_CONFIG, "epochs must be at least 1");
  config->cfg.train.epochs = static_cast<std::size_t>(epochs);
  clear_error();
  return HV_OK;
}

hv_status hv_config_set_output_dir(hv_config* config, const char* dir) {
  if (hv_status st = require_handle(config); st != HV_OK) return st;
  if (dir == nullptr || *dir == '\0')
    return fail(HV_ERR_CONFIG, "output directory must not be empty");
  config->cfg.output_dir = dir;
  clear_error();
  return HV_OK;
}

hv_status hv_config_set_plots(hv_config* config, int enabled) {
  if (hv_status st = require_handle(config); st != HV_OK) return st;
  config->cfg.plots = enabled != 0;
  clear_error();
  return HV_OK;
}

hv_status hv_run_experiment(hv_config* config) {
  if (hv_status st = require_handle(config); st != HV_OK) return st;
  return guarded([&] { hmmvae::exp::run_experiment(config->cfg); });
}

hv_status hv_generate_episode(hv_config* config, const char* out_path) {
  if (hv_status st = require_handle(config); st != HV_OK) return st;
  if (out_path == nullptr || *out_path == '\0')
    return fail(HV_ERR_CONFIG, "output path must not be empty");
  return guarded([&] { hmmvae::exp::generate_episode(config->cfg, out_path); });
}

hv_status hv_compare_branches(hv_config* config) {
  if (hv_status st = require_handle(config); st != HV_OK) return st;
  return guarded([&] { hmmvae::exp::compare_branches(config->cfg); });
}

const char* hv_last_error(void) { return g_last_error.c_str(); }

const char* hv_status_name(hv_status status) {
  switch (status) {
    case HV_OK:
      return "ok";
    case HV_ERR_CONFIG:
      return "config-error";
    case HV_ERR_DIVERGED:
      return "diverged";
    case HV_ERR_IO:
      return "io-error";
    case HV_ERR_INVALID:
      return "invalid";
  }
  return "unknown";
}

}  // extern "C"
