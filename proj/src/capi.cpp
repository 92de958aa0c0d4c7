#include <corrlearn/corrlearn.h>

#include <exception>
#include <fstream>
#include <new>
#include <string>
#include <vector>

#include "error.hpp"
#include "experiment.hpp"
#include "ws_server.hpp"

using namespace corrlearn;

struct cl_config {
  ExperimentConfig config;
};

struct cl_trial_set {
  std::vector<TrialLog> logs;
  std::size_t window = 100;
};

struct cl_sweep {
  std::vector<SweepRow> rows;
};

struct cl_server {
  std::unique_ptr<WebSocketServer> server;
};

namespace {

thread_local std::string g_last_error;

cl_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return CL_ERR_INVALID_ARGUMENT;
    case ErrorKind::kParse: return CL_ERR_PARSE;
    case ErrorKind::kValidation: return CL_ERR_VALIDATION;
    case ErrorKind::kIo: return CL_ERR_IO;
    case ErrorKind::kBusy: return CL_ERR_BUSY;
    case ErrorKind::kProtocol: return CL_ERR_PROTOCOL;
  }
  return CL_ERR_INTERNAL;
}

template <class Fn>
cl_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return CL_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return CL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CL_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return CL_ERR_INTERNAL;
  }
}

cl_status null_argument(const char* name) {
  g_last_error = std::string(name) + " must not be NULL";
  return CL_ERR_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* cl_version(void) { return "1.0.0"; }

const char* cl_status_name(cl_status status) {
  switch (status) {
    case CL_OK: return "ok";
    case CL_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case CL_ERR_PARSE: return "parse";
    case CL_ERR_VALIDATION: return "validation";
    case CL_ERR_IO: return "io";
    case CL_ERR_BUSY: return "busy";
    case CL_ERR_PROTOCOL: return "protocol";
    case CL_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* cl_last_error(void) { return g_last_error.c_str(); }

cl_status cl_config_load(const char* path, cl_config** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new cl_config{load_config(path)}; });
}

cl_status cl_config_parse(const char* json, const char* base_dir, cl_config** out) {
  if (!json) return null_argument("json");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(json);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::kParse, std::string("config: ") + e.what());
    }
    *out = new cl_config{parse_config(doc, base_dir ? base_dir : "")};
  });
}

void cl_config_free(cl_config* config) { delete config; }

cl_status cl_config_set_seed(cl_config* config, uint64_t seed) {
  if (!config) return null_argument("config");
  config->config.seed = seed;
  return CL_OK;
}

cl_status cl_config_set_output(cl_config* config, const char* dir) {
  if (!config) return null_argument("config");
  if (!dir) return null_argument("dir");
  return guarded([&] { config->config.output_dir = dir; });
}

cl_status cl_config_set_trials(cl_config* config, size_t trials) {
  if (!config) return null_argument("config");
  if (trials == 0) {
    g_last_error = "trials must be >= 1";
    return CL_ERR_INVALID_ARGUMENT;
  }
  config->config.trials = trials;
  return CL_OK;
}

cl_status cl_config_set_steps(cl_config* config, size_t steps) {
  if (!config) return null_argument("config");
  if (steps == 0) {
    g_last_error = "steps must be >= 1";
    return CL_ERR_INVALID_ARGUMENT;
  }
  config->config.steps = steps;
  return CL_OK;
}

const char* cl_config_output(const cl_config* config) {
  return config ? config->config.output_dir.c_str() : nullptr;
}

size_t cl_config_trials(const cl_config* config) { return config ? config->config.trials : 0; }

cl_status cl_run(const cl_config* config, cl_trial_set** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    *out = new cl_trial_set{run_trials(config->config), config->config.window};
  });
}

cl_status cl_bc(const cl_config* config, cl_trial_set** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    BcBaseline bc = run_bc_baseline(config->config);
    auto* set = new cl_trial_set{{}, config->config.window};
    set->logs.push_back(std::move(bc.log));
    *out = set;
  });
}

void cl_trial_set_free(cl_trial_set* set) { delete set; }

size_t cl_trial_set_count(const cl_trial_set* set) { return set ? set->logs.size() : 0; }

cl_status cl_trial_set_metrics(const cl_trial_set* set, size_t index, cl_metrics* out) {
  if (!set) return null_argument("set");
  if (!out) return null_argument("out");
  return guarded([&] {
    require(index < set->logs.size(), "trial index out of range");
    const TrialLog& log = set->logs[index];
    const Metrics m = compute_metrics(log, set->window);
    out->steps = log.steps.size();
    out->total_corrections = m.total_corrections;
    out->update_count = log.update_count;
    out->resets = 0;
    for (const StepRecord& r : log.steps) out->resets += r.reset ? 1 : 0;
    out->final_smoothed_loss = m.final_smoothed_loss;
    out->regret_total = m.regret_total;
    out->regret_ratio = m.regret_ratio;
    out->final_weights_digest = weights_digest(log.final_weights);
  });
}

cl_status cl_trial_set_weights(const cl_trial_set* set, size_t index, double* out) {
  if (!set) return null_argument("set");
  if (!out) return null_argument("out");
  return guarded([&] {
    require(index < set->logs.size(), "trial index out of range");
    const auto& w = set->logs[index].final_weights.values;
    std::copy(w.begin(), w.end(), out);
  });
}

cl_status cl_trial_set_write(const cl_trial_set* set, const char* dir) {
  if (!set) return null_argument("set");
  if (!dir) return null_argument("dir");
  return guarded([&] { write_trial_outputs(dir, set->logs); });
}

cl_status cl_sweep_run(const cl_config* config, const char* axis, cl_sweep** out) {
  if (!config) return null_argument("config");
  if (!axis) return null_argument("axis");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    const SweepAxis parsed = parse_axis(axis);
    *out = new cl_sweep{run_sweep(config->config, parsed)};
  });
}

void cl_sweep_free(cl_sweep* sweep) { delete sweep; }

size_t cl_sweep_count(const cl_sweep* sweep) { return sweep ? sweep->rows.size() : 0; }

cl_status cl_sweep_row_get(const cl_sweep* sweep, size_t index, cl_sweep_row* out) {
  if (!sweep) return null_argument("sweep");
  if (!out) return null_argument("out");
  return guarded([&] {
    require(index < sweep->rows.size(), "sweep row out of range");
    const SweepRow& r = sweep->rows[index];
    out->value = r.value.c_str();
    out->trials = r.trials;
    out->failed = r.failed;
    out->final_loss_mean = r.final_loss_mean;
    out->final_loss_std = r.final_loss_std;
    out->corrections_mean = r.corrections_mean;
    out->corrections_std = r.corrections_std;
    out->regret_ratio_mean = r.regret_ratio_mean;
  });
}

cl_status cl_sweep_write_summary(const cl_sweep* sweep, const char* path) {
  if (!sweep) return null_argument("sweep");
  if (!path) return null_argument("path");
  return guarded([&] {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
      std::error_code ec;
      std::filesystem::create_directories(p.parent_path(), ec);
      if (ec) throw Error(ErrorKind::kIo, "cannot create " + p.parent_path().string());
    }
    std::ofstream file(p, std::ios::binary);
    if (!file) throw Error(ErrorKind::kIo, "cannot write " + p.string());
    write_summary_csv(file, sweep->rows);
    if (!file.flush()) throw Error(ErrorKind::kIo, "write failed: " + p.string());
  });
}

cl_status cl_server_start(const cl_config* config, uint16_t port, cl_server** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto server = std::make_unique<WebSocketServer>(config->config, port);
    server->start();
    *out = new cl_server{std::move(server)};
  });
}

uint16_t cl_server_port(const cl_server* server) {
  return server && server->server ? server->server->port() : 0;
}

void cl_server_stop(cl_server* server) {
  if (server && server->server) server->server->stop();
}

void cl_server_free(cl_server* server) { delete server; }

}  // extern "C"
