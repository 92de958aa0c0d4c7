#include <corrlearn/corrlearn.h>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

namespace {

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

int exit_code(cl_status status) {
  switch (status) {
    case CL_OK: return 0;
    case CL_ERR_INVALID_ARGUMENT:
    case CL_ERR_PARSE:
    case CL_ERR_VALIDATION: return 2;
    case CL_ERR_IO: return 3;
    default: return 1;
  }
}

int fail(cl_status status, const char* what) {
  std::fprintf(stderr, "corrlearn: %s: %s (%s)\n", what, cl_last_error(), cl_status_name(status));
  return exit_code(status);
}

struct Config {
  cl_config* handle = nullptr;
  ~Config() { cl_config_free(handle); }
};

struct TrialSet {
  cl_trial_set* handle = nullptr;
  ~TrialSet() { cl_trial_set_free(handle); }
};

int print_trials(const cl_trial_set* set) {
  std::printf("trial,corrections,updates,final_smoothed_loss,regret,regret_ratio\n");
  for (size_t i = 0; i < cl_trial_set_count(set); ++i) {
    cl_metrics m;
    if (cl_status s = cl_trial_set_metrics(set, i, &m); s != CL_OK) return fail(s, "metrics");
    std::printf("%zu,%zu,%zu,%.6g,%.6g,%.6g\n", i, m.total_corrections, m.update_count,
                m.final_smoothed_loss, m.regret_total, m.regret_ratio);
  }
  return 0;
}

int load(const std::string& path, const std::optional<std::string>& out, Config& config) {
  if (cl_status s = cl_config_load(path.c_str(), &config.handle); s != CL_OK)
    return fail(s, "config");
  if (out) {
    if (cl_status s = cl_config_set_output(config.handle, out->c_str()); s != CL_OK)
      return fail(s, "config");
  }
  return 0;
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed,
            const std::optional<std::string>& out) {
  Config config;
  if (int rc = load(path, out, config)) return rc;
  if (seed) cl_config_set_seed(config.handle, *seed);
  TrialSet set;
  if (cl_status s = cl_run(config.handle, &set.handle); s != CL_OK) return fail(s, "run");
  const std::string dir = cl_config_output(config.handle);
  if (cl_status s = cl_trial_set_write(set.handle, dir.c_str()); s != CL_OK)
    return fail(s, "write");
  std::fprintf(stderr, "wrote %zu trials to %s\n", cl_trial_set_count(set.handle), dir.c_str());
  return print_trials(set.handle);
}

int cmd_bc(const std::string& path, const std::optional<std::string>& out) {
  Config config;
  if (int rc = load(path, out, config)) return rc;
  TrialSet set;
  if (cl_status s = cl_bc(config.handle, &set.handle); s != CL_OK) return fail(s, "bc");
  const std::string dir = cl_config_output(config.handle);
  if (cl_status s = cl_trial_set_write(set.handle, dir.c_str()); s != CL_OK)
    return fail(s, "write");
  std::fprintf(stderr, "wrote behavior cloning trial to %s\n", dir.c_str());
  return print_trials(set.handle);
}

int cmd_sweep(const std::string& path, const std::string& axis,
              const std::optional<std::string>& out) {
  Config config;
  if (int rc = load(path, out, config)) return rc;
  cl_sweep* sweep = nullptr;
  if (cl_status s = cl_sweep_run(config.handle, axis.c_str(), &sweep); s != CL_OK)
    return fail(s, "sweep");
  const std::string summary =
      (std::filesystem::path(cl_config_output(config.handle)) / "summary.csv").string();
  cl_status s = cl_sweep_write_summary(sweep, summary.c_str());
  if (s == CL_OK) {
    std::printf("%s,trials,failed,final_loss_mean,corrections_mean,regret_ratio_mean\n",
                axis.c_str());
    for (size_t i = 0; i < cl_sweep_count(sweep); ++i) {
      cl_sweep_row row;
      cl_sweep_row_get(sweep, i, &row);
      std::printf("%s,%zu,%zu,%.6g,%.6g,%.6g\n", row.value, row.trials, row.failed,
                  row.final_loss_mean, row.corrections_mean, row.regret_ratio_mean);
    }
    std::fprintf(stderr, "wrote %s\n", summary.c_str());
  }
  cl_sweep_free(sweep);
  return s == CL_OK ? 0 : fail(s, "write");
}

int cmd_serve(const std::string& path, std::uint16_t port) {
  Config config;
  if (int rc = load(path, std::nullopt, config)) return rc;
  cl_server* server = nullptr;
  if (cl_status s = cl_server_start(config.handle, port, &server); s != CL_OK)
    return fail(s, "serve");
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::fprintf(stderr, "listening on ws://127.0.0.1:%u\n", cl_server_port(server));
  while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  cl_server_stop(server);
  cl_server_free(server);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online learning from corrective feedback"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::string axis;
  std::uint16_t port = 0;

  auto* run = app.add_subcommand("run", "Run learning trials");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--seed", seed, "Base seed; trial i uses seed + i");
  run->add_option("--out", out, "Output directory");

  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter and write summary.csv");
  sweep->add_option("--axis", axis, "Parameter to sweep")
      ->required()
      ->check(CLI::IsMember({"channel", "sigma", "threshold"}));
  sweep->add_option("--config", config_path, "Experiment config (JSON)")->required();
  sweep->add_option("--out", out, "Output directory");

  auto* bc = app.add_subcommand("bc", "Behavior cloning baseline");
  bc->add_option("--config", config_path, "Experiment config (JSON)")->required();
  bc->add_option("--out", out, "Output directory");

  auto* serve = app.add_subcommand("serve", "Serve interactive teaching sessions");
  serve->add_option("--config", config_path, "Experiment config (JSON)")->required();
  serve->add_option("--port", port, "TCP port (0 picks one)")->required();

  CLI11_PARSE(app, argc, argv);

  if (*run) return cmd_run(config_path, seed, out);
  if (*sweep) return cmd_sweep(config_path, axis, out);
  if (*bc) return cmd_bc(config_path, out);
  return cmd_serve(config_path, port);
}
