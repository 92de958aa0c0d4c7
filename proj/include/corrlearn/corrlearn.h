#ifndef CORRLEARN_CORRLEARN_H
#define CORRLEARN_CORRLEARN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define CL_API __declspec(dllexport)
#else
#define CL_API __attribute__((visibility("default")))
#endif

typedef enum cl_status {
  CL_OK = 0,
  CL_ERR_INVALID_ARGUMENT = 1,
  CL_ERR_PARSE = 2,
  CL_ERR_VALIDATION = 3,
  CL_ERR_IO = 4,
  CL_ERR_BUSY = 5,
  CL_ERR_PROTOCOL = 6,
  CL_ERR_INTERNAL = 7
} cl_status;

typedef struct cl_config cl_config;
typedef struct cl_trial_set cl_trial_set;
typedef struct cl_sweep cl_sweep;
typedef struct cl_server cl_server;

typedef struct cl_metrics {
  size_t steps;
  size_t total_corrections;
  size_t update_count;
  size_t resets;
  double final_smoothed_loss;
  double regret_total;
  double regret_ratio;
  uint64_t final_weights_digest;
} cl_metrics;

typedef struct cl_sweep_row {
  const char* value; /* owned by the sweep handle */
  size_t trials;
  size_t failed;
  double final_loss_mean;
  double final_loss_std;
  double corrections_mean;
  double corrections_std;
  double regret_ratio_mean;
} cl_sweep_row;

#define CL_FEATURE_DIM 7

CL_API const char* cl_version(void);
CL_API const char* cl_status_name(cl_status status);
/* Message for the most recent failure on the calling thread. */
CL_API const char* cl_last_error(void);

CL_API cl_status cl_config_load(const char* path, cl_config** out);
/* base_dir resolves a relative map path; may be NULL. */
CL_API cl_status cl_config_parse(const char* json, const char* base_dir, cl_config** out);
CL_API void cl_config_free(cl_config* config);
CL_API cl_status cl_config_set_seed(cl_config* config, uint64_t seed);
CL_API cl_status cl_config_set_output(cl_config* config, const char* dir);
CL_API cl_status cl_config_set_trials(cl_config* config, size_t trials);
CL_API cl_status cl_config_set_steps(cl_config* config, size_t steps);
/* The output directory, valid until the config is modified or freed. */
CL_API const char* cl_config_output(const cl_config* config);
CL_API size_t cl_config_trials(const cl_config* config);

/* Runs config.trials trials with seeds seed + i. */
CL_API cl_status cl_run(const cl_config* config, cl_trial_set** out);
/* Fits behavior cloning on teacher demonstrations and evaluates it frozen;
   the set holds one trial. */
CL_API cl_status cl_bc(const cl_config* config, cl_trial_set** out);
CL_API void cl_trial_set_free(cl_trial_set* set);
CL_API size_t cl_trial_set_count(const cl_trial_set* set);
CL_API cl_status cl_trial_set_metrics(const cl_trial_set* set, size_t index, cl_metrics* out);
/* Copies CL_FEATURE_DIM weights. */
CL_API cl_status cl_trial_set_weights(const cl_trial_set* set, size_t index, double* out);
/* trial_<i>.csv, trial_<i>_weights.json and weights.json; creates dir. */
CL_API cl_status cl_trial_set_write(const cl_trial_set* set, const char* dir);

/* axis: "channel", "sigma" or "threshold". */
CL_API cl_status cl_sweep_run(const cl_config* config, const char* axis, cl_sweep** out);
CL_API void cl_sweep_free(cl_sweep* sweep);
CL_API size_t cl_sweep_count(const cl_sweep* sweep);
CL_API cl_status cl_sweep_row_get(const cl_sweep* sweep, size_t index, cl_sweep_row* out);
CL_API cl_status cl_sweep_write_summary(const cl_sweep* sweep, const char* path);

/* Teaching server on 127.0.0.1; port 0 picks a free port. */
CL_API cl_status cl_server_start(const cl_config* config, uint16_t port, cl_server** out);
CL_API uint16_t cl_server_port(const cl_server* server);
CL_API void cl_server_stop(cl_server* server);
CL_API void cl_server_free(cl_server* server);

#ifdef __cplusplus
}
#endif

#endif
