#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <corrlearn/corrlearn.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string source(const char* rel) { return std::string(CORRLEARN_SOURCE_DIR) + "/" + rel; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

cl_config* quick() {
  cl_config* config = nullptr;
  REQUIRE(cl_config_load(source("configs/quick.json").c_str(), &config) == CL_OK);
  return config;
}

}  // namespace

TEST_CASE("status codes and errors") {
  CHECK(std::strcmp(cl_status_name(CL_OK), "ok") == 0);
  CHECK(std::strcmp(cl_status_name(CL_ERR_BUSY), "busy") == 0);
  CHECK(std::strlen(cl_version()) > 0);

  cl_config* config = nullptr;
  CHECK(cl_config_load("/nonexistent/config.json", &config) == CL_ERR_IO);
  CHECK(config == nullptr);
  CHECK(std::strlen(cl_last_error()) > 0);
  CHECK(cl_config_load(nullptr, &config) == CL_ERR_INVALID_ARGUMENT);
  CHECK(cl_config_parse("{not json", nullptr, &config) == CL_ERR_PARSE);
  CHECK(cl_config_parse(R"({"map": "m.json", "teacher": {"w_star": [0,0,0,0,0,0,0]}, "bogus": 1})",
                        nullptr, &config) == CL_ERR_PARSE);
  CHECK(cl_config_parse(R"({"map": "m.json", "teacher": {"w_star": [0,0,0,0,0,0,0]}, "eta": 0})",
                        nullptr, &config) == CL_ERR_VALIDATION);
  CHECK(cl_run(nullptr, nullptr) == CL_ERR_INVALID_ARGUMENT);

  // A config whose map is missing parses but fails to run.
  REQUIRE(cl_config_parse(R"({"map": "missing.json", "teacher": {"w_star": [0,0,0,0,0,0,0]}})",
                          "/nonexistent", &config) == CL_OK);
  cl_trial_set* set = nullptr;
  CHECK(cl_run(config, &set) == CL_ERR_IO);
  CHECK(set == nullptr);
  cl_config_free(config);

  config = quick();
  CHECK(cl_config_set_trials(config, 0) == CL_ERR_INVALID_ARGUMENT);
  CHECK(cl_config_set_steps(config, 0) == CL_ERR_INVALID_ARGUMENT);
  cl_sweep* sweep = nullptr;
  CHECK(cl_sweep_run(config, "speed", &sweep) == CL_ERR_INVALID_ARGUMENT);
  cl_config_free(config);
  cl_config_free(nullptr);
}

TEST_CASE("runs, metrics and outputs") {
  cl_config* config = quick();
  REQUIRE(cl_config_set_steps(config, 200) == CL_OK);
  REQUIRE(cl_config_set_trials(config, 2) == CL_OK);
  CHECK(cl_config_trials(config) == 2);

  cl_trial_set* a = nullptr;
  cl_trial_set* b = nullptr;
  REQUIRE(cl_run(config, &a) == CL_OK);
  REQUIRE(cl_run(config, &b) == CL_OK);
  REQUIRE(cl_trial_set_count(a) == 2);
  cl_metrics ma, mb;
  REQUIRE(cl_trial_set_metrics(a, 1, &ma) == CL_OK);
  REQUIRE(cl_trial_set_metrics(b, 1, &mb) == CL_OK);
  CHECK(ma.steps == 200);
  CHECK(ma.update_count == ma.total_corrections);
  CHECK(ma.final_weights_digest == mb.final_weights_digest);
  CHECK(cl_trial_set_metrics(a, 2, &ma) == CL_ERR_INVALID_ARGUMENT);

  double w[CL_FEATURE_DIM];
  CHECK(cl_trial_set_weights(a, 0, w) == CL_OK);

  const fs::path dir = fs::temp_directory_path() / "corrlearn_capi";
  fs::remove_all(dir);
  REQUIRE(cl_trial_set_write(a, (dir / "a").c_str()) == CL_OK);
  REQUIRE(cl_trial_set_write(b, (dir / "b").c_str()) == CL_OK);
  for (const char* f : {"trial_0.csv", "trial_1.csv", "weights.json"})
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  CHECK(slurp(dir / "a" / "trial_0.csv")
            .rfind("t,chosen_index,latent_loss,corrected,feedback_kind,pseudo_regret_increment,reset\n", 0) == 0);
  cl_trial_set_free(a);
  cl_trial_set_free(b);

  cl_trial_set* bc = nullptr;
  REQUIRE(cl_bc(config, &bc) == CL_OK);
  REQUIRE(cl_trial_set_count(bc) == 1);
  cl_metrics m;
  REQUIRE(cl_trial_set_metrics(bc, 0, &m) == CL_OK);
  CHECK(m.update_count == 0);
  CHECK(m.total_corrections == 0);
  cl_trial_set_free(bc);

  cl_sweep* sweep = nullptr;
  REQUIRE(cl_sweep_run(config, "sigma", &sweep) == CL_OK);
  REQUIRE(cl_sweep_count(sweep) == 4);
  cl_sweep_row row;
  REQUIRE(cl_sweep_row_get(sweep, 3, &row) == CL_OK);
  CHECK(std::strcmp(row.value, "1") == 0);
  CHECK(row.trials == 2);
  CHECK(row.failed == 0);
  REQUIRE(cl_sweep_write_summary(sweep, (dir / "s" / "summary.csv").c_str()) == CL_OK);
  CHECK(slurp(dir / "s" / "summary.csv").rfind("axis,value,", 0) == 0);
  cl_sweep_free(sweep);

  fs::remove_all(dir);
  cl_config_free(config);
}

TEST_CASE("server lifecycle") {
  cl_config* config = quick();
  cl_server* server = nullptr;
  REQUIRE(cl_server_start(config, 0, &server) == CL_OK);
  const uint16_t port = cl_server_port(server);
  CHECK(port != 0);
  cl_server* clash = nullptr;
  CHECK(cl_server_start(config, port, &clash) == CL_ERR_IO);
  CHECK(clash == nullptr);
  cl_server_stop(server);
  cl_server_stop(server);
  cl_server_free(server);
  cl_config_free(config);
}
