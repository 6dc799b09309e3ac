#include "lgf/lgf.h"

#include <cstring>
#include <optional>
#include <string>

#include "lgf/config.hpp"
#include "lgf/harness.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

lgf_status fail(lgf_status code, const std::string& msg) {
  set_error(msg);
  return code;
}

lgf_status copy_out(const std::string& text, char* buf, size_t* len) {
  if (!len) return fail(LGF_ERR_INVALID_ARG, "length pointer is null");
  const size_t needed = text.size() + 1;
  if (!buf || *len < needed) {
    *len = needed;
    return fail(LGF_ERR_INVALID_ARG, "buffer too small (" + std::to_string(needed) + " bytes needed)");
  }
  std::memcpy(buf, text.c_str(), needed);
  *len = needed;
  return LGF_OK;
}

}  // namespace

struct lgf_experiment {
  lgf::ExperimentConfig config;
  std::optional<lgf::ExperimentResult> result;
};

extern "C" {

const char* lgf_version(void) { return "1.0.0"; }

const char* lgf_last_error(void) { return g_last_error.c_str(); }

lgf_status lgf_experiment_create(const char* config_text, lgf_experiment** out) {
  if (!config_text || !out) return fail(LGF_ERR_INVALID_ARG, "null argument");
  *out = nullptr;
  try {
    auto exp = new lgf_experiment{lgf::parse_config(config_text), std::nullopt};
    *out = exp;
    return LGF_OK;
  } catch (const std::exception& e) {
    return fail(LGF_ERR_PARSE, e.what());
  }
}

lgf_status lgf_experiment_create_from_file(const char* path, lgf_experiment** out) {
  if (!path || !out) return fail(LGF_ERR_INVALID_ARG, "null argument");
  *out = nullptr;
  try {
    auto exp = new lgf_experiment{lgf::load_config_file(path), std::nullopt};
    *out = exp;
    return LGF_OK;
  } catch (const std::exception& e) {
    return fail(LGF_ERR_PARSE, e.what());
  }
}

void lgf_experiment_destroy(lgf_experiment* exp) { delete exp; }

lgf_status lgf_experiment_set_seed(lgf_experiment* exp, unsigned long long seed) {
  if (!exp) return fail(LGF_ERR_INVALID_ARG, "null experiment");
  if (exp->result) return fail(LGF_ERR_STATE, "experiment already ran");
  exp->config.seed = seed;
  return LGF_OK;
}

lgf_status lgf_experiment_set_output_dir(lgf_experiment* exp, const char* dir) {
  if (!exp || !dir) return fail(LGF_ERR_INVALID_ARG, "null argument");
  if (exp->result) return fail(LGF_ERR_STATE, "experiment already ran");
  exp->config.output_dir = dir;
  return LGF_OK;
}

lgf_status lgf_experiment_run(lgf_experiment* exp) {
  if (!exp) return fail(LGF_ERR_INVALID_ARG, "null experiment");
  if (exp->result) return fail(LGF_ERR_STATE, "experiment already ran");
  try {
    exp->result = lgf::run_experiment(exp->config);
    return LGF_OK;
  } catch (const lgf::Error& e) {
    return fail(LGF_ERR_RUNTIME, e.what());
  } catch (const std::exception& e) {
    return fail(LGF_ERR_RUNTIME, e.what());
  }
}

lgf_status lgf_experiment_summary(const lgf_experiment* exp, char* buf, size_t* len) {
  if (!exp) return fail(LGF_ERR_INVALID_ARG, "null experiment");
  if (!exp->result) return fail(LGF_ERR_STATE, "experiment has not run");
  return copy_out(exp->result->report_text, buf, len);
}

lgf_status lgf_experiment_final_loss(const lgf_experiment* exp, double* out) {
  if (!exp || !out) return fail(LGF_ERR_INVALID_ARG, "null argument");
  if (!exp->result) return fail(LGF_ERR_STATE, "experiment has not run");
  const auto& losses = exp->result->lgf_report.loss_history;
  if (losses.empty()) return fail(LGF_ERR_STATE, "run recorded no losses");
  *out = losses.back();
  return LGF_OK;
}

lgf_status lgf_experiment_acceleration(const lgf_experiment* exp, double* out) {
  if (!exp || !out) return fail(LGF_ERR_INVALID_ARG, "null argument");
  if (!exp->result) return fail(LGF_ERR_STATE, "experiment has not run");
  *out = exp->result->lgf_report.acceleration_percent;
  return LGF_OK;
}

lgf_status lgf_experiment_gradient_evals(const lgf_experiment* exp, long long* out) {
  if (!exp || !out) return fail(LGF_ERR_INVALID_ARG, "null argument");
  if (!exp->result) return fail(LGF_ERR_STATE, "experiment has not run");
  *out = exp->result->lgf_report.true_gradient_evals;
  return LGF_OK;
}

lgf_status lgf_experiment_baseline_gradient_evals(const lgf_experiment* exp, long long* out) {
  if (!exp || !out) return fail(LGF_ERR_INVALID_ARG, "null argument");
  if (!exp->result) return fail(LGF_ERR_STATE, "experiment has not run");
  if (!exp->result->baseline_report) return fail(LGF_ERR_STATE, "no baseline in this run");
  *out = exp->result->baseline_report->true_gradient_evals;
  return LGF_OK;
}

lgf_status lgf_compare_csv(const char* path_a, const char* path_b, char* buf, size_t* len) {
  if (!path_a || !path_b) return fail(LGF_ERR_INVALID_ARG, "null path");
  try {
    const lgf::ComparisonSummary sum = lgf::compare_runs(path_a, path_b);
    return copy_out(sum.text, buf, len);
  } catch (const lgf::Error& e) {
    return fail(LGF_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(LGF_ERR_IO, e.what());
  }
}

}  // extern "C"
