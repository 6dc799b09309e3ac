// Command-line harness. Talks to the core exclusively through the C API.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lgf/lgf.h"

namespace {

int run_command(const std::string& config_path, const std::string& out_dir, bool have_seed,
                unsigned long long seed) {
  lgf_experiment* exp = nullptr;
  if (lgf_experiment_create_from_file(config_path.c_str(), &exp) != LGF_OK) {
    std::fprintf(stderr, "error: %s\n", lgf_last_error());
    return 1;
  }
  if (!out_dir.empty() && lgf_experiment_set_output_dir(exp, out_dir.c_str()) != LGF_OK) {
    std::fprintf(stderr, "error: %s\n", lgf_last_error());
    lgf_experiment_destroy(exp);
    return 1;
  }
  if (have_seed && lgf_experiment_set_seed(exp, seed) != LGF_OK) {
    std::fprintf(stderr, "error: %s\n", lgf_last_error());
    lgf_experiment_destroy(exp);
    return 1;
  }
  if (lgf_experiment_run(exp) != LGF_OK) {
    std::fprintf(stderr, "error: %s\n", lgf_last_error());
    lgf_experiment_destroy(exp);
    return 1;
  }

  size_t len = 0;
  lgf_experiment_summary(exp, nullptr, &len);  // query the needed size
  std::vector<char> buf(len);
  if (lgf_experiment_summary(exp, buf.data(), &len) == LGF_OK) {
    std::fputs(buf.data(), stdout);
  }
  lgf_experiment_destroy(exp);
  return 0;
}

int compare_command(const std::string& a, const std::string& b) {
  size_t len = 0;
  lgf_compare_csv(a.c_str(), b.c_str(), nullptr, &len);
  if (len == 0) {
    std::fprintf(stderr, "error: %s\n", lgf_last_error());
    return 1;
  }
  std::vector<char> buf(len);
  if (lgf_compare_csv(a.c_str(), b.c_str(), buf.data(), &len) != LGF_OK) {
    std::fprintf(stderr, "error: %s\n", lgf_last_error());
    return 1;
  }
  std::fputs(buf.data(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"learned gradient flow optimizer harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  unsigned long long seed = 0;
  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("--config", config_path, "experiment config file")->required();
  run->add_option("--out", out_dir, "output directory (overrides output.dir)");
  auto* seed_opt = run->add_option("--seed", seed, "seed override (overrides run.seed)");

  std::string csv_a, csv_b;
  auto* cmp = app.add_subcommand("compare", "compare two run CSVs");
  cmp->add_option("a", csv_a, "first run csv")->required();
  cmp->add_option("b", csv_b, "second run csv")->required();

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand(run)) {
    return run_command(config_path, out_dir, seed_opt->count() > 0, seed);
  }
  return compare_command(csv_a, csv_b);
}
