#include "lgf/harness.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace lgf {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

const char* phase_name(Phase p) { return p == Phase::True ? "true" : "surrogate"; }

}  // namespace

std::string run_to_csv(const RunReport& report, double eta, bool full) {
  const Index n = report.trajectory.cols();
  const Index d = full ? n : std::min<Index>(n, 16);

  std::ostringstream out;
  out << "epoch,t,phase,loss,grad_evals";
  for (Index j = 0; j < d; ++j) out << ",a_" << j;
  out << "\n";

  for (std::size_t i = 0; i < report.logged_epochs.size(); ++i) {
    const long epoch = report.logged_epochs[i];
    // Epoch 0 is the initial state; it predates any step, so it counts as a
    // true-phase row with zero gradient evaluations.
    const Phase phase =
        epoch == 0 ? Phase::True : report.phase_history[static_cast<std::size_t>(epoch - 1)];
    out << epoch << ',' << fmt17(eta * static_cast<double>(epoch)) << ',' << phase_name(phase)
        << ',' << fmt17(report.loss_history[i]) << ',' << report.grad_eval_history[i];
    for (Index j = 0; j < d; ++j) out << ',' << fmt17(report.trajectory(static_cast<Index>(i), j));
    out << "\n";
  }
  return out.str();
}

CsvRun parse_run_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error("csv: empty file");
  if (line.rfind("epoch,t,phase,loss,grad_evals", 0) != 0) {
    throw Error("csv: unexpected header '" + line + "'");
  }
  Index n_state = 0;
  {
    std::istringstream header(line);
    std::string col;
    int idx = 0;
    while (std::getline(header, col, ',')) {
      if (idx >= 5) {
        if (col.rfind("a_", 0) != 0) throw Error("csv: unexpected column '" + col + "'");
        ++n_state;
      }
      ++idx;
    }
  }

  CsvRun run;
  std::vector<std::vector<double>> states;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string tok;
    std::vector<std::string> cells;
    while (std::getline(row, tok, ',')) cells.push_back(tok);
    if (static_cast<Index>(cells.size()) != 5 + n_state) {
      throw Error("csv line " + std::to_string(lineno) + ": expected " +
                  std::to_string(5 + n_state) + " columns");
    }
    try {
      run.epochs.push_back(std::stol(cells[0]));
      run.times.push_back(std::stod(cells[1]));
      run.phases.push_back(cells[2]);
      run.losses.push_back(std::stod(cells[3]));
      run.grad_evals.push_back(std::stol(cells[4]));
      std::vector<double> state(static_cast<std::size_t>(n_state));
      for (Index j = 0; j < n_state; ++j) state[static_cast<std::size_t>(j)] = std::stod(cells[5 + j]);
      states.push_back(std::move(state));
    } catch (const std::exception&) {
      throw Error("csv line " + std::to_string(lineno) + ": malformed value");
    }
    if (run.phases.back() != "true" && run.phases.back() != "surrogate") {
      throw Error("csv line " + std::to_string(lineno) + ": bad phase '" + run.phases.back() + "'");
    }
  }
  run.states.resize(static_cast<Index>(states.size()), n_state);
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (Index j = 0; j < n_state; ++j) run.states(static_cast<Index>(i), j) = states[i][static_cast<std::size_t>(j)];
  }
  return run;
}

ComparisonSummary compare_runs(const std::string& csv_path_a, const std::string& csv_path_b) {
  auto read = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_csv(buf.str());
  };
  const CsvRun a = read(csv_path_a);
  const CsvRun b = read(csv_path_b);
  if (a.states.cols() != b.states.cols()) {
    throw Error("compare: runs have different state column counts");
  }
  if (a.epochs.empty() || b.epochs.empty()) throw Error("compare: empty run");

  ComparisonSummary sum;
  sum.common_rows = std::min(a.epochs.size(), b.epochs.size());
  sum.truncated = a.epochs.size() != b.epochs.size();

  std::ostringstream out;
  out << "compare: " << csv_path_a << " vs " << csv_path_b << "\n";
  if (sum.truncated) {
    out << "warning: epoch counts differ (" << a.epochs.size() << " vs " << b.epochs.size()
        << "); comparing the common prefix of " << sum.common_rows << " rows\n";
  }

  out << "epoch  loss_a  loss_b  ratio\n";
  sum.loss_ratio.reserve(sum.common_rows);
  for (std::size_t i = 0; i < sum.common_rows; ++i) {
    const double ratio = a.losses[i] / b.losses[i];
    sum.loss_ratio.push_back(ratio);
    out << a.epochs[i] << "  " << fmt17(a.losses[i]) << "  " << fmt17(b.losses[i]) << "  "
        << fmt17(ratio) << "\n";
  }

  const std::size_t last = sum.common_rows - 1;
  const Vector ta = a.states.row(static_cast<Index>(last)).transpose();
  const Vector tb = b.states.row(static_cast<Index>(last)).transpose();
  const double denom = ta.squaredNorm();
  sum.terminal_state_diff = denom > 0.0 ? (ta - tb).squaredNorm() / denom : (ta - tb).squaredNorm();
  sum.final_loss_a = a.losses[last];
  sum.final_loss_b = b.losses[last];
  sum.grad_evals_a = a.grad_evals[last];
  sum.grad_evals_b = b.grad_evals[last];

  out << "terminal-state normalized difference ||a_A - a_B||^2 / ||a_A||^2 = "
      << fmt17(sum.terminal_state_diff) << "\n";
  out << "final loss: A = " << fmt17(sum.final_loss_a) << ", B = " << fmt17(sum.final_loss_b)
      << "\n";
  out << "true gradient evals: A = " << sum.grad_evals_a << ", B = " << sum.grad_evals_b;
  if (sum.grad_evals_b > 0) {
    out << " (A uses " << fmt17(100.0 * (1.0 - static_cast<double>(sum.grad_evals_a) /
                                                   static_cast<double>(sum.grad_evals_b)))
        << "% fewer)";
  }
  out << "\n";
  sum.text = out.str();
  return sum;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;

  if (const char* threads = std::getenv("LGF_THREADS")) {
    const int n = std::atoi(threads);
    if (n > 0) Eigen::setNbThreads(n);
  }

  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw Error("cannot create output directory '" + cfg.output_dir + "': " + ec.message());

  ExperimentResult result;
  result.output_dir = cfg.output_dir;

  // Provenance first: the effective config describes exactly this run.
  write_file(fs::path(cfg.output_dir) / "effective.cfg", echo_config(cfg));

  ProblemSetup lgf_setup = make_problem(cfg.problem, cfg.seed);
  cfg.lgf.validate_for_dim(lgf_setup.objective->dim());

  // A failing run still flushes whatever was logged, for post-mortems.
  auto flush_partial = [&](Error& e, const char* name) {
    if (e.partial_report()) {
      write_file(fs::path(cfg.output_dir) / name, run_to_csv(*e.partial_report(), cfg.lgf.eta));
    }
  };

  try {
    result.lgf_report = run_lgf(*lgf_setup.objective, lgf_setup.initial_state, cfg.lgf);
  } catch (Error& e) {
    flush_partial(e, "lgf_partial.csv");
    throw;
  }
  write_file(fs::path(cfg.output_dir) / "lgf.csv", run_to_csv(result.lgf_report, cfg.lgf.eta));
  if (cfg.output.full_state) {
    write_file(fs::path(cfg.output_dir) / "lgf_full.csv",
               run_to_csv(result.lgf_report, cfg.lgf.eta, true));
  }

  if (cfg.baseline) {
    // Independent problem instance: stochastic draws must not interleave.
    ProblemSetup base_setup = make_problem(cfg.problem, cfg.seed);
    try {
      result.baseline_report =
          run_baseline(*base_setup.objective, base_setup.initial_state, cfg.lgf);
    } catch (Error& e) {
      flush_partial(e, "baseline_partial.csv");
      throw;
    }
    write_file(fs::path(cfg.output_dir) / "baseline.csv",
               run_to_csv(*result.baseline_report, cfg.lgf.eta));
    if (cfg.output.full_state) {
      write_file(fs::path(cfg.output_dir) / "baseline_full.csv",
                 run_to_csv(*result.baseline_report, cfg.lgf.eta, true));
    }
  }

  std::ostringstream rep;
  const RunReport& lr = result.lgf_report;
  rep << "learned gradient flow experiment\n";
  rep << "problem: " << cfg.problem.kind << " (n = " << lgf_setup.objective->dim() << ")\n";
  rep << "mode = " << (cfg.lgf.mode == OptMode::GradientDescent
                           ? "gd"
                           : cfg.lgf.mode == OptMode::Newton ? "newton" : "adam")
      << ", eta = " << fmt17(cfg.lgf.eta) << ", K = " << cfg.lgf.history_size
      << ", M = " << cfg.lgf.retrain_interval << ", P = " << cfg.lgf.poly_order;
  if (cfg.lgf.truncation_rank) rep << ", r = " << *cfg.lgf.truncation_rank;
  rep << ", epochs = " << cfg.lgf.epochs << "\n";
  rep << "acceleration = " << fmt17(lr.acceleration_percent) << "%\n\n";

  const double lgf_loss = lgf_setup.objective->value(lr.terminal_state);
  rep << "lgf:      final loss = " << fmt17(lgf_loss)
      << ", true gradient evals = " << lr.true_gradient_evals;
  if (cfg.lgf.mode == OptMode::Newton) rep << ", hessian solves = " << lr.true_hessian_solves;
  rep << "\n";

  if (result.baseline_report) {
    const RunReport& br = *result.baseline_report;
    const double base_loss = lgf_setup.objective->value(br.terminal_state);
    rep << "baseline: final loss = " << fmt17(base_loss)
        << ", true gradient evals = " << br.true_gradient_evals << "\n";
    const double denom = br.terminal_state.squaredNorm();
    const double diff = (lr.terminal_state - br.terminal_state).squaredNorm();
    rep << "terminal-state normalized difference ||a_lgf - a_base||^2 / ||a_base||^2 = "
        << fmt17(denom > 0.0 ? diff / denom : diff) << "\n";
  }

  if (cfg.problem.kind == "heat_inverse") {
    rep << "\nrecovered parameters:\n";
    rep << "  index    recovered              true\n";
    const Vector truth = [&] {
      Vector t(2);
      std::stringstream ss(cfg.problem.params.at("a_true"));
      std::string tok;
      Index i = 0;
      while (std::getline(ss, tok, ',') && i < 2) t[i++] = std::stod(tok);
      return t;
    }();
    for (Index i = 0; i < lr.terminal_state.size(); ++i) {
      rep << "  a_" << i << "      " << fmt17(lr.terminal_state[i]) << "   " << fmt17(truth[i])
          << "\n";
    }
  }

  if (!lr.warnings.empty()) {
    rep << "\nwarnings:\n";
    for (const auto& w : lr.warnings) rep << "  " << w << "\n";
  }

  result.report_text = rep.str();
  write_file(fs::path(cfg.output_dir) / "report.txt", result.report_text);
  return result;
}

}  // namespace lgf
