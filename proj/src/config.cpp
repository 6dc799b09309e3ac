#include "lgf/config.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace lgf {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct RawEntry {
  std::string value;
  int line = 0;
};

class KeyedDocument {
public:
  explicit KeyedDocument(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw Error("config line " + std::to_string(lineno) + ": expected 'key = value'");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw Error("config line " + std::to_string(lineno) + ": empty key");
      if (entries_.count(key)) {
        throw Error("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
      }
      entries_[key] = RawEntry{value, lineno};
    }
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::string take(const std::string& key, const std::string& fallback) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    consumed_.insert(it->first);
    return it->second.value;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    auto it = entries_.find(key);
    const std::string where =
        it == entries_.end() ? "" : " (line " + std::to_string(it->second.line) + ")";
    throw Error("config key '" + key + "'" + where + ": " + why);
  }

  double number(const std::string& key, double fallback) {
    const std::string raw = take(key, format_double(fallback));
    try {
      std::size_t pos = 0;
      const double v = std::stod(raw, &pos);
      if (pos != raw.size()) fail(key, "trailing characters in '" + raw + "'");
      return v;
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      fail(key, "cannot parse '" + raw + "' as a number");
    }
  }

  long integer(const std::string& key, long fallback) {
    const std::string raw = take(key, std::to_string(fallback));
    try {
      std::size_t pos = 0;
      const long v = std::stol(raw, &pos);
      if (pos != raw.size()) fail(key, "trailing characters in '" + raw + "'");
      return v;
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      fail(key, "cannot parse '" + raw + "' as an integer");
    }
  }

  bool boolean(const std::string& key, bool fallback) {
    const std::string raw = take(key, fallback ? "true" : "false");
    if (raw == "true") return true;
    if (raw == "false") return false;
    fail(key, "expected true or false, got '" + raw + "'");
  }

  /// Everything not consumed that matches the section prefix.
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> keys;
    for (const auto& [key, entry] : entries_) {
      if (key.rfind(prefix, 0) == 0) keys.push_back(key);
    }
    return keys;
  }

  void finish() const {
    for (const auto& [key, entry] : entries_) {
      if (!consumed_.count(key)) {
        throw Error("config line " + std::to_string(entry.line) + ": unknown key '" + key + "'");
      }
    }
  }

private:
  std::map<std::string, RawEntry> entries_;
  std::set<std::string> consumed_;
};

OptMode parse_mode(KeyedDocument& doc) {
  const std::string raw = doc.take("lgf.mode", "gd");
  if (raw == "gd" || raw == "gradient_descent") return OptMode::GradientDescent;
  if (raw == "newton") return OptMode::Newton;
  if (raw == "adam") return OptMode::Adam;
  doc.fail("lgf.mode", "expected gd, newton or adam, got '" + raw + "'");
}

std::string mode_name(OptMode mode) {
  switch (mode) {
    case OptMode::GradientDescent: return "gd";
    case OptMode::Newton: return "newton";
    case OptMode::Adam: return "adam";
  }
  return "gd";
}

FdScheme parse_scheme(KeyedDocument& doc) {
  const std::string raw = doc.take("lgf.fd_scheme", "centered2");
  if (raw == "forward") return FdScheme::Forward;
  if (raw == "centered2") return FdScheme::Centered2;
  if (raw == "centered4") return FdScheme::Centered4;
  doc.fail("lgf.fd_scheme", "expected forward, centered2 or centered4, got '" + raw + "'");
}

std::string scheme_name(FdScheme scheme) {
  switch (scheme) {
    case FdScheme::Forward: return "forward";
    case FdScheme::Centered2: return "centered2";
    case FdScheme::Centered4: return "centered4";
  }
  return "centered2";
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  KeyedDocument doc(text);
  ExperimentConfig cfg;

  cfg.problem.kind = doc.take("problem.kind", "");
  if (cfg.problem.kind.empty()) throw Error("config: problem.kind is required");
  const auto schema = problem_param_defaults(cfg.problem.kind);  // validates the kind
  for (const std::string& key : doc.keys_with_prefix("problem.")) {
    const std::string name = key.substr(std::string("problem.").size());
    if (name == "kind") continue;
    if (!schema.count(name)) doc.fail(key, "unknown parameter for problem kind '" + cfg.problem.kind + "'");
    cfg.problem.params[name] = doc.take(key, "");
  }
  for (const auto& [name, fallback] : schema) {
    if (!cfg.problem.params.count(name)) cfg.problem.params[name] = fallback;
  }

  cfg.lgf.mode = parse_mode(doc);
  cfg.lgf.eta = doc.number("lgf.eta", cfg.lgf.eta);
  cfg.lgf.history_size = static_cast<int>(doc.integer("lgf.history_size", cfg.lgf.history_size));
  cfg.lgf.retrain_interval =
      static_cast<int>(doc.integer("lgf.retrain_interval", cfg.lgf.retrain_interval));
  cfg.lgf.poly_order = static_cast<int>(doc.integer("lgf.poly_order", cfg.lgf.poly_order));
  {
    const std::string raw = doc.take("lgf.truncation_rank", "");
    if (raw.empty() || raw == "none") {
      cfg.lgf.truncation_rank.reset();
    } else {
      try {
        cfg.lgf.truncation_rank = std::stoi(raw);
      } catch (const std::exception&) {
        doc.fail("lgf.truncation_rank", "cannot parse '" + raw + "'");
      }
    }
  }
  cfg.lgf.epochs = doc.integer("lgf.epochs", cfg.lgf.epochs);
  cfg.lgf.fd_scheme = parse_scheme(doc);
  {
    const std::string raw = doc.take("lgf.on_nonfinite", "error");
    if (raw == "error") {
      cfg.lgf.on_nonfinite = NonFinitePolicy::Error;
    } else if (raw == "fallback") {
      cfg.lgf.on_nonfinite = NonFinitePolicy::FallbackToTrue;
    } else {
      doc.fail("lgf.on_nonfinite", "expected error or fallback, got '" + raw + "'");
    }
  }

  cfg.lgf.stlsq.alpha = doc.number("stlsq.alpha", cfg.lgf.stlsq.alpha);
  cfg.lgf.stlsq.threshold = doc.number("stlsq.threshold", cfg.lgf.stlsq.threshold);
  cfg.lgf.stlsq.max_iter = static_cast<int>(doc.integer("stlsq.max_iter", cfg.lgf.stlsq.max_iter));
  cfg.lgf.stlsq.unbias = doc.boolean("stlsq.unbias", cfg.lgf.stlsq.unbias);
  cfg.lgf.stlsq.normalize_columns =
      doc.boolean("stlsq.normalize_columns", cfg.lgf.stlsq.normalize_columns);

  cfg.lgf.integrator.rtol = doc.number("integrator.rtol", cfg.lgf.integrator.rtol);
  cfg.lgf.integrator.atol = doc.number("integrator.atol", cfg.lgf.integrator.atol);
  cfg.lgf.integrator.max_steps = doc.integer("integrator.max_steps", cfg.lgf.integrator.max_steps);
  {
    const std::string raw = doc.take("integrator.method", "dopri5");
    if (raw == "dopri5") {
      cfg.lgf.integrator.method = OdeMethod::Dopri5;
    } else if (raw == "rk4") {
      cfg.lgf.integrator.method = OdeMethod::Rk4Fixed;
    } else {
      doc.fail("integrator.method", "expected dopri5 or rk4, got '" + raw + "'");
    }
  }

  cfg.lgf.adam.beta1 = doc.number("adam.beta1", cfg.lgf.adam.beta1);
  cfg.lgf.adam.beta2 = doc.number("adam.beta2", cfg.lgf.adam.beta2);
  cfg.lgf.adam.epsilon = doc.number("adam.epsilon", cfg.lgf.adam.epsilon);

  cfg.baseline = doc.boolean("run.baseline", cfg.baseline);
  cfg.seed = static_cast<std::uint64_t>(doc.integer("run.seed", static_cast<long>(cfg.seed)));
  cfg.output_dir = doc.take("output.dir", cfg.output_dir);
  cfg.output.full_state = doc.boolean("output.full_state", cfg.output.full_state);
  cfg.output.log_surrogate_loss =
      doc.boolean("output.log_surrogate_loss", cfg.output.log_surrogate_loss);
  cfg.output.record_every = doc.integer("output.record_every", cfg.output.record_every);

  doc.finish();

  // The driver owns these knobs; the output section is their config surface.
  cfg.lgf.record_every = cfg.output.record_every;
  cfg.lgf.log_surrogate_loss = cfg.output.log_surrogate_loss;

  cfg.lgf.validate();
  return cfg;
}

std::string echo_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "problem.kind = " << cfg.problem.kind << "\n";
  for (const auto& [key, value] : cfg.problem.params) {
    out << "problem." << key << " = " << value << "\n";
  }
  out << "\n";
  out << "lgf.mode = " << mode_name(cfg.lgf.mode) << "\n";
  out << "lgf.eta = " << format_double(cfg.lgf.eta) << "\n";
  out << "lgf.history_size = " << cfg.lgf.history_size << "\n";
  out << "lgf.retrain_interval = " << cfg.lgf.retrain_interval << "\n";
  out << "lgf.poly_order = " << cfg.lgf.poly_order << "\n";
  out << "lgf.truncation_rank = "
      << (cfg.lgf.truncation_rank ? std::to_string(*cfg.lgf.truncation_rank) : std::string())
      << "\n";
  out << "lgf.epochs = " << cfg.lgf.epochs << "\n";
  out << "lgf.fd_scheme = " << scheme_name(cfg.lgf.fd_scheme) << "\n";
  out << "lgf.on_nonfinite = "
      << (cfg.lgf.on_nonfinite == NonFinitePolicy::Error ? "error" : "fallback") << "\n";
  out << "\n";
  out << "stlsq.alpha = " << format_double(cfg.lgf.stlsq.alpha) << "\n";
  out << "stlsq.threshold = " << format_double(cfg.lgf.stlsq.threshold) << "\n";
  out << "stlsq.max_iter = " << cfg.lgf.stlsq.max_iter << "\n";
  out << "stlsq.unbias = " << (cfg.lgf.stlsq.unbias ? "true" : "false") << "\n";
  out << "stlsq.normalize_columns = " << (cfg.lgf.stlsq.normalize_columns ? "true" : "false")
      << "\n";
  out << "\n";
  out << "integrator.rtol = " << format_double(cfg.lgf.integrator.rtol) << "\n";
  out << "integrator.atol = " << format_double(cfg.lgf.integrator.atol) << "\n";
  out << "integrator.max_steps = " << cfg.lgf.integrator.max_steps << "\n";
  out << "integrator.method = "
      << (cfg.lgf.integrator.method == OdeMethod::Dopri5 ? "dopri5" : "rk4") << "\n";
  out << "\n";
  out << "adam.beta1 = " << format_double(cfg.lgf.adam.beta1) << "\n";
  out << "adam.beta2 = " << format_double(cfg.lgf.adam.beta2) << "\n";
  out << "adam.epsilon = " << format_double(cfg.lgf.adam.epsilon) << "\n";
  out << "\n";
  out << "run.baseline = " << (cfg.baseline ? "true" : "false") << "\n";
  out << "run.seed = " << cfg.seed << "\n";
  out << "\n";
  out << "output.dir = " << cfg.output_dir << "\n";
  out << "output.full_state = " << (cfg.output.full_state ? "true" : "false") << "\n";
  out << "output.log_surrogate_loss = " << (cfg.output.log_surrogate_loss ? "true" : "false")
      << "\n";
  out << "output.record_every = " << cfg.output.record_every << "\n";
  return out.str();
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace lgf
