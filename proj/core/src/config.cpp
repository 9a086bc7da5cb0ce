// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "rlse/config.hpp"

#include <fstream>
#include <sstream>

#include "rlse/error.hpp"

namespace rlse {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

long parse_int(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw DataError("config: bad integer for " + key + ": '" + value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw DataError("config: bad number for " + key + ": '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw DataError("config: bad boolean for " + key + ": '" + value + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  for (const auto& item : split_list(value)) {
    out.push_back(static_cast<int>(parse_int(key, item)));
  }
  if (out.empty()) throw DataError("config: empty list for " + key);
  return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) {
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw DataError("config: empty list for " + key);
  return out;
}

}  // namespace

void ExperimentConfig::resolve() {
  if (context_chunks <= 0) {
    if (p == 1) {
      context_chunks = 11;
    } else if (p == 2) {
      context_chunks = 5;
    } else {
      throw DataError("config: context_chunks must be set explicitly for p=" + std::to_string(p));
    }
  }
  if (p < 1) throw DataError("config: p must be >= 1");
  if (clusters < 2) throw DataError("config: clusters must be >= 2");
  if (!(alpha > 0.0)) throw DataError("config: alpha must be positive");
  if (n_mels < 1) throw DataError("config: n_mels must be >= 1");
  if (sample_rate <= 0) throw DataError("config: sample_rate must be positive");
  stft.validate();
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw DataError("config: test_fraction must be in (0, 1)");
  }
  for (const int h : pretrain_hidden) {
    if (h < 1) throw DataError("config: pretrain_hidden entries must be >= 1");
  }
  for (const int h : action_hidden) {
    if (h < 1) throw DataError("config: action_hidden entries must be >= 1");
  }
  if (pretrain_epochs < 1 || rl_epochs < 1) throw DataError("config: epochs must be >= 1");
  if (!(pretrain_learning_rate > 0.0) || !(rl_learning_rate > 0.0)) {
    throw DataError("config: learning rates must be positive");
  }
  if (pretrain_batch_size < 1 || rl_batch_size < 1) {
    throw DataError("config: batch sizes must be >= 1");
  }
  if (kmeans_max_iter < 1) throw DataError("config: kmeans_max_iter must be >= 1");
  if (!(recognizer_timeout > 0.0)) throw DataError("config: recognizer_timeout must be positive");
  if (jobs < 1) throw DataError("config: jobs must be >= 1");
  if (snr_test_db.empty()) throw DataError("config: snr_test_db must not be empty");
  if (input_dim != 0 && input_dim != network_input_dim()) {
    throw DataError("config: declared input_dim " + std::to_string(input_dim) +
                    " != context_chunks*p*n_mels = " + std::to_string(network_input_dim()));
  }
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw DataError("config: empty value for " + key);

    if (key == "seed") {
      cfg.seed = static_cast<uint64_t>(parse_int(key, value));
    } else if (key == "p") {
      cfg.p = static_cast<int>(parse_int(key, value));
    } else if (key == "context_chunks") {
      cfg.context_chunks = static_cast<int>(parse_int(key, value));
    } else if (key == "clusters") {
      cfg.clusters = static_cast<int>(parse_int(key, value));
    } else if (key == "alpha") {
      cfg.alpha = parse_double(key, value);
    } else if (key == "n_mels") {
      cfg.n_mels = static_cast<int>(parse_int(key, value));
    } else if (key == "sample_rate") {
      cfg.sample_rate = static_cast<int>(parse_int(key, value));
    } else if (key == "frame_length") {
      cfg.stft.frame_length = static_cast<int>(parse_int(key, value));
    } else if (key == "hop") {
      cfg.stft.hop = static_cast<int>(parse_int(key, value));
    } else if (key == "shared_mask") {
      cfg.shared_mask = parse_bool(key, value);
    } else if (key == "snr_train_db") {
      cfg.snr_train_db = parse_double(key, value);
    } else if (key == "snr_test_db") {
      cfg.snr_test_db = parse_double_list(key, value);
    } else if (key == "test_fraction") {
      cfg.test_fraction = parse_double(key, value);
    } else if (key == "pretrain_hidden") {
      cfg.pretrain_hidden = parse_int_list(key, value);
    } else if (key == "pretrain_epochs") {
      cfg.pretrain_epochs = static_cast<int>(parse_int(key, value));
    } else if (key == "pretrain_learning_rate") {
      cfg.pretrain_learning_rate = parse_double(key, value);
    } else if (key == "pretrain_batch_size") {
      cfg.pretrain_batch_size = static_cast<int>(parse_int(key, value));
    } else if (key == "action_hidden") {
      cfg.action_hidden = parse_int_list(key, value);
    } else if (key == "rl_epochs") {
      cfg.rl_epochs = static_cast<int>(parse_int(key, value));
    } else if (key == "rl_learning_rate") {
      cfg.rl_learning_rate = parse_double(key, value);
    } else if (key == "rl_batch_size") {
      cfg.rl_batch_size = static_cast<int>(parse_int(key, value));
    } else if (key == "kmeans_max_iter") {
      cfg.kmeans_max_iter = static_cast<int>(parse_int(key, value));
    } else if (key == "recognizer_timeout") {
      cfg.recognizer_timeout = parse_double(key, value);
    } else if (key == "jobs") {
      cfg.jobs = static_cast<int>(parse_int(key, value));
    } else if (key == "input_dim") {
      cfg.input_dim = static_cast<int>(parse_int(key, value));
    } else {
      throw DataError("config: unknown key '" + key + "'");
    }
  }
  cfg.resolve();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string config_to_text(const ExperimentConfig& cfg) {
  std::ostringstream out;
  auto list_int = [](const std::vector<int>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
      if (i) s += ", ";
      s += std::to_string(v[i]);
    }
    return s;
  };
  auto fmt = [](double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
  };
  std::string snrs;
  for (size_t i = 0; i < cfg.snr_test_db.size(); ++i) {
    if (i) snrs += ", ";
    snrs += fmt(cfg.snr_test_db[i]);
  }

  out << "seed = " << cfg.seed << "\n";
  out << "p = " << cfg.p << "\n";
  out << "context_chunks = " << cfg.context_chunks << "\n";
  out << "clusters = " << cfg.clusters << "\n";
  out << "alpha = " << fmt(cfg.alpha) << "\n";
  out << "n_mels = " << cfg.n_mels << "\n";
  out << "sample_rate = " << cfg.sample_rate << "\n";
  out << "frame_length = " << cfg.stft.frame_length << "\n";
  out << "hop = " << cfg.stft.hop << "\n";
  out << "shared_mask = " << (cfg.shared_mask ? "true" : "false") << "\n";
  out << "snr_train_db = " << fmt(cfg.snr_train_db) << "\n";
  out << "snr_test_db = " << snrs << "\n";
  out << "test_fraction = " << fmt(cfg.test_fraction) << "\n";
  out << "pretrain_hidden = " << list_int(cfg.pretrain_hidden) << "\n";
  out << "pretrain_epochs = " << cfg.pretrain_epochs << "\n";
  out << "pretrain_learning_rate = " << fmt(cfg.pretrain_learning_rate) << "\n";
  out << "pretrain_batch_size = " << cfg.pretrain_batch_size << "\n";
  out << "action_hidden = " << list_int(cfg.action_hidden) << "\n";
  out << "rl_epochs = " << cfg.rl_epochs << "\n";
  out << "rl_learning_rate = " << fmt(cfg.rl_learning_rate) << "\n";
  out << "rl_batch_size = " << cfg.rl_batch_size << "\n";
  out << "kmeans_max_iter = " << cfg.kmeans_max_iter << "\n";
  out << "recognizer_timeout = " << fmt(cfg.recognizer_timeout) << "\n";
  out << "jobs = " << cfg.jobs << "\n";
  out << "input_dim = " << cfg.network_input_dim() << "\n";
  return out.str();
}

void save_config(const std::filesystem::path& path, const ExperimentConfig& cfg) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write config: " + path.string());
  out << config_to_text(cfg);
}

}  // namespace rlse
