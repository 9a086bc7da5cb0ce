// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "rlse/network.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rlse/error.hpp"
#include "rlse/mel.hpp"
#include "rlse/rng.hpp"

namespace rlse {

namespace {

Eigen::VectorXd sigmoid(const Eigen::VectorXd& z) {
  return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
  const double m = z.maxCoeff();
  Eigen::VectorXd e = (z.array() - m).exp();
  return e / e.sum();
}

Eigen::VectorXd apply_activation(const Eigen::VectorXd& z, Activation a) {
  switch (a) {
    case Activation::kSigmoid:
      return sigmoid(z);
    case Activation::kLinear:
      return z;
    case Activation::kSoftmax:
      return softmax(z);
  }
  throw Error("unknown activation");
}

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::kSigmoid:
      return "sigmoid";
    case Activation::kLinear:
      return "linear";
    case Activation::kSoftmax:
      return "softmax";
  }
  return "?";
}

Activation activation_from_name(const std::string& s) {
  if (s == "sigmoid") return Activation::kSigmoid;
  if (s == "linear") return Activation::kLinear;
  if (s == "softmax") return Activation::kSoftmax;
  throw DataError("unknown activation tag: " + s);
}

void check_training_data(const Network& net, const std::vector<Eigen::VectorXd>& inputs,
                         const std::vector<Eigen::VectorXd>& targets) {
  if (inputs.empty()) throw DataError("train: empty dataset");
  if (inputs.size() != targets.size()) {
    throw DataError("train: " + std::to_string(inputs.size()) + " inputs vs " +
                    std::to_string(targets.size()) + " targets");
  }
  for (size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].size() != net.input_dim() || targets[i].size() != net.output_dim()) {
      throw DataError("train: sample " + std::to_string(i) + " has dims " +
                      std::to_string(inputs[i].size()) + "/" + std::to_string(targets[i].size()) +
                      ", network expects " + std::to_string(net.input_dim()) + "/" +
                      std::to_string(net.output_dim()));
    }
  }
}

void write_vector_hex(std::ostream& out, const Eigen::VectorXd& v) {
  char buf[40];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%a", v[i]);
    if (i) out << ' ';
    out << buf;
  }
  out << '\n';
}

Eigen::VectorXd read_vector_hex(std::istream& in, Eigen::Index n, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(std::string("truncated model file at ") + what);
  Eigen::VectorXd v(n);
  const char* p = line.c_str();
  char* end = nullptr;
  for (Eigen::Index i = 0; i < n; ++i) {
    v[i] = std::strtod(p, &end);
    if (end == p) throw DataError(std::string("bad float in model file at ") + what);
    p = end;
  }
  return v;
}

}  // namespace

Eigen::VectorXd Normalization::apply(Eigen::VectorXd x) const {
  if (log_input) {
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = floored_log(x[i]);
  }
  if (standardize()) {
    if (x.size() != mean.size()) {
      throw DataError("Normalization: input dim " + std::to_string(x.size()) +
                      " != stats dim " + std::to_string(mean.size()));
    }
    x = (x - mean).cwiseProduct(inv_std);
  }
  return x;
}

Normalization fit_normalization(const std::vector<Eigen::VectorXd>& raw_inputs) {
  if (raw_inputs.empty()) throw DataError("fit_normalization: empty input set");
  const Eigen::Index dim = raw_inputs.front().size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for (const auto& x : raw_inputs) {
    if (x.size() != dim) throw DataError("fit_normalization: mixed input dimensions");
    for (Eigen::Index i = 0; i < dim; ++i) mean[i] += floored_log(x[i]);
  }
  mean /= static_cast<double>(raw_inputs.size());

  Eigen::VectorXd var = Eigen::VectorXd::Zero(dim);
  for (const auto& x : raw_inputs) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double d = floored_log(x[i]) - mean[i];
      var[i] += d * d;
    }
  }
  var /= static_cast<double>(raw_inputs.size());

  Normalization norm;
  norm.log_input = true;
  norm.mean = std::move(mean);
  norm.inv_std.resize(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double sd = std::sqrt(var[i]);
    norm.inv_std[i] = sd > 1e-6 ? 1.0 / sd : 0.0;
  }
  return norm;
}

Network Network::make(const std::vector<int>& dims, Activation output_activation, uint64_t seed) {
  if (dims.size() < 2) throw DataError("Network::make: need at least input and output dims");
  for (const int d : dims) {
    if (d < 1) throw DataError("Network::make: nonpositive layer dimension");
  }
  Rng rng(seed);
  Network net;
  net.output_activation_ = output_activation;
  net.layers_.reserve(dims.size() - 1);
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    const int in = dims[l], out = dims[l + 1];
    LayerParams layer;
    layer.weights.resize(out, in);
    const double r = std::sqrt(6.0 / (in + out));
    for (int i = 0; i < out; ++i) {
      for (int j = 0; j < in; ++j) layer.weights(i, j) = rng.uniform_real(-r, r);
    }
    layer.bias = Eigen::VectorXd::Zero(out);
    net.layers_.push_back(std::move(layer));
  }
  return net;
}

std::vector<Eigen::VectorXd> Network::activations(const Eigen::VectorXd& input) const {
  if (layers_.empty()) throw DataError("Network: no layers");
  if (input.size() != input_dim()) {
    throw DataError("Network::forward: input dim " + std::to_string(input.size()) +
                    " != " + std::to_string(input_dim()));
  }
  if (!input.allFinite()) throw DataError("Network::forward: non-finite input");

  std::vector<Eigen::VectorXd> acts;
  acts.reserve(layers_.size() + 1);
  acts.push_back(norm_.active() ? norm_.apply(input) : input);
  for (size_t l = 0; l < layers_.size(); ++l) {
    const Eigen::VectorXd z = layers_[l].weights * acts.back() + layers_[l].bias;
    const Activation a = l + 1 == layers_.size() ? output_activation_ : Activation::kSigmoid;
    acts.push_back(apply_activation(z, a));
  }
  return acts;
}

Eigen::VectorXd Network::forward(const Eigen::VectorXd& input) const {
  return activations(input).back();
}

double mse_loss(const std::vector<Eigen::VectorXd>& outputs,
                const std::vector<Eigen::VectorXd>& targets) {
  if (outputs.size() != targets.size() || outputs.empty()) {
    throw DataError("mse_loss: need equal nonzero sample counts");
  }
  double total = 0.0;
  for (size_t i = 0; i < outputs.size(); ++i) {
    if (outputs[i].size() != targets[i].size()) {
      throw DataError("mse_loss: dimension mismatch at sample " + std::to_string(i));
    }
    total += (outputs[i] - targets[i]).squaredNorm();
  }
  return total / static_cast<double>(outputs.size());
}

std::vector<LayerParams> mse_gradient(const Network& net,
                                      const std::vector<Eigen::VectorXd>& inputs,
                                      const std::vector<Eigen::VectorXd>& targets) {
  check_training_data(net, inputs, targets);
  const auto& layers = net.layers();
  std::vector<LayerParams> grad(layers.size());
  for (size_t l = 0; l < layers.size(); ++l) {
    grad[l].weights = Eigen::MatrixXd::Zero(layers[l].weights.rows(), layers[l].weights.cols());
    grad[l].bias = Eigen::VectorXd::Zero(layers[l].bias.size());
  }

  const double inv_batch = 1.0 / static_cast<double>(inputs.size());
  for (size_t s = 0; s < inputs.size(); ++s) {
    const auto acts = net.activations(inputs[s]);
    const Eigen::VectorXd& y = acts.back();

    // dL/dy for the batch-mean squared L2 loss.
    Eigen::VectorXd dy = 2.0 * inv_batch * (y - targets[s]);

    // Output head: convert dL/dy to dL/dz.
    Eigen::VectorXd delta;
    switch (net.output_activation()) {
      case Activation::kLinear:
        delta = dy;
        break;
      case Activation::kSigmoid:
        delta = dy.cwiseProduct(y.cwiseProduct((1.0 - y.array()).matrix()));
        break;
      case Activation::kSoftmax: {
        const double dot = dy.dot(y);
        delta = y.cwiseProduct((dy.array() - dot).matrix());
        break;
      }
    }

    for (size_t l = layers.size(); l-- > 0;) {
      grad[l].weights += delta * acts[l].transpose();
      grad[l].bias += delta;
      if (l > 0) {
        const Eigen::VectorXd back = layers[l].weights.transpose() * delta;
        const auto& h = acts[l];  // sigmoid activation of layer l
        delta = back.cwiseProduct(h.cwiseProduct((1.0 - h.array()).matrix()));
      }
    }
  }
  return grad;
}

TrainStats train(Network& net, const std::vector<Eigen::VectorXd>& inputs,
                 const std::vector<Eigen::VectorXd>& targets, const TrainConfig& cfg) {
  check_training_data(net, inputs, targets);
  if (cfg.learning_rate < 0.0) throw DataError("train: negative learning rate");
  if (cfg.epochs < 1) throw DataError("train: epochs must be >= 1");
  if (cfg.batch_size < 1) throw DataError("train: batch_size must be >= 1");

  Rng rng(cfg.seed);
  std::vector<size_t> order(inputs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainStats stats;
  std::vector<Eigen::VectorXd> batch_in, batch_tg;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_total = 0.0;
    size_t batches = 0;
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(cfg.batch_size)) {
      const size_t end = std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
      batch_in.clear();
      batch_tg.clear();
      for (size_t i = start; i < end; ++i) {
        batch_in.push_back(inputs[order[i]]);
        batch_tg.push_back(targets[order[i]]);
      }

      std::vector<Eigen::VectorXd> outs;
      outs.reserve(batch_in.size());
      for (const auto& x : batch_in) outs.push_back(net.forward(x));
      epoch_total += mse_loss(outs, batch_tg);
      ++batches;

      const auto grad = mse_gradient(net, batch_in, batch_tg);
      auto& layers = net.mutable_layers();
      for (size_t l = 0; l < layers.size(); ++l) {
        layers[l].weights -= cfg.learning_rate * grad[l].weights;
        layers[l].bias -= cfg.learning_rate * grad[l].bias;
      }
    }
    const double mean_loss = epoch_total / static_cast<double>(batches);
    if (!std::isfinite(mean_loss)) {
      throw Error("train: non-finite loss at epoch " + std::to_string(epoch) +
                  " (lr=" + std::to_string(cfg.learning_rate) + ")");
    }
    stats.epoch_loss.push_back(mean_loss);
  }
  return stats;
}

PretrainResult pretrain_mask_estimator(const std::vector<Eigen::VectorXd>& raw_contexts,
                                       const std::vector<Eigen::VectorXd>& ibm_targets,
                                       const std::vector<int>& hidden_dims,
                                       const TrainConfig& cfg) {
  if (raw_contexts.empty()) throw DataError("pretrain_mask_estimator: empty dataset");
  if (raw_contexts.size() != ibm_targets.size()) {
    throw DataError("pretrain_mask_estimator: input/target count mismatch");
  }
  for (const auto& t : ibm_targets) {
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      if (t[i] != 0.0 && t[i] != 1.0) {
        throw DataError("pretrain_mask_estimator: targets must be binary");
      }
    }
  }

  std::vector<int> dims;
  dims.push_back(static_cast<int>(raw_contexts.front().size()));
  dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
  dims.push_back(static_cast<int>(ibm_targets.front().size()));

  PretrainResult res;
  res.net = Network::make(dims, Activation::kSigmoid, cfg.seed);
  res.net.set_normalization(fit_normalization(raw_contexts));
  res.stats = train(res.net, raw_contexts, ibm_targets, cfg);
  return res;
}

Network extend_to_action_head(const Network& pretrained, int action_count,
                              const std::vector<int>& appended_hidden, uint64_t seed) {
  if (pretrained.layer_count() == 0) throw DataError("extend_to_action_head: empty network");
  if (action_count < 2) throw DataError("extend_to_action_head: need at least 2 actions");

  Network net = pretrained;
  // The pretrained output head becomes an internal layer; its sigmoid
  // activation carries over since hidden layers are sigmoid.
  net.set_output_activation(Activation::kSoftmax);

  Rng rng(seed);
  int in = pretrained.output_dim();
  auto append = [&](int out) {
    LayerParams layer;
    layer.weights.resize(out, in);
    const double r = std::sqrt(6.0 / (in + out));
    for (int i = 0; i < out; ++i) {
      for (int j = 0; j < in; ++j) layer.weights(i, j) = rng.uniform_real(-r, r);
    }
    layer.bias = Eigen::VectorXd::Zero(out);
    net.mutable_layers().push_back(std::move(layer));
    in = out;
  };
  for (const int width : appended_hidden) {
    if (width < 1) throw DataError("extend_to_action_head: nonpositive hidden width");
    append(width);
  }
  append(action_count);
  return net;
}

int argmax_action(const Eigen::VectorXd& action_scores) {
  if (action_scores.size() == 0) throw DataError("argmax_action: empty vector");
  int best = 0;
  for (int i = 1; i < action_scores.size(); ++i) {
    if (action_scores[i] > action_scores[best]) best = i;
  }
  return best;
}

void save_network(const std::filesystem::path& path, const Network& net) {
  if (net.layer_count() == 0) throw DataError("save_network: empty network");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write model: " + path.string());

  out << "RLSENET v1\n";
  out << "layers=" << net.layer_count()
      << " output_activation=" << activation_name(net.output_activation()) << "\n";

  const auto& norm = net.normalization();
  out << "normalization log_input=" << (norm.log_input ? 1 : 0)
      << " standardize=" << (norm.standardize() ? 1 : 0) << " dim=" << norm.mean.size() << "\n";
  if (norm.standardize()) {
    write_vector_hex(out, norm.mean);
    write_vector_hex(out, norm.inv_std);
  }

  for (const auto& layer : net.layers()) {
    out << "layer in=" << layer.weights.cols() << " out=" << layer.weights.rows() << "\n";
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      write_vector_hex(out, layer.weights.row(r).transpose());
    }
    write_vector_hex(out, layer.bias);
  }
  if (!out) throw DataError("short write to model: " + path.string());
}

Network load_network(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model: " + path.string());

  std::string line;
  if (!std::getline(in, line) || line != "RLSENET v1") {
    throw DataError("bad model header in " + path.string());
  }

  int layer_count = -1;
  Activation out_act = Activation::kLinear;
  if (!std::getline(in, line)) throw DataError("truncated model: " + path.string());
  {
    std::istringstream fields(line);
    std::string tok;
    while (fields >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw DataError("bad model field: " + tok);
      const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      if (key == "layers") {
        layer_count = std::stoi(val);
      } else if (key == "output_activation") {
        out_act = activation_from_name(val);
      }
    }
  }
  if (layer_count < 1) throw DataError("bad layer count in " + path.string());

  Network net;
  net.set_output_activation(out_act);

  if (!std::getline(in, line)) throw DataError("truncated model: " + path.string());
  {
    std::istringstream fields(line);
    std::string head;
    fields >> head;
    if (head != "normalization") throw DataError("expected normalization block in " + path.string());
    int log_input = 0, standardize = 0;
    Eigen::Index dim = 0;
    std::string tok;
    while (fields >> tok) {
      const auto eq = tok.find('=');
      const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      if (key == "log_input") {
        log_input = std::stoi(val);
      } else if (key == "standardize") {
        standardize = std::stoi(val);
      } else if (key == "dim") {
        dim = std::stol(val);
      }
    }
    Normalization norm;
    norm.log_input = log_input != 0;
    if (standardize) {
      norm.mean = read_vector_hex(in, dim, "normalization mean");
      norm.inv_std = read_vector_hex(in, dim, "normalization inv_std");
    }
    net.set_normalization(std::move(norm));
  }

  for (int l = 0; l < layer_count; ++l) {
    if (!std::getline(in, line)) throw DataError("truncated model: " + path.string());
    std::istringstream fields(line);
    std::string head;
    fields >> head;
    if (head != "layer") throw DataError("expected layer block in " + path.string());
    Eigen::Index rows = 0, cols = 0;
    std::string tok;
    while (fields >> tok) {
      const auto eq = tok.find('=');
      const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      if (key == "in") {
        cols = std::stol(val);
      } else if (key == "out") {
        rows = std::stol(val);
      }
    }
    if (rows < 1 || cols < 1) throw DataError("bad layer dims in " + path.string());
    LayerParams layer;
    layer.weights.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      layer.weights.row(r) = read_vector_hex(in, cols, "layer weights").transpose();
    }
    layer.bias = read_vector_hex(in, rows, "layer bias");
    net.mutable_layers().push_back(std::move(layer));
  }
  return net;
}

}  // namespace rlse
