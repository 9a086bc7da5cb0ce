// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef RLSE_NETWORK_HPP_
#define RLSE_NETWORK_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace rlse {

enum class Activation {
  kSigmoid,
  kLinear,
  kSoftmax,
};

struct LayerParams {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;     // out
};

// Optional fixed input stage: floored log followed by per-dimension
// standardization. Not trained; persisted with the model so inference
// sees the same input distribution as training.
struct Normalization {
  bool log_input = false;
  Eigen::VectorXd mean;
  Eigen::VectorXd inv_std;

  bool standardize() const { return mean.size() > 0; }
  bool active() const { return log_input || standardize(); }
  Eigen::VectorXd apply(Eigen::VectorXd x) const;
};

// Computes mean/std of the floored-log inputs. Dimensions with (near)
// zero variance get inv_std = 0: they carry no information and would
// otherwise amplify numeric noise.
Normalization fit_normalization(const std::vector<Eigen::VectorXd>& raw_inputs);

// Feedforward net: sigmoid hidden layers, configurable output head.
class Network {
 public:
  Network() = default;

  // dims = {input, hidden..., output}. Weights uniform in [-r, r] with
  // r = sqrt(6 / (fan_in + fan_out)), biases zero, seeded.
  static Network make(const std::vector<int>& dims, Activation output_activation, uint64_t seed);

  int input_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.front().weights.cols()); }
  int output_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.back().weights.rows()); }
  int layer_count() const { return static_cast<int>(layers_.size()); }

  Activation output_activation() const { return output_activation_; }
  void set_output_activation(Activation a) { output_activation_ = a; }

  const std::vector<LayerParams>& layers() const { return layers_; }
  std::vector<LayerParams>& mutable_layers() { return layers_; }

  const Normalization& normalization() const { return norm_; }
  void set_normalization(Normalization n) { norm_ = std::move(n); }

  // Rejects dimension mismatches and non-finite inputs.
  Eigen::VectorXd forward(const Eigen::VectorXd& input) const;

  // All activations: element 0 is the (normalized) input, element i the
  // output of layer i. Used by training and by head extension.
  std::vector<Eigen::VectorXd> activations(const Eigen::VectorXd& input) const;

 private:
  std::vector<LayerParams> layers_;
  Activation output_activation_ = Activation::kLinear;
  Normalization norm_;
};

// Mean over samples of the squared L2 distance.
double mse_loss(const std::vector<Eigen::VectorXd>& outputs,
                const std::vector<Eigen::VectorXd>& targets);

struct TrainConfig {
  double learning_rate = 0.01;
  int epochs = 1;
  int batch_size = 16;
  uint64_t seed = 0;
};

struct TrainStats {
  std::vector<double> epoch_loss;  // mean MSE over the epoch's batches

  double final_loss() const { return epoch_loss.empty() ? 0.0 : epoch_loss.back(); }
};

// Gradient of the batch-mean MSE with respect to every parameter.
// Exposed so tests can compare against finite differences.
std::vector<LayerParams> mse_gradient(const Network& net,
                                      const std::vector<Eigen::VectorXd>& inputs,
                                      const std::vector<Eigen::VectorXd>& targets);

// Mini-batch gradient descent on the MSE, seeded shuffling, fixed
// learning rate. Throws if the loss goes non-finite.
TrainStats train(Network& net, const std::vector<Eigen::VectorXd>& inputs,
                 const std::vector<Eigen::VectorXd>& targets, const TrainConfig& cfg);

struct PretrainResult {
  Network net;
  TrainStats stats;
};

// Stage-one model: sigmoid output trained to predict mask bits from raw
// context vectors. Fits input normalization from the data.
PretrainResult pretrain_mask_estimator(const std::vector<Eigen::VectorXd>& raw_contexts,
                                       const std::vector<Eigen::VectorXd>& ibm_targets,
                                       const std::vector<int>& hidden_dims,
                                       const TrainConfig& cfg);

// Stage-two model: keeps every pretrained layer (the mask head becomes
// an internal sigmoid layer), then appends fresh sigmoid hidden layers
// and a softmax output of `action_count` nodes.
Network extend_to_action_head(const Network& pretrained, int action_count,
                              const std::vector<int>& appended_hidden, uint64_t seed);

// 0-based index of the maximum, ties to the lowest index.
int argmax_action(const Eigen::VectorXd& action_scores);

// Versioned text format with hex-float payloads; round-trips bit-exactly.
void save_network(const std::filesystem::path& path, const Network& net);
Network load_network(const std::filesystem::path& path);

}  // namespace rlse

#endif  // RLSE_NETWORK_HPP_
