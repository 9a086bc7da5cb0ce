#include <doctest.h>

#include <cmath>

#include "rlse/error.hpp"
#include "rlse/network.hpp"
#include "rlse/rng.hpp"

#include "test_util.hpp"

using namespace rlse;

namespace {

// Straightforward re-evaluation with plain loops, independent of the
// Eigen-based forward path.
Eigen::VectorXd loop_forward(const Network& net, const Eigen::VectorXd& input) {
  Eigen::VectorXd a = input;
  const auto& layers = net.layers();
  for (size_t l = 0; l < layers.size(); ++l) {
    const auto& W = layers[l].weights;
    Eigen::VectorXd z(W.rows());
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      double acc = layers[l].bias[i];
      for (Eigen::Index j = 0; j < W.cols(); ++j) acc += W(i, j) * a[j];
      z[i] = acc;
    }
    if (l + 1 < layers.size() || net.output_activation() == Activation::kSigmoid) {
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = 1.0 / (1.0 + std::exp(-z[i]));
    } else if (net.output_activation() == Activation::kSoftmax && l + 1 == layers.size()) {
      double m = z[0];
      for (Eigen::Index i = 1; i < z.size(); ++i) m = std::max(m, z[i]);
      double sum = 0.0;
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        z[i] = std::exp(z[i] - m);
        sum += z[i];
      }
      z /= sum;
    }
    a = z;
  }
  return a;
}

double loss_of(const Network& net, const std::vector<Eigen::VectorXd>& in,
               const std::vector<Eigen::VectorXd>& tg) {
  std::vector<Eigen::VectorXd> outs;
  for (const auto& x : in) outs.push_back(net.forward(x));
  return mse_loss(outs, tg);
}

// Max relative error between analytic gradients and central differences.
double gradient_check(Network net, uint64_t seed, Activation head) {
  net.set_output_activation(head);
  Rng rng(seed);
  std::vector<Eigen::VectorXd> in, tg;
  for (int s = 0; s < 5; ++s) {
    Eigen::VectorXd x(net.input_dim()), t(net.output_dim());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform_real(-1.5, 1.5);
    for (Eigen::Index i = 0; i < t.size(); ++i) t[i] = rng.uniform_real(-0.5, 1.5);
    in.push_back(x);
    tg.push_back(t);
  }

  const auto grad = mse_gradient(net, in, tg);
  const double h = 1e-5;
  double worst = 0.0;
  for (size_t l = 0; l < net.layers().size(); ++l) {
    auto check_param = [&](double* p, double analytic) {
      const double saved = *p;
      *p = saved + h;
      const double up = loss_of(net, in, tg);
      *p = saved - h;
      const double down = loss_of(net, in, tg);
      *p = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double scale = std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
      worst = std::max(worst, std::fabs(analytic - numeric) / scale);
    };
    auto& layer = net.mutable_layers()[l];
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) {
        check_param(&layer.weights(i, j), grad[l].weights(i, j));
      }
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
      check_param(&layer.bias[i], grad[l].bias[i]);
    }
  }
  return worst;
}

}  // namespace

TEST_SUITE_BEGIN("network");

TEST_CASE("zero parameters put every sigmoid at one half") {
  Network net = Network::make({4, 3, 2}, Activation::kLinear, 1);
  for (auto& layer : net.mutable_layers()) {
    layer.weights.setZero();
    layer.bias.setZero();
  }
  const auto acts = net.activations(Eigen::VectorXd::Random(4));
  for (Eigen::Index i = 0; i < acts[1].size(); ++i) CHECK(acts[1][i] == 0.5);
  for (Eigen::Index i = 0; i < acts[2].size(); ++i) CHECK(acts[2][i] == 0.0);  // linear head
}

TEST_CASE("softmax with identical logits is uniform and sums to one") {
  Network net = Network::make({3, 8}, Activation::kSoftmax, 2);
  net.mutable_layers()[0].weights.setZero();
  net.mutable_layers()[0].bias.setConstant(1.7);
  const Eigen::VectorXd y = net.forward(Eigen::VectorXd::Random(3));
  for (Eigen::Index i = 0; i < y.size(); ++i) CHECK(y[i] == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(std::fabs(y.sum() - 1.0) < 1e-9);
}

TEST_CASE("softmax argmax is invariant to constant logit shifts") {
  Rng rng(10);
  Network net = Network::make({6, 5}, Activation::kSoftmax, 3);
  for (int trial = 0; trial < 30; ++trial) {
    Eigen::VectorXd x(6);
    for (int i = 0; i < 6; ++i) x[i] = rng.uniform_real(-2, 2);
    const int before = argmax_action(net.forward(x));
    net.mutable_layers()[0].bias.array() += rng.uniform_real(-5, 5);
    const int after = argmax_action(net.forward(x));
    CHECK(before == after);
  }
}

TEST_CASE("forward matches an independent loop evaluation to 1e-12") {
  for (const Activation head : {Activation::kLinear, Activation::kSigmoid, Activation::kSoftmax}) {
    Network net = Network::make({7, 9, 4}, head, 100 + static_cast<uint64_t>(head));
    Rng rng(55);
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXd x(7);
      for (int i = 0; i < 7; ++i) x[i] = rng.uniform_real(-3, 3);
      const Eigen::VectorXd a = net.forward(x);
      const Eigen::VectorXd b = loop_forward(net, x);
      CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("forward rejects bad inputs") {
  Network net = Network::make({4, 2}, Activation::kLinear, 0);
  CHECK_THROWS_AS(net.forward(Eigen::VectorXd::Zero(5)), DataError);
  Eigen::VectorXd nan_input = Eigen::VectorXd::Zero(4);
  nan_input[2] = std::nan("");
  CHECK_THROWS_AS(net.forward(nan_input), DataError);
}

TEST_CASE("mse_loss is the mean over samples of squared L2 distance") {
  std::vector<Eigen::VectorXd> a = {Eigen::VectorXd::Zero(3)};
  std::vector<Eigen::VectorXd> b = {Eigen::VectorXd::Zero(3)};
  CHECK(mse_loss(a, b) == 0.0);

  b[0][0] = 1.0;
  CHECK(mse_loss(a, b) == 1.0);

  Rng rng(3);
  std::vector<Eigen::VectorXd> xs, ys;
  double expected = 0.0;
  for (int s = 0; s < 7; ++s) {
    Eigen::VectorXd x(5), y(5);
    double sq = 0.0;
    for (int i = 0; i < 5; ++i) {
      x[i] = rng.uniform_real(-1, 1);
      y[i] = rng.uniform_real(-1, 1);
      sq += (x[i] - y[i]) * (x[i] - y[i]);
    }
    xs.push_back(x);
    ys.push_back(y);
    expected += sq;
  }
  expected /= 7.0;
  CHECK(mse_loss(xs, ys) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("analytic gradients match central finite differences") {
  CHECK(gradient_check(Network::make({5, 7, 3}, Activation::kLinear, 21), 91,
                       Activation::kLinear) < 1e-4);
  CHECK(gradient_check(Network::make({6, 8, 4}, Activation::kSigmoid, 22), 92,
                       Activation::kSigmoid) < 1e-4);
  CHECK(gradient_check(Network::make({4, 10, 6}, Activation::kSoftmax, 23), 93,
                       Activation::kSoftmax) < 1e-4);
}

TEST_CASE("zero learning rate leaves parameters untouched") {
  Network net = Network::make({3, 4, 2}, Activation::kSigmoid, 5);
  const Network before = net;
  Rng rng(12);
  std::vector<Eigen::VectorXd> in, tg;
  for (int s = 0; s < 6; ++s) {
    Eigen::VectorXd x(3), t(2);
    for (int i = 0; i < 3; ++i) x[i] = rng.uniform_real(-1, 1);
    for (int i = 0; i < 2; ++i) t[i] = rng.uniform_real(0, 1);
    in.push_back(x);
    tg.push_back(t);
  }
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.epochs = 3;
  train(net, in, tg, cfg);
  for (size_t l = 0; l < net.layers().size(); ++l) {
    CHECK(net.layers()[l].weights == before.layers()[l].weights);
    CHECK(net.layers()[l].bias == before.layers()[l].bias);
  }
}

TEST_CASE("a linear model converges to the least-squares optimum") {
  // Target: y = M x + c, learnable exactly by a 1-layer linear net.
  Rng rng(31);
  Eigen::MatrixXd M(2, 3);
  Eigen::VectorXd c(2);
  for (int i = 0; i < 2; ++i) {
    c[i] = rng.uniform_real(-0.5, 0.5);
    for (int j = 0; j < 3; ++j) M(i, j) = rng.uniform_real(-1, 1);
  }
  std::vector<Eigen::VectorXd> in, tg;
  for (int s = 0; s < 64; ++s) {
    Eigen::VectorXd x(3);
    for (int j = 0; j < 3; ++j) x[j] = rng.uniform_real(-1, 1);
    in.push_back(x);
    tg.push_back(M * x + c);
  }

  Network net = Network::make({3, 2}, Activation::kLinear, 77);
  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.epochs = 500;
  cfg.batch_size = 16;
  cfg.seed = 4;
  const TrainStats stats = train(net, in, tg, cfg);

  CHECK(stats.final_loss() < 1e-4);
  for (size_t e = 1; e < stats.epoch_loss.size(); ++e) {
    CHECK(stats.epoch_loss[e] <= stats.epoch_loss[e - 1] + 1e-12);
  }
}

TEST_CASE("training is bit-deterministic per seed") {
  auto run = [] {
    Rng rng(8);
    std::vector<Eigen::VectorXd> in, tg;
    for (int s = 0; s < 20; ++s) {
      Eigen::VectorXd x(4), t(3);
      for (int i = 0; i < 4; ++i) x[i] = rng.uniform_real(-1, 1);
      for (int i = 0; i < 3; ++i) t[i] = rng.uniform_real(0, 1);
      in.push_back(x);
      tg.push_back(t);
    }
    Network net = Network::make({4, 6, 3}, Activation::kSigmoid, 13);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.seed = 99;
    train(net, in, tg, cfg);
    return net;
  };
  const Network a = run();
  const Network b = run();
  for (size_t l = 0; l < a.layers().size(); ++l) {
    CHECK(a.layers()[l].weights == b.layers()[l].weights);
    CHECK(a.layers()[l].bias == b.layers()[l].bias);
  }
}

TEST_CASE("pretraining learns mask bits") {
  Rng rng(17);
  // Separable synthetic set: bit m of the mask is 1 iff input block m has
  // high energy, with a wide margin.
  std::vector<Eigen::VectorXd> in, tg;
  for (int s = 0; s < 200; ++s) {
    Eigen::VectorXd x(8), t(4);
    for (int m = 0; m < 4; ++m) {
      const bool on = rng.uniform_index(2) == 1;
      t[m] = on ? 1.0 : 0.0;
      x[2 * m] = on ? rng.uniform_real(5.0, 10.0) : rng.uniform_real(1e-4, 1e-3);
      x[2 * m + 1] = on ? rng.uniform_real(5.0, 10.0) : rng.uniform_real(1e-4, 1e-3);
    }
    in.push_back(x);
    tg.push_back(t);
  }

  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.learning_rate = 0.5;
  cfg.seed = 6;
  const PretrainResult res = pretrain_mask_estimator(in, tg, {16}, cfg);

  CHECK(res.stats.epoch_loss.back() < res.stats.epoch_loss.front());

  int errors = 0, bits = 0;
  for (size_t s = 0; s < in.size(); ++s) {
    const Eigen::VectorXd y = res.net.forward(in[s]);
    for (int m = 0; m < 4; ++m) {
      errors += ((y[m] >= 0.5) != (tg[s][m] == 1.0)) ? 1 : 0;
      ++bits;
    }
  }
  CHECK(static_cast<double>(errors) / bits < 0.30);

  SUBCASE("degenerate all-ones targets saturate the outputs") {
    std::vector<Eigen::VectorXd> ones(in.size(), Eigen::VectorXd::Ones(4));
    TrainConfig cfg2 = cfg;
    cfg2.epochs = 80;
    const PretrainResult res2 = pretrain_mask_estimator(in, ones, {16}, cfg2);
    double mean_out = 0.0;
    for (const auto& x : in) mean_out += res2.net.forward(x).mean();
    mean_out /= static_cast<double>(in.size());
    CHECK(mean_out > 0.9);
  }
}

TEST_CASE("pretraining rejects non-binary targets") {
  std::vector<Eigen::VectorXd> in = {Eigen::VectorXd::Ones(4)};
  std::vector<Eigen::VectorXd> tg = {Eigen::VectorXd::Constant(2, 0.5)};
  CHECK_THROWS_AS(pretrain_mask_estimator(in, tg, {4}, TrainConfig{}), DataError);
}

TEST_CASE("action head extension preserves the pretrained feature map") {
  Rng rng(40);
  std::vector<Eigen::VectorXd> in, tg;
  for (int s = 0; s < 40; ++s) {
    Eigen::VectorXd x(6), t(5);
    for (int i = 0; i < 6; ++i) x[i] = rng.uniform_real(0.001, 2.0);
    for (int i = 0; i < 5; ++i) t[i] = static_cast<double>(rng.uniform_index(2));
    in.push_back(x);
    tg.push_back(t);
  }
  TrainConfig cfg;
  cfg.epochs = 10;
  const PretrainResult pre = pretrain_mask_estimator(in, tg, {7}, cfg);

  const int actions = 32;
  const Network ext = extend_to_action_head(pre.net, actions, {64}, 9);

  CHECK(ext.output_dim() == actions);
  CHECK(ext.layer_count() == pre.net.layer_count() + 2);

  for (const auto& x : in) {
    // Softmax output is a probability vector.
    const Eigen::VectorXd y = ext.forward(x);
    CHECK(std::fabs(y.sum() - 1.0) < 1e-9);
    for (Eigen::Index i = 0; i < y.size(); ++i) CHECK(y[i] > 0.0);

    // Copied layers produce identical activations.
    const auto pre_acts = pre.net.activations(x);
    const auto ext_acts = ext.activations(x);
    for (size_t l = 0; l < pre_acts.size(); ++l) {
      CHECK(pre_acts[l] == ext_acts[l]);
    }
  }
}

TEST_CASE("argmax_action picks the first maximum") {
  Eigen::VectorXd v(3);
  v << 0.1, 0.7, 0.2;
  CHECK(argmax_action(v) == 1);
  CHECK(argmax_action(Eigen::VectorXd::Constant(5, 0.2)) == 0);
  Eigen::VectorXd onehot = Eigen::VectorXd::Zero(6);
  onehot[4] = 1.0;
  CHECK(argmax_action(onehot) == 4);
  CHECK_THROWS_AS(argmax_action(Eigen::VectorXd()), DataError);
}

TEST_CASE("model files round-trip bit-exactly") {
  rlse_test::TempDir tmp("model-io");
  Rng rng(64);
  std::vector<Eigen::VectorXd> in, tg;
  for (int s = 0; s < 30; ++s) {
    Eigen::VectorXd x(5), t(3);
    for (int i = 0; i < 5; ++i) x[i] = rng.uniform_real(0.01, 4.0);
    for (int i = 0; i < 3; ++i) t[i] = static_cast<double>(rng.uniform_index(2));
    in.push_back(x);
    tg.push_back(t);
  }
  TrainConfig cfg;
  cfg.epochs = 4;
  const Network net = extend_to_action_head(pretrain_mask_estimator(in, tg, {6}, cfg).net, 8, {5}, 3);

  const auto path = tmp.path() / "net.rlsenet";
  save_network(path, net);
  const Network loaded = load_network(path);

  REQUIRE(loaded.layer_count() == net.layer_count());
  CHECK(loaded.output_activation() == net.output_activation());
  CHECK(loaded.normalization().log_input == net.normalization().log_input);
  CHECK(loaded.normalization().mean == net.normalization().mean);
  CHECK(loaded.normalization().inv_std == net.normalization().inv_std);
  for (int l = 0; l < net.layer_count(); ++l) {
    CHECK(loaded.layers()[static_cast<size_t>(l)].weights ==
          net.layers()[static_cast<size_t>(l)].weights);
    CHECK(loaded.layers()[static_cast<size_t>(l)].bias ==
          net.layers()[static_cast<size_t>(l)].bias);
  }

  const auto copy = tmp.path() / "net2.rlsenet";
  save_network(copy, loaded);
  CHECK(rlse_test::read_file(path) == rlse_test::read_file(copy));

  for (const auto& x : in) {
    CHECK(loaded.forward(x) == net.forward(x));
  }
}

TEST_SUITE_END();
