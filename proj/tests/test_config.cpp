#include <doctest.h>

#include "rlse/config.hpp"
#include "rlse/error.hpp"

using namespace rlse;

TEST_SUITE_BEGIN("config");

TEST_CASE("defaults resolve to the reference dimensions") {
  ExperimentConfig cfg;
  cfg.resolve();
  CHECK(cfg.p == 2);
  CHECK(cfg.context_chunks == 5);
  CHECK(cfg.network_input_dim() == 640);  // 64 * 2 * 5
  CHECK(cfg.mask_dim() == 128);
  CHECK(cfg.clusters == 32);
  CHECK(cfg.alpha == 10.0);
  CHECK(cfg.stft.frame_length == 512);
  CHECK(cfg.stft.hop == 256);
  CHECK(cfg.snr_train_db == 5.0);
  REQUIRE(cfg.snr_test_db.size() == 2);

  ExperimentConfig p1 = parse_config_text("p = 1\n");
  CHECK(p1.context_chunks == 11);
  CHECK(p1.network_input_dim() == 704);  // 64 * 1 * 11
  CHECK(p1.mask_dim() == 64);
}

TEST_CASE("shared-mask mode reduces the mask dimension only") {
  ExperimentConfig cfg = parse_config_text("p = 2\nshared_mask = true\n");
  CHECK(cfg.mask_dim() == 64);
  CHECK(cfg.network_input_dim() == 640);
}

TEST_CASE("parsing accepts comments, lists and booleans") {
  const auto cfg = parse_config_text(
      "# comment line\n"
      "seed = 99   # trailing comment\n"
      "snr_test_db = 0, 5, 10\n"
      "pretrain_hidden = 64, 32\n"
      "shared_mask = true\n"
      "\n");
  CHECK(cfg.seed == 99);
  REQUIRE(cfg.snr_test_db.size() == 3);
  CHECK(cfg.snr_test_db[2] == 10.0);
  REQUIRE(cfg.pretrain_hidden.size() == 2);
  CHECK(cfg.pretrain_hidden[1] == 32);
  CHECK(cfg.shared_mask);
}

TEST_CASE("unknown keys and malformed values are rejected") {
  CHECK_THROWS_AS(parse_config_text("banana = 3\n"), DataError);
  CHECK_THROWS_AS(parse_config_text("p = two\n"), DataError);
  CHECK_THROWS_AS(parse_config_text("p 2\n"), DataError);
  CHECK_THROWS_AS(parse_config_text("shared_mask = yes\n"), DataError);
  CHECK_THROWS_AS(parse_config_text("alpha =\n"), DataError);
}

TEST_CASE("declared input_dim must agree with the feature dimensions") {
  CHECK_NOTHROW(parse_config_text("p = 2\ncontext_chunks = 5\ninput_dim = 640\n"));
  CHECK_THROWS_AS(parse_config_text("p = 2\ncontext_chunks = 5\ninput_dim = 704\n"), DataError);
  CHECK_THROWS_AS(parse_config_text("p = 1\ninput_dim = 640\n"), DataError);
}

TEST_CASE("invariant violations are rejected") {
  CHECK_THROWS_AS(parse_config_text("p = 0\n"), DataError);
  CHECK_THROWS_AS(parse_config_text("p = 3\n"), DataError);  // no default context for p=3
  CHECK_NOTHROW(parse_config_text("p = 3\ncontext_chunks = 4\n"));
  CHECK_THROWS_AS(parse_config_text("clusters = 1\n"), DataError);
  CHECK_THROWS_AS(parse_config_text("alpha = 0\n"), DataError);
  CHECK_THROWS_AS(parse_config_text("test_fraction = 1.5\n"), DataError);
  CHECK_THROWS_AS(parse_config_text("hop = 0\n"), DataError);
  CHECK_THROWS_AS(parse_config_text("rl_epochs = 0\n"), DataError);
}

TEST_CASE("serialization round-trips every field") {
  ExperimentConfig cfg = parse_config_text(
      "seed = 123\np = 1\nclusters = 16\nalpha = 2.5\nsnr_test_db = -5, 0\n"
      "pretrain_epochs = 7\nrl_learning_rate = 0.125\nshared_mask = true\njobs = 3\n");
  const std::string text = config_to_text(cfg);
  const ExperimentConfig back = parse_config_text(text);
  CHECK(config_to_text(back) == text);
  CHECK(back.seed == 123);
  CHECK(back.p == 1);
  CHECK(back.context_chunks == 11);
  CHECK(back.clusters == 16);
  CHECK(back.alpha == 2.5);
  CHECK(back.snr_test_db == std::vector<double>{-5.0, 0.0});
  CHECK(back.rl_learning_rate == 0.125);
  CHECK(back.shared_mask);
  CHECK(back.jobs == 3);
}

TEST_SUITE_END();
