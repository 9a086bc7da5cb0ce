#include <doctest.h>

#include "rlse/error.hpp"
#include "rlse/mask.hpp"
#include "rlse/rng.hpp"

using namespace rlse;

namespace {

BitVector random_bits(Rng& rng, size_t n) {
  BitVector v(n);
  for (size_t i = 0; i < n; ++i) v.set(i, rng.uniform_index(2) == 1);
  return v;
}

}  // namespace

TEST_SUITE_BEGIN("mask");

TEST_CASE("compute_ibm evaluates the log-domain step") {
  Eigen::VectorXd clean(2), noise(2);
  clean << 4, 1;
  noise << 2, 3;
  const auto m = compute_ibm(clean, noise);
  CHECK(m.get(0));
  CHECK_FALSE(m.get(1));
}

TEST_CASE("equality keeps the bit set (step(0) = 1)") {
  Eigen::VectorXd v(3);
  v << 0.5, 2.0, 7.0;
  const auto m = compute_ibm(v, v);
  for (size_t i = 0; i < 3; ++i) CHECK(m.get(i));
}

TEST_CASE("floored noise against positive clean gives all ones") {
  Eigen::VectorXd clean(4), noise(4);
  clean << 1.0, 0.1, 3.0, 1e-3;
  noise << 0.0, 1e-13, 0.0, 1e-12;  // all below the log floor
  const auto m = compute_ibm(clean, noise);
  for (size_t i = 0; i < 4; ++i) CHECK(m.get(i));
}

TEST_CASE("ibm is invariant to a common positive scaling") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd clean(16), noise(16);
    for (int i = 0; i < 16; ++i) {
      clean[i] = rng.uniform_real(1e-8, 10.0);
      noise[i] = rng.uniform_real(1e-8, 10.0);
    }
    const double scale = rng.uniform_real(0.01, 100.0);
    const auto a = compute_ibm(clean, noise);
    const auto b = compute_ibm(scale * clean, scale * noise);
    CHECK(a == b);
  }
}

TEST_CASE("apply_mask zeroes exactly the cleared positions") {
  Eigen::VectorXd noisy(3);
  noisy << 3, 5, 2;
  const auto mask = BitVector::from_bools({1, 0, 1});
  const Eigen::VectorXd out = apply_mask(noisy, mask);
  CHECK(out[0] == 3.0);
  CHECK(out[1] == 0.0);
  CHECK(out[2] == 2.0);

  const auto ones = BitVector::from_bools({1, 1, 1});
  CHECK(apply_mask(noisy, ones) == noisy);
  const auto zeros = BitVector::from_bools({0, 0, 0});
  CHECK(apply_mask(noisy, zeros).isZero(0.0));
}

TEST_CASE("hamming distance examples") {
  const auto a = BitVector::from_bools({1, 0, 1, 1});
  const auto b = BitVector::from_bools({1, 1, 1, 0});
  CHECK(hamming_distance(a, b) == 2);
  CHECK(hamming_distance(a, a) == 0);

  BitVector complement(a.size());
  for (size_t i = 0; i < a.size(); ++i) complement.set(i, !a.get(i));
  CHECK(hamming_distance(a, complement) == a.size());

  CHECK_THROWS_AS(hamming_distance(a, BitVector(3)), DataError);
}

TEST_CASE("hamming distance is a metric") {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t dim = 1 + rng.uniform_index(130);  // crosses the 64-bit block boundary
    const auto x = random_bits(rng, dim);
    const auto y = random_bits(rng, dim);
    const auto z = random_bits(rng, dim);

    CHECK(hamming_distance(x, y) == hamming_distance(y, x));
    CHECK((hamming_distance(x, y) == 0) == (x == y));
    CHECK(hamming_distance(x, z) <= hamming_distance(x, y) + hamming_distance(y, z));
  }
}

TEST_CASE("packed bits agree with a per-position count") {
  Rng rng(123);
  for (int trial = 0; trial < 40; ++trial) {
    const size_t dim = 1 + rng.uniform_index(200);
    const auto x = random_bits(rng, dim);
    const auto y = random_bits(rng, dim);
    size_t expected = 0;
    for (size_t i = 0; i < dim; ++i) expected += x.get(i) != y.get(i) ? 1 : 0;
    CHECK(hamming_distance(x, y) == expected);
  }
}

TEST_SUITE_END();
