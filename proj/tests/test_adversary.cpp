#include "doctest.h"

#include <algorithm>

#include "onelife/adversary.hpp"

using namespace onelife;

namespace {

double mean(std::span<const std::uint8_t> bits) {
  std::int64_t ones = 0;
  for (auto b : bits) ones += b;
  return bits.empty() ? 0.0 : static_cast<double>(ones) / static_cast<double>(bits.size());
}

}  // namespace

TEST_CASE("equal dice degenerate to an i.i.d. coin") {
  ConstantPredictor pred({0.25, 0.35});
  const auto bits = adversarial_stream(0.3, 0.3, pred, 10000, 42);
  CHECK(bits.size() == 10000);
  CHECK(mean(bits) == doctest::Approx(0.3).epsilon(0.2));
  CHECK(std::abs(mean(bits) - 0.3) <= 0.05);
}

TEST_CASE("zero length gives the empty stream") {
  ConstantPredictor pred({0.0, 1.0});
  CHECK(adversarial_stream(0.0, 1.0, pred, 0, 1).empty());
}

TEST_CASE("invalid dice are rejected") {
  ConstantPredictor pred({0.4, 0.6});
  CHECK_THROWS_AS(adversarial_stream(0.8, 0.2, pred, 10, 1), InputError);
  CHECK_THROWS_AS(adversarial_stream(-0.1, 0.5, pred, 10, 1), InputError);
}

TEST_CASE("constant symmetric predictor gets extreme alternating runs") {
  ConstantPredictor pred({0.4, 0.6});
  const auto bits = adversarial_stream(0.0, 1.0, pred, 10000, 7);
  const auto means = window_means(bits, 100);
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < means.size(); ++i) {
    best = std::max(best, std::abs(means[i + 1] - means[i]));
  }
  CHECK(best >= 0.8);
}

TEST_CASE("running-mean predictor is kept from settling") {
  RunningMeanPredictor pred(0.1);
  const auto bits = adversarial_stream(0.0, 1.0, pred, 20000, 7);
  const auto means = window_means(bits, 500);
  const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
  CHECK(*hi - *lo >= 0.5);
}

TEST_CASE("streams are deterministic per seed") {
  RunningMeanPredictor p1(0.1), p2(0.1);
  CHECK(adversarial_stream(0.2, 0.9, p1, 5000, 13) == adversarial_stream(0.2, 0.9, p2, 5000, 13));
}

TEST_CASE("frequency leaves any proper subinterval the predictor commits to") {
  // fooled predictor: commits to [0.45, 0.55] forever
  ConstantPredictor pred({0.45, 0.55});
  const auto bits = adversarial_stream(0.0, 1.0, pred, 20000, 3);
  // running frequency crosses both edges repeatedly
  std::int64_t ones = 0;
  bool below = false, above = false;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    ones += bits[i];
    const double f = static_cast<double>(ones) / static_cast<double>(i + 1);
    if (i > 100) {
      below = below || f < 0.45;
      above = above || f > 0.55;
    }
  }
  CHECK(below);
  CHECK(above);
}
