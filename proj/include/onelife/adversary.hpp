#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "onelife/types.hpp"

namespace onelife {

// Predicts the probability that the next bit is 1, as an interval, from the
// bits emitted so far.
class IntervalPredictor {
 public:
  virtual ~IntervalPredictor() = default;
  virtual ProbabilityInterval predict(std::span<const std::uint8_t> prefix) = 0;
};

class ConstantPredictor final : public IntervalPredictor {
 public:
  explicit ConstantPredictor(ProbabilityInterval iv) : iv_(iv) {}
  ProbabilityInterval predict(std::span<const std::uint8_t>) override { return iv_; }

 private:
  ProbabilityInterval iv_;
};

// Predicts [m - halfwidth, m + halfwidth] clipped to [0, 1], where m is the
// running mean of the prefix (0.5 on the empty prefix).
class RunningMeanPredictor final : public IntervalPredictor {
 public:
  explicit RunningMeanPredictor(double halfwidth = 0.1) : halfwidth_(halfwidth) {}
  ProbabilityInterval predict(std::span<const std::uint8_t> prefix) override;

 private:
  double halfwidth_;
};

// Binary stream from a two-dice adversary playing against a predictor.
//
// The adversary owns two dice with success probabilities dice_low <=
// dice_high and tries to keep the running frequency of its output from
// settling inside anything the predictor commits to. It plays in campaigns:
// a campaign targets one edge of the interval the predictor committed to
// when the campaign started, throwing dice_low to drive the running
// frequency strictly below the low edge (or dice_high to drive it above the
// high edge). When the target edge is crossed the adversary re-queries the
// predictor and opens a campaign on the opposite side; sides that cannot be
// crossed (the dice mean is not beyond the edge) are skipped, and if neither
// side can be crossed it keeps throwing the die whose mean lies farther
// outside the committed interval (ties favor dice_low). With dice_low =
// dice_high = p this degenerates to i.i.d. Bernoulli(p); with 0 and 1
// against an interval predictor the running frequency zig-zags forever.
//
// Deterministic given the seed.
std::vector<std::uint8_t> adversarial_stream(double dice_low, double dice_high,
                                             IntervalPredictor& predictor, std::size_t length,
                                             std::uint64_t seed);

// Means of consecutive disjoint windows; the tail shorter than `window` is
// dropped.
std::vector<double> window_means(std::span<const std::uint8_t> bits, std::size_t window);

}  // namespace onelife
