#include "onelife/adversary.hpp"

#include <algorithm>

#include "onelife/rng.hpp"

namespace onelife {

ProbabilityInterval RunningMeanPredictor::predict(std::span<const std::uint8_t> prefix) {
  double m = 0.5;
  if (!prefix.empty()) {
    std::int64_t ones = 0;
    for (std::uint8_t b : prefix) ones += b;
    m = static_cast<double>(ones) / static_cast<double>(prefix.size());
  }
  return {std::max(0.0, m - halfwidth_), std::min(1.0, m + halfwidth_)};
}

namespace {

double dist_outside(double p, const ProbabilityInterval& iv) {
  return std::max({0.0, iv.low - p, p - iv.high});
}

enum class Goal { Low, High };

struct Campaign {
  Goal goal;
  double edge;  // committed edge to cross
};

Campaign open_campaign(double a, double b, const ProbabilityInterval& iv, const Goal* previous) {
  const bool can_low = a < iv.low;
  const bool can_high = b > iv.high;
  Goal g;
  if (can_low && can_high) {
    g = (previous && *previous == Goal::Low) ? Goal::High : Goal::Low;
  } else if (can_low) {
    g = Goal::Low;
  } else if (can_high) {
    g = Goal::High;
  } else {
    // neither edge crossable: throw the die farther outside; ties -> low
    g = dist_outside(b, iv) > dist_outside(a, iv) ? Goal::High : Goal::Low;
  }
  return {g, g == Goal::Low ? iv.low : iv.high};
}

}  // namespace

std::vector<std::uint8_t> adversarial_stream(double dice_low, double dice_high,
                                             IntervalPredictor& predictor, std::size_t length,
                                             std::uint64_t seed) {
  if (!(0.0 <= dice_low && dice_low <= dice_high && dice_high <= 1.0)) {
    throw InputError("adversarial_stream: need 0 <= dice_low <= dice_high <= 1");
  }
  Rng rng = Rng(seed).substream("creature");
  std::vector<std::uint8_t> out;
  out.reserve(length);
  std::int64_t ones = 0;

  Campaign c = open_campaign(dice_low, dice_high, predictor.predict(out), nullptr);
  for (std::size_t i = 0; i < length; ++i) {
    if (!out.empty()) {
      const double f = static_cast<double>(ones) / static_cast<double>(out.size());
      const bool crossed = (c.goal == Goal::Low) ? f < c.edge : f > c.edge;
      if (crossed) {
        const Goal prev = c.goal;
        c = open_campaign(dice_low, dice_high, predictor.predict(out), &prev);
      }
    }
    const double p = (c.goal == Goal::Low) ? dice_low : dice_high;
    const std::uint8_t bit = rng.bernoulli(p) ? 1 : 0;
    out.push_back(bit);
    ones += bit;
  }
  return out;
}

std::vector<double> window_means(std::span<const std::uint8_t> bits, std::size_t window) {
  std::vector<double> out;
  if (window == 0) return out;
  for (std::size_t start = 0; start + window <= bits.size(); start += window) {
    std::int64_t ones = 0;
    for (std::size_t i = start; i < start + window; ++i) ones += bits[i];
    out.push_back(static_cast<double>(ones) / static_cast<double>(window));
  }
  return out;
}

}  // namespace onelife
