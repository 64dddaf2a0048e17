#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "onelife/history.hpp"
#include "onelife/types.hpp"

namespace onelife {

// One criterion's score at one step: a real number or Undef (no score at
// this step). Undef is never a zero; steps without a score simply do not
// enter the mean.
using Score = std::optional<double>;
using ScoreVector = std::vector<Score>;

// Per-step score vectors of one life; fixed arity.
struct ScoreSequence {
  std::size_t arity = 0;
  std::vector<ScoreVector> rows;

  void push(ScoreVector row);
  std::int64_t length() const { return static_cast<std::int64_t>(rows.size()); }
};

// Total mapping observation -> score vector.
struct RewardMap {
  std::size_t arity = 0;
  std::vector<ScoreVector> by_observation;
};

ScoreSequence score_life(const History& h, const RewardMap& rewards);

// Per-coordinate arithmetic mean over the steps where that coordinate is
// defined; Undef when no step defines it.
ScoreVector life_mean(const ScoreSequence& scores);
ScoreVector life_mean_prefix(const ScoreSequence& scores, std::int64_t k);

enum class Relation { Better, Worse, Equal, Incomparable };

const char* to_string(Relation r);

struct CompareMode {
  enum class Kind { Pareto, Lexicographic };
  Kind kind = Kind::Pareto;
  std::vector<std::size_t> priority;  // lexicographic only, most important first
};

// Pareto: Better iff >= on every compared coordinate and > on at least one;
// coordinates pulling in different directions are Incomparable.
// Lexicographic: compare by priority, falling through ties. In both modes a
// coordinate where one side is Undef and the other is a number makes the
// vectors Incomparable; both-Undef coordinates are ties.
Relation compare_finite(const ScoreVector& v1, const ScoreVector& v2, const CompareMode& mode);

enum class LifeRelation { Better, Worse, Equal, Incomparable, Undetermined };

struct LifeVerdict {
  LifeRelation relation = LifeRelation::Undetermined;
  std::optional<std::int64_t> witness;  // present only for better/worse/equal

  std::string to_string() const;  // "relation" or "relation,n=witness"
};

// Default schedule of prefix lengths: 1, 2, 4, ..., 2^20.
std::vector<std::int64_t> default_horizon_schedule();

// Compares two lives by their prefix means over the schedule. The verdict is
// the relation at the largest scheduled k, provided the last
// `stability_window` scheduled comparisons agree; otherwise Undetermined
// (the dominance has not stabilized within the schedule). The witness is 0
// when the relation holds at every scheduled k, else one past the largest
// scheduled k where it fails. Prefixes beyond a life's length are the whole
// life. No discounting enters anywhere: prefix means are plain arithmetic
// means, and which life is better is decided by the tail of the schedule,
// not by weighting early steps.
LifeVerdict compare_lives(const ScoreSequence& life1, const ScoreSequence& life2,
                          const CompareMode& mode, std::span<const std::int64_t> schedule,
                          int stability_window = 3);

}  // namespace onelife
