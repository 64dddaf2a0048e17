#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "onelife/types.hpp"

namespace onelife {

// One completed step: the moves tried and rejected since the previous
// observation, then the accepted action and what it revealed. Bad sets are
// kept sorted ascending (canonical form for printing and comparison).
struct HistoryStep {
  std::vector<ActionId> bad_before;
  ActionId action = -1;
  ObsId observation = -1;

  bool operator==(const HistoryStep&) const = default;
};

// A chosen action whose observation has not arrived yet, preceded by the
// rejections tried at the current moment.
struct PendingStep {
  std::vector<ActionId> bad;
  ActionId action = -1;

  bool operator==(const PendingStep&) const = default;
};

// The agent's single life as the agent saw it. Moments are 1-based: moment t
// is the point just after observing steps[t-1].observation.
struct History {
  std::vector<HistoryStep> steps;
  std::optional<PendingStep> pending;

  int step_count() const { return static_cast<int>(steps.size()); }
  bool operator==(const History&) const = default;
};

struct FullStep {
  std::vector<ActionId> full_before;  // the complete incorrect set at that moment
  ActionId action = -1;
  ObsId observation = -1;
};

struct FullPending {
  std::vector<ActionId> full;
  ActionId action = -1;
};

// History with every tried-bad subset replaced by the complete incorrect set
// the world held at that moment.
struct FullHistory {
  std::vector<FullStep> steps;
  std::optional<FullPending> pending;
};

// The last k steps of some history.
struct LocalHistory {
  std::vector<HistoryStep> suffix;

  int length() const { return static_cast<int>(suffix.size()); }
};

struct TruncatedHistory {
  std::vector<std::pair<ActionId, ObsId>> moves;
  std::optional<ActionId> pending_action;

  // Tokens in the action/observation alternation: two per completed step
  // plus the trailing chosen action if any.
  std::int64_t token_count() const {
    return 2 * static_cast<std::int64_t>(moves.size()) + (pending_action ? 1 : 0);
  }
};

// Template for the bad-set slot of one pattern element.
struct BadPattern {
  enum class Kind { Any, Contains, Equals };
  Kind kind = Kind::Any;
  ActionId contains = -1;
  std::vector<ActionId> equals;  // sorted

  static BadPattern any() { return {}; }
  static BadPattern containing(ActionId a) { return {Kind::Contains, a, {}}; }
  static BadPattern exactly(std::vector<ActionId> set) {
    std::sort(set.begin(), set.end());
    return {Kind::Equals, -1, std::move(set)};
  }

  bool matches(std::span<const ActionId> bad) const;
};

// One element of a suffix pattern. nullopt fields are wildcards.
struct StepPattern {
  BadPattern bad;
  std::optional<ActionId> action;
  std::optional<ObsId> observation;
};

using SuffixPattern = std::vector<StepPattern>;

// A visible event: a finite set of fixed-length suffix templates. The event
// holds at a moment iff the history up to that moment ends with a suffix
// matching any member.
struct VisibleEvent {
  std::string name;
  std::vector<SuffixPattern> members;

  void validate() const;
};

// An event with a visible part that implies it; the remainder is resolved by
// an event-occurrence transcript.
struct SemiVisibleEvent {
  std::string name;
  VisibleEvent visible_part;
};

// Ground-truth state path of one life: the state before the first move plus
// the state entered by each successful move.
struct StatePath {
  StateId start = kNoState;
  std::vector<StateId> visited;

  int moves() const { return static_cast<int>(visited.size()); }
  StateId state_before_move(int i) const {  // i in [0, moves)
    return i == 0 ? start : visited[i - 1];
  }
  StateId final_state() const { return visited.empty() ? start : visited.back(); }
};

// A summary of a long history: its tail, when tracked events fired, and
// gross per-label counters.
struct ApproximateHistory {
  LocalHistory tail;
  std::map<std::string, std::vector<int>> event_moments;  // 1-based moments
  std::map<ActionId, std::int64_t> action_counts;
  std::map<ObsId, std::int64_t> observation_counts;
};

struct ApproximateConfig {
  int tail_length = 0;
  std::vector<VisibleEvent> tracked;
};

TruncatedHistory truncated(const History& h);

LocalHistory local(const History& h, int k);

// Rebuilds the complete incorrect sets along a recorded life from world-side
// knowledge. `incorrect_of` must return the incorrect set of a state, sorted.
// Throws ConsistencyError if some tried-bad set is not contained in the
// recomputed full set.
FullHistory full_from_trace(const History& h, const StatePath& path,
                            const std::function<std::vector<ActionId>(StateId)>& incorrect_of);

// True iff the prefix of h up to moment t ends with a suffix matching some
// member of the event. When t equals the step count and a pending step
// exists, the pending (bad set, chosen action) is matchable as a final
// partial element; pattern elements aligned to it must leave the observation
// slot wildcard.
bool occurred(const VisibleEvent& event, const History& h, int t);

ApproximateHistory approximate(const History& h, const ApproximateConfig& config);

std::uint64_t history_digest(const History& h);

}  // namespace onelife
