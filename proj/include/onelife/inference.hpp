#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "onelife/edm.hpp"
#include "onelife/types.hpp"
#include "onelife/world.hpp"

namespace onelife {

// The traversed part of a model: visited states and used arrows with exact
// traversal counts.
struct AbridgedModel {
  std::vector<StateId> kept_states;  // sorted
  std::map<std::tuple<StateId, std::int32_t, StateId>, std::int64_t> arrow_counts;
  std::map<StateId, std::int64_t> state_counts;

  std::int64_t total_transitions() const;
  std::int64_t total_visits() const;
};

// Builds the abridged model of a node path (start state plus the state after
// each transition) with per-transition labels. `arrow_exists(s, label, s2)`
// validates the path against the source model.
AbridgedModel abridge(std::span<const StateId> node_path, std::span<const std::int32_t> labels,
                      const std::function<bool(StateId, std::int32_t, StateId)>& arrow_exists);

AbridgedModel abridge(const PerfectWorld& w, const LifeRecord& life);
AbridgedModel abridge(const RandomWorld& w, const LifeRecord& life);
AbridgedModel abridge(const EventDrivenModel& m, const Timeline& tl);

// Dense per-moment view of a recorded life, aligned with its event stream.
Timeline life_timeline(const LifeRecord& life);

struct Counts {
  double occurrences = 0.0;
  double opportunities = 0.0;

  double frequency() const { return opportunities > 0 ? occurrences / opportunities : 0.0; }
  bool operator==(const Counts&) const = default;
};

// Per-(state, event) counters over every moment, and per-(arrow, event,
// offset) counters around each arrow traversal. Offsets run over
// [-window, +window] excluding 0: the offset-0 cell is already covered by
// the state-level counter of the arrow's source.
struct TraceStatistics {
  int window = 0;
  bool approximate = false;  // agent-side fractional opportunities
  double total_moments = 0.0;
  std::map<EventId, double> event_totals;  // occurrences across all moments
  std::map<std::pair<StateId, EventId>, Counts> state_stats;
  std::map<std::tuple<ArrowUse, EventId, int>, Counts> window_stats;

  double global_frequency(EventId e) const;
};

// Exact world-side statistics from a committed timeline. The OpenMP kernel;
// identical output to collect_reference.
TraceStatistics collect(const Timeline& tl, const EventStream& stream, int window);

// Serial reference implementation (a direct nested scan), kept for testing
// and benchmarking against the parallel kernel.
TraceStatistics collect_reference(const Timeline& tl, const EventStream& stream, int window);

// Agent-side statistics: the current state is unknown, so each moment's
// opportunity is split over the estimated state set (1/|set| each).
// State-level only; the agent cannot attribute arrow traversals.
TraceStatistics collect_fractional(const EventDrivenModel& m, const EventStream& stream);

enum class BaselineMode { GlobalFrequency, UniformOverEvents };

struct DetectParams {
  double min_support = 30.0;
  double threshold = 3.0;
  BaselineMode baseline = BaselineMode::GlobalFrequency;
};

// One statistically detectable excursion of an event frequency from its
// baseline at a state or around an arrow.
struct TraceFinding {
  bool state_level = true;
  StateId state = kNoState;  // state-level location
  ArrowUse arrow;            // arrow-level location
  int offset = 0;
  EventId event = -1;
  double empirical = 0.0;
  double baseline = 0.0;
  double support = 0.0;
  double deviation = 0.0;

  // `label_names` names arrow labels (actions for world lives, events for
  // model timelines).
  std::string location_string(std::span<const std::string> state_names,
                              std::span<const std::string> label_names) const;
};

// Scores every counter with the two-proportion deviation
// |empirical - baseline| / sqrt(baseline * (1 - baseline) / support + eps),
// keeps entries with support >= min_support and deviation >= threshold, and
// sorts by deviation descending (ties by location string, then event name).
std::vector<TraceFinding> detect_trace(const TraceStatistics& stats, const DetectParams& params,
                                       std::span<const std::string> state_names,
                                       std::span<const std::string> label_names,
                                       std::span<const std::string> event_names);

// 0 iff there are no findings (the model has no trace and is inadequate);
// otherwise the maximum deviation.
double adequacy(std::span<const TraceFinding> findings);

// Set of states the model admits after the prefix: fold every tick over all
// admissible starts, dropping states with no arrow for a fired event. An
// empty result means the stream contradicts the model.
std::set<StateId> estimate_state(const EventDrivenModel& m, const EventStream& prefix,
                                 bool assume_outside_start = false);

// Estimated set after each moment 0..total_steps.
std::vector<std::set<StateId>> estimate_timeline(const EventDrivenModel& m,
                                                 const EventStream& stream,
                                                 bool assume_outside_start = false);

enum class PastVerdict { PastIndependentAtLag, PastDependent, Inconclusive };

const char* to_string(PastVerdict v);

struct PastIndependenceResult {
  PastVerdict verdict = PastVerdict::Inconclusive;
  double worst_p = 1.0;
  StateId worst_state = kNoState;
  int states_tested = 0;  // states with a non-degenerate contingency table
};

// Chi-square independence test of (previous `lag` ticks) x (current tick),
// per state, Bonferroni-corrected across the tested states. States whose
// table is degenerate (a single distinct past or a single distinct outcome)
// carry no evidence of past dependence and never reject. Inconclusive when
// fewer than `min_samples` usable moments exist overall.
PastIndependenceResult past_independence_test(const Timeline& tl, const EventStream& stream,
                                              int lag, double significance, int min_samples = 8);

// Desired trace constraint: from `state`, arrows labeled `event` carry this
// sampling weight; weight 0 removes them.
struct TraceConstraint {
  StateId state = kNoState;
  EventId event = -1;
  double weight = 0.0;
};

// Transition oracle reverse-engineered from a desired trace. As a
// TransitionOracle it resolves a given event's arrows; as a generator it
// also picks which event fires next. Arrows inconsistent with the
// constraints (and, when a realized future is supplied, with the next
// recorded label) are removed; survivors are sampled proportionally to
// weight. With no survivor the least-violating arrow is chosen and the
// deviation is counted.
class ReverseOracle final : public TransitionOracle {
 public:
  ReverseOracle(const EventDrivenModel& m, std::vector<TraceConstraint> constraints,
                std::uint64_t seed);

  StateId choose(const TransitionChoice& q) const override;
  std::shared_ptr<const TransitionOracle> with_seed(std::uint64_t seed) const override;

  struct OutgoingArrow {
    EventId event = -1;
    StateId target = kNoState;
  };
  OutgoingArrow generate(StateId state, int t, const RealizedFuture* future = nullptr) const;

  int fallback_count() const { return fallbacks_; }

 private:
  double arrow_weight(StateId state, EventId event) const;

  const EventDrivenModel* model_;
  std::vector<TraceConstraint> constraints_;
  std::uint64_t seed_;
  mutable int fallbacks_ = 0;
};

struct GeneratedRun {
  EventStream stream;            // singleton ticks at every moment
  std::vector<StateId> states;   // state after each moment; [0] = start
  int fallbacks = 0;
};

// Generates `ticks` moments by letting the oracle pick one outgoing arrow
// per moment from the current state.
GeneratedRun generate_run(const EventDrivenModel& m, const ReverseOracle& oracle, int ticks,
                          StateId start);

}  // namespace onelife
