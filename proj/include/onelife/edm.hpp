#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "onelife/history.hpp"
#include "onelife/types.hpp"
#include "onelife/world.hpp"

namespace onelife {

enum class EventKind { Visible, SemiVisible, Invisible };

const char* to_string(EventKind k);
EventKind event_kind_from_string(const std::string& s);

struct EventDecl {
  std::string name;
  EventKind kind = EventKind::Visible;
};

// Candidate world description: a digraph whose arrows are labeled by events.
// Missing (state, event) arrows are model content — advancing on such an
// event stays put and is reported as a notice, and state estimation treats
// it as evidence against being in that state.
struct EventDrivenModel {
  std::vector<std::string> state_names;
  std::vector<EventDecl> events;
  std::optional<StateId> outside;
  StateId start = 0;
  // arrows[s][e] = target states, in declaration order (the order oracle
  // choices index into)
  std::vector<std::vector<std::vector<StateId>>> arrows;
  std::optional<std::vector<std::string>> expected_obs;  // per-state tag

  int num_states() const { return static_cast<int>(state_names.size()); }
  int num_events() const { return static_cast<int>(events.size()); }

  StateId state_id(const std::string& name) const;
  EventId event_id(const std::string& name) const;
  void add_arrow(StateId s, EventId e, StateId target);
  const std::vector<StateId>& targets(StateId s, EventId e) const { return arrows[s][e]; }
  void validate() const;

  // "Do I see the object now?"
  bool seen(StateId current) const { return !outside || current != *outside; }
};

// How simultaneous events in one tick are resolved.
enum class SimultaneityPolicy {
  SequenceLexicographic,  // apply all, ordered by event name
  ObscureKeepFirst        // keep only the lexicographically first event
};

struct EdmOracle {
  const TransitionOracle* alpha = nullptr;  // required
  SimultaneityPolicy policy = SimultaneityPolicy::SequenceLexicographic;
};

struct AdvanceResult {
  StateId state = kNoState;
  int no_arrow_events = 0;  // events offered with no outgoing arrow
};

// Advances one tick. Empty event set: identity. Singleton: the oracle picks
// among the arrows, or the state stays put (with a notice) when there are
// none. Multiple events: resolved per the oracle's simultaneity policy.
AdvanceResult advance(const EventDrivenModel& m, StateId current, std::span<const EventId> events,
                      const EdmOracle& oracle, int t = 0, std::uint64_t past_digest = 0,
                      const RealizedFuture* future = nullptr);

struct Tick {
  int t = 0;  // 1-based moment
  std::vector<EventId> events;  // indices into the stream's own event_names
};

// Sparse record of which events fired at which moments; moments with no
// events are omitted. Ticks index the stream's declared event list, so a
// stream can be aligned by name to any model's alphabet.
struct EventStream {
  int total_steps = 0;
  std::vector<std::string> event_names;
  std::vector<Tick> ticks;

  int num_events() const { return static_cast<int>(event_names.size()); }
  void validate() const;
};

// Maps each stream event index to the model's event id (input error when the
// model does not declare a stream event).
std::vector<EventId> map_stream_events(const EventStream& stream, const EventDrivenModel& m);

struct VariableDecl {
  std::string name;
  std::vector<std::string> domain;
};

// Mixed-radix packed variable assignment; the last declared variable varies
// fastest.
using EvalIndex = std::int64_t;

struct Evaluation {
  std::vector<int> values;  // index into each variable's domain
};

// Event-driven model extended with finite-domain variables. The update table
// is the dynamics; absent entries mean no arrow (stay put). With no
// variables the base model's arrows are the dynamics.
struct VariablesModel {
  EventDrivenModel base;
  std::vector<VariableDecl> variables;
  std::map<std::tuple<StateId, EvalIndex, EventId>, std::vector<std::pair<StateId, EvalIndex>>>
      update;
  EvalIndex start_eval = 0;

  EvalIndex eval_count() const;
  Evaluation unpack(EvalIndex idx) const;
  EvalIndex pack(const Evaluation& e) const;
  std::string eval_name(EvalIndex idx) const;  // "x=v,y=w" in declaration order
  std::vector<std::pair<StateId, EvalIndex>> choices(StateId s, EvalIndex eval, EventId e) const;
  void validate() const;
};

struct VmConfig {
  StateId state = kNoState;
  EvalIndex eval = 0;

  bool operator==(const VmConfig&) const = default;
};

struct VmAdvanceResult {
  VmConfig config;
  int no_arrow_events = 0;
};

VmAdvanceResult advance(const VariablesModel& m, VmConfig current, std::span<const EventId> events,
                        const EdmOracle& oracle, int t = 0, std::uint64_t past_digest = 0);

// Expands a variables model into a plain event-driven model over
// (state, evaluation) pairs. Flattened state id = state * eval_count + eval;
// arrow order follows the update-choice order, so the flattened model and
// the variables model make corresponding oracle choices under the same seed.
EventDrivenModel flatten(const VariablesModel& m, std::int64_t state_bound = 1000000);

// Bridges a recorded life to an event stream. Visible members fire per
// occurred(); semi-visible events also fire at transcript marks; invisible
// events require a transcript.
struct EventDef {
  std::string name;
  EventKind kind = EventKind::Visible;
  std::vector<SuffixPattern> members;  // empty for invisible events

  static EventDef from(const VisibleEvent& e) {
    return {e.name, EventKind::Visible, e.members};
  }
  static EventDef from(const SemiVisibleEvent& e) {
    return {e.name, EventKind::SemiVisible, e.visible_part.members};
  }
};

struct ChiTranscript {
  std::map<std::string, std::set<int>> marks;  // event name -> 1-based moments
};

EventStream project_events(const History& h, std::span<const EventDef> defs,
                           const ChiTranscript* chi = nullptr);

struct EdmRun {
  std::vector<StateId> path;  // one entry per tick, plus the start
  int no_arrow_notices = 0;
};

// Folds advance over the ticks of a stream (events matched to the model by
// name). path.size() == ticks + 1.
EdmRun simulate_edm(const EventDrivenModel& m, const EventStream& stream, const EdmOracle& oracle,
                    StateId start);

// State at every moment 0..total_steps (holding between ticks), plus the
// arrows actually traversed at each moment. This is the dense bridge from a
// sparse stream to per-moment statistics.
struct ArrowUse {
  StateId src = kNoState;
  std::int32_t label = -1;
  StateId dst = kNoState;

  auto operator<=>(const ArrowUse&) const = default;
};

struct Timeline {
  std::vector<StateId> state_at;           // size total_steps + 1; [0] = start
  std::vector<std::vector<ArrowUse>> uses;  // size total_steps + 1; [0] unused
  int no_arrow_notices = 0;
};

Timeline edm_timeline(const EventDrivenModel& m, const EventStream& stream,
                         const EdmOracle& oracle, StateId start);

}  // namespace onelife
