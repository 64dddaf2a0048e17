#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "onelife/history.hpp"
#include "onelife/rng.hpp"
#include "onelife/types.hpp"

namespace onelife {

// Shared label tables for a world's three alphabets.
struct WorldLabels {
  std::vector<std::string> states;
  std::vector<std::string> actions;
  std::vector<std::string> observations;

  StateId state_id(const std::string& name) const;
  ActionId action_id(const std::string& name) const;
  ObsId obs_id(const std::string& name) const;

  void build_index();
  void validate() const;

 private:
  std::unordered_map<std::string, StateId> state_index_;
  std::unordered_map<std::string, ActionId> action_index_;
  std::unordered_map<std::string, ObsId> obs_index_;
};

// Recorded suffix of a life strictly after a queried moment, nearest label
// first. Empty during online simulation; populated only when replaying a
// finished life offline.
struct RealizedFuture {
  std::vector<std::int32_t> labels;  // actions or events

  bool empty() const { return labels.empty(); }
};

// Arguments of one transition-oracle query.
struct TransitionChoice {
  int t = 0;                       // completed moves before this one
  std::uint64_t past_digest = 0;   // digest of the history so far
  StateId state = kNoState;
  std::int32_t label = -1;         // action or event
  std::span<const StateId> candidates;
  const RealizedFuture* future = nullptr;  // null online
};

// Resolves nondeterministic transitions. Implementations must be pure
// functions of their construction seed and the query arguments, so that a
// replay with identical inputs reproduces identical choices.
class TransitionOracle {
 public:
  virtual ~TransitionOracle() = default;
  virtual StateId choose(const TransitionChoice& q) const = 0;
  virtual std::shared_ptr<const TransitionOracle> with_seed(std::uint64_t seed) const = 0;
};

// Resolves what is observed on arrival in a state.
class ObservationOracle {
 public:
  virtual ~ObservationOracle() = default;
  virtual ObsId observe(int t, std::uint64_t past_digest, StateId next) const = 0;
  virtual std::shared_ptr<const ObservationOracle> with_seed(std::uint64_t seed) const = 0;
};

// Resolves whether a named non-visible event occurred on arrival in a state.
class EventOracle {
 public:
  virtual ~EventOracle() = default;
  virtual bool occurred(int t, std::uint64_t past_digest, StateId next, EventId event) const = 0;
  virtual std::shared_ptr<const EventOracle> with_seed(std::uint64_t seed) const = 0;
};

// Uniform choice among the candidate arrows, keyed by (seed, step, label,
// arity). The key deliberately excludes the state and the past so that the
// default world is past-independent and structurally matching models make
// corresponding choices (see flatten()).
class UniformTransitionOracle final : public TransitionOracle {
 public:
  explicit UniformTransitionOracle(std::uint64_t seed) : seed_(seed) {}
  StateId choose(const TransitionChoice& q) const override;
  std::shared_ptr<const TransitionOracle> with_seed(std::uint64_t seed) const override {
    return std::make_shared<UniformTransitionOracle>(seed);
  }

 private:
  std::uint64_t seed_;
};

// Observation looked up from a fixed per-state table.
class TableObservationOracle final : public ObservationOracle {
 public:
  explicit TableObservationOracle(std::vector<ObsId> view) : view_(std::move(view)) {}
  ObsId observe(int, std::uint64_t, StateId next) const override { return view_.at(next); }
  std::shared_ptr<const ObservationOracle> with_seed(std::uint64_t) const override {
    return std::make_shared<TableObservationOracle>(view_);
  }

 private:
  std::vector<ObsId> view_;
};

// Event occurrence drawn i.i.d. with a fixed probability per event id.
class BernoulliEventOracle final : public EventOracle {
 public:
  BernoulliEventOracle(std::uint64_t seed, double p) : seed_(seed), p_(p) {}
  bool occurred(int t, std::uint64_t, StateId next, EventId event) const override {
    return keyed_real01(seed_, static_cast<std::uint64_t>(t),
                        static_cast<std::uint64_t>(next) + 0x9177,
                        static_cast<std::uint64_t>(event)) < p_;
  }
  std::shared_ptr<const EventOracle> with_seed(std::uint64_t seed) const override {
    return std::make_shared<BernoulliEventOracle>(seed, p_);
  }

 private:
  std::uint64_t seed_;
  double p_;
};

// The three world-side resolvers plus the seed their defaults draw from.
struct OracleBundle {
  std::shared_ptr<const TransitionOracle> transition;
  std::shared_ptr<const ObservationOracle> observation;
  std::shared_ptr<const EventOracle> event;
  std::uint64_t seed = 0;

  // Bundle with the default members reseeded from a life seed; members keep
  // their kind. Used so that each life draws from its own substreams.
  OracleBundle reseeded(std::uint64_t life_seed) const;
};

struct StepOutcome {
  bool moved = false;
  ObsId observation = -1;  // valid iff moved
};

struct StepContext {
  int t = 0;
  std::uint64_t past_digest = 0;
  const RealizedFuture* future = nullptr;
};

// Ground truth for simulation: a total deterministic labeled digraph with a
// per-state observation and a per-state set of incorrect actions.
class PerfectWorld {
 public:
  PerfectWorld() = default;
  PerfectWorld(WorldLabels labels, std::vector<StateId> transition, std::vector<ObsId> view,
               std::vector<std::uint8_t> incorrect, StateId current);

  int num_states() const { return static_cast<int>(labels_.states.size()); }
  int num_actions() const { return static_cast<int>(labels_.actions.size()); }
  int num_observations() const { return static_cast<int>(labels_.observations.size()); }

  StateId next(StateId s, ActionId a) const { return transition_[idx(s, a)]; }
  ObsId observation(StateId s) const { return view_[s]; }
  bool is_incorrect(StateId s, ActionId a) const { return incorrect_[idx(s, a)] != 0; }
  std::vector<ActionId> incorrect_set(StateId s) const;
  bool all_incorrect(StateId s) const;
  std::vector<StateId> successors(StateId s, ActionId a) const { return {next(s, a)}; }

  StateId current() const { return current_; }
  void set_current(StateId s);

  const WorldLabels& labels() const { return labels_; }
  const std::vector<StateId>& transition_table() const { return transition_; }
  const std::vector<ObsId>& view_table() const { return view_; }

 private:
  std::size_t idx(StateId s, ActionId a) const {
    return static_cast<std::size_t>(s) * static_cast<std::size_t>(num_actions()) +
           static_cast<std::size_t>(a);
  }

  WorldLabels labels_;
  std::vector<StateId> transition_;       // [s * A + a]
  std::vector<ObsId> view_;               // [s]
  std::vector<std::uint8_t> incorrect_;   // [s * A + a]
  StateId current_ = 0;
};

// Nondeterministic world: a total relation plus an oracle bundle resolving
// arrow choice, observation, and non-visible event occurrence.
class RandomWorld {
 public:
  RandomWorld() = default;
  RandomWorld(WorldLabels labels, std::vector<std::vector<StateId>> successors,
              std::vector<ObsId> view, std::vector<std::uint8_t> incorrect, StateId current,
              OracleBundle oracles);

  int num_states() const { return static_cast<int>(labels_.states.size()); }
  int num_actions() const { return static_cast<int>(labels_.actions.size()); }
  int num_observations() const { return static_cast<int>(labels_.observations.size()); }

  const std::vector<StateId>& successors(StateId s, ActionId a) const {
    return successors_[idx(s, a)];
  }
  ObsId default_observation(StateId s) const { return view_[s]; }
  bool is_incorrect(StateId s, ActionId a) const { return incorrect_[idx(s, a)] != 0; }
  std::vector<ActionId> incorrect_set(StateId s) const;
  bool all_incorrect(StateId s) const;

  StateId current() const { return current_; }
  void set_current(StateId s);

  const WorldLabels& labels() const { return labels_; }
  const OracleBundle& oracles() const { return oracles_; }
  void set_oracles(OracleBundle b) { oracles_ = std::move(b); }
  const std::vector<ObsId>& view_table() const { return view_; }

 private:
  std::size_t idx(StateId s, ActionId a) const {
    return static_cast<std::size_t>(s) * static_cast<std::size_t>(num_actions()) +
           static_cast<std::size_t>(a);
  }

  WorldLabels labels_;
  std::vector<std::vector<StateId>> successors_;  // [s * A + a], each nonempty
  std::vector<ObsId> view_;
  std::vector<std::uint8_t> incorrect_;
  StateId current_ = 0;
  OracleBundle oracles_;
};

// Executes one attempted move. An incorrect action leaves the state
// unchanged and reports rejection; the caller records it into the pending
// bad set. Unknown actions are input errors.
StepOutcome step(PerfectWorld& w, ActionId action, const StepContext& ctx = {});
StepOutcome step(RandomWorld& w, ActionId action, const StepContext& ctx = {});

// Classifies a state over the usable subgraph (arrows whose action is not
// incorrect at their source). A state with no usable outbound arrow is
// sudden death, which takes precedence over absolute beginning.
StateClass classify_state(const PerfectWorld& w, StateId s);
StateClass classify_state(const RandomWorld& w, StateId s);

struct LifeRecord {
  History history;
  StatePath path;
  TerminationCause cause = TerminationCause::NaturalDeath;
};

// Total strategy from the observed history so far to the next attempted
// action. Policies may be stateful; one policy instance drives one life.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual ActionId next_action(const History& so_far, std::span<const ActionId> pending_bad,
                               int action_count, Rng& rng) = 0;
};

// Uniform over the actions not already rejected at this moment.
class UniformPolicy final : public Policy {
 public:
  ActionId next_action(const History&, std::span<const ActionId> pending_bad, int action_count,
                       Rng& rng) override;
};

// Fixed attempt sequence, wrapping around at the end.
class ScriptedPolicy final : public Policy {
 public:
  explicit ScriptedPolicy(std::vector<ActionId> script);
  ActionId next_action(const History&, std::span<const ActionId>, int, Rng&) override;

 private:
  std::vector<ActionId> script_;
  std::size_t cursor_ = 0;
};

// Repeats the last successful action, exploring uniformly with probability
// epsilon (and whenever the repeat is already known bad at this moment).
class RepeatLastPolicy final : public Policy {
 public:
  explicit RepeatLastPolicy(double epsilon) : epsilon_(epsilon) {}
  ActionId next_action(const History& so_far, std::span<const ActionId> pending_bad,
                       int action_count, Rng& rng) override;

 private:
  double epsilon_;
};

std::unique_ptr<Policy> make_policy(const std::string& spec, const WorldLabels& labels);

// Runs one life to `horizon` successful moves (natural death) or to a state
// with no usable outbound arrow (sudden death). Deterministic given
// (world, policy, horizon, seed): policy draws and oracle draws come from
// independent substreams of `seed`.
LifeRecord run_life(const PerfectWorld& world, Policy& policy, int horizon, std::uint64_t seed);
LifeRecord run_life(const RandomWorld& world, Policy& policy, int horizon, std::uint64_t seed);

// Deterministic world generator used by the CLI. Transitions and views are
// sampled uniformly; each (state, action) is incorrect with probability
// `incorrect_density`. Unless `allow_sudden_death`, states whose sampled
// incorrect set covers all actions are resampled (bounded retries).
PerfectWorld generate_world(int states, int actions, int observations, double incorrect_density,
                            std::uint64_t seed, bool allow_sudden_death = false);

}  // namespace onelife
