#include "onelife/world.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace onelife {

namespace {

void index_names(const std::vector<std::string>& names,
                 std::unordered_map<std::string, std::int32_t>& out, const char* what) {
  out.clear();
  for (std::size_t i = 0; i < names.size(); ++i) {
    const std::string& n = names[i];
    if (n.empty()) throw InputError(std::string(what) + " label must be nonempty");
    for (char c : n) {
      if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == '{' || c == '}' ||
          c == '/' || c == ';' || c == '|' || c == ':') {
        throw InputError(std::string(what) + " label '" + n + "' contains a reserved character");
      }
    }
    if (!out.emplace(n, static_cast<std::int32_t>(i)).second) {
      throw InputError(std::string("duplicate ") + what + " label '" + n + "'");
    }
  }
}

std::int32_t lookup(const std::unordered_map<std::string, std::int32_t>& index,
                    const std::string& name, const char* what) {
  auto it = index.find(name);
  if (it == index.end()) throw InputError(std::string("unknown ") + what + " label '" + name + "'");
  return it->second;
}

}  // namespace

void WorldLabels::build_index() {
  index_names(states, state_index_, "state");
  index_names(actions, action_index_, "action");
  index_names(observations, obs_index_, "observation");
}

void WorldLabels::validate() const {
  if (states.empty()) throw InputError("world needs at least one state");
  if (actions.empty()) throw InputError("world needs at least one action");
  if (observations.empty()) throw InputError("world needs at least one observation");
}

StateId WorldLabels::state_id(const std::string& name) const {
  return lookup(state_index_, name, "state");
}
ActionId WorldLabels::action_id(const std::string& name) const {
  return lookup(action_index_, name, "action");
}
ObsId WorldLabels::obs_id(const std::string& name) const {
  return lookup(obs_index_, name, "observation");
}

StateId UniformTransitionOracle::choose(const TransitionChoice& q) const {
  if (q.candidates.empty()) {
    throw MissingOracleError("transition oracle queried with no candidate arrows");
  }
  const std::uint64_t i =
      keyed_pick(seed_, static_cast<std::uint64_t>(q.t),
                 static_cast<std::uint64_t>(q.label) + 0x811c, q.candidates.size(),
                 q.candidates.size());
  return q.candidates[i];
}

OracleBundle OracleBundle::reseeded(std::uint64_t life_seed) const {
  const Rng base(life_seed);
  OracleBundle out = *this;
  out.seed = life_seed;
  if (transition) out.transition = transition->with_seed(base.substream("alpha").seed());
  if (observation) out.observation = observation->with_seed(base.substream("beta").seed());
  if (event) out.event = event->with_seed(base.substream("chi").seed());
  return out;
}

PerfectWorld::PerfectWorld(WorldLabels labels, std::vector<StateId> transition,
                           std::vector<ObsId> view, std::vector<std::uint8_t> incorrect,
                           StateId current)
    : labels_(std::move(labels)),
      transition_(std::move(transition)),
      view_(std::move(view)),
      incorrect_(std::move(incorrect)),
      current_(current) {
  labels_.validate();
  labels_.build_index();
  const std::size_t cells =
      static_cast<std::size_t>(num_states()) * static_cast<std::size_t>(num_actions());
  if (transition_.size() != cells) {
    throw InputError("transition table not total: expected " + std::to_string(cells) +
                     " entries, got " + std::to_string(transition_.size()));
  }
  for (StateId t : transition_) {
    if (t < 0 || t >= num_states()) throw InputError("transition target out of range");
  }
  if (view_.size() != static_cast<std::size_t>(num_states())) {
    throw InputError("view table must cover every state");
  }
  for (ObsId o : view_) {
    if (o < 0 || o >= num_observations()) throw InputError("view observation out of range");
  }
  if (incorrect_.size() != cells) throw InputError("incorrect table must cover every (state, action)");
  set_current(current_);
}

std::vector<ActionId> PerfectWorld::incorrect_set(StateId s) const {
  std::vector<ActionId> out;
  for (ActionId a = 0; a < num_actions(); ++a) {
    if (is_incorrect(s, a)) out.push_back(a);
  }
  return out;
}

bool PerfectWorld::all_incorrect(StateId s) const {
  for (ActionId a = 0; a < num_actions(); ++a) {
    if (!is_incorrect(s, a)) return false;
  }
  return true;
}

void PerfectWorld::set_current(StateId s) {
  if (s < 0 || s >= num_states()) throw InputError("current state out of range");
  current_ = s;
}

RandomWorld::RandomWorld(WorldLabels labels, std::vector<std::vector<StateId>> successors,
                         std::vector<ObsId> view, std::vector<std::uint8_t> incorrect,
                         StateId current, OracleBundle oracles)
    : labels_(std::move(labels)),
      successors_(std::move(successors)),
      view_(std::move(view)),
      incorrect_(std::move(incorrect)),
      current_(current),
      oracles_(std::move(oracles)) {
  labels_.validate();
  labels_.build_index();
  const std::size_t cells =
      static_cast<std::size_t>(num_states()) * static_cast<std::size_t>(num_actions());
  if (successors_.size() != cells) throw InputError("relation must cover every (state, action)");
  for (const auto& list : successors_) {
    if (list.empty()) throw InputError("relation not total: some (state, action) has no arrow");
    for (StateId t : list) {
      if (t < 0 || t >= num_states()) throw InputError("arrow target out of range");
    }
  }
  if (view_.size() != static_cast<std::size_t>(num_states())) {
    throw InputError("view table must cover every state");
  }
  if (incorrect_.size() != cells) throw InputError("incorrect table must cover every (state, action)");
  if (!oracles_.transition) oracles_.transition = std::make_shared<UniformTransitionOracle>(oracles_.seed);
  if (!oracles_.observation) oracles_.observation = std::make_shared<TableObservationOracle>(view_);
  if (!oracles_.event) oracles_.event = std::make_shared<BernoulliEventOracle>(oracles_.seed, 0.5);
  set_current(current_);
}

std::vector<ActionId> RandomWorld::incorrect_set(StateId s) const {
  std::vector<ActionId> out;
  for (ActionId a = 0; a < num_actions(); ++a) {
    if (is_incorrect(s, a)) out.push_back(a);
  }
  return out;
}

bool RandomWorld::all_incorrect(StateId s) const {
  for (ActionId a = 0; a < num_actions(); ++a) {
    if (!is_incorrect(s, a)) return false;
  }
  return true;
}

void RandomWorld::set_current(StateId s) {
  if (s < 0 || s >= num_states()) throw InputError("current state out of range");
  current_ = s;
}

StepOutcome step(PerfectWorld& w, ActionId action, const StepContext&) {
  if (action < 0 || action >= w.num_actions()) throw InputError("unknown action id in step()");
  if (w.is_incorrect(w.current(), action)) return {};
  w.set_current(w.next(w.current(), action));
  return {true, w.observation(w.current())};
}

StepOutcome step(RandomWorld& w, ActionId action, const StepContext& ctx) {
  if (action < 0 || action >= w.num_actions()) throw InputError("unknown action id in step()");
  if (w.is_incorrect(w.current(), action)) return {};
  const auto& candidates = w.successors(w.current(), action);
  TransitionChoice q;
  q.t = ctx.t;
  q.past_digest = ctx.past_digest;
  q.state = w.current();
  q.label = action;
  q.candidates = candidates;
  q.future = ctx.future;
  const StateId next = w.oracles().transition->choose(q);
  if (std::find(candidates.begin(), candidates.end(), next) == candidates.end()) {
    throw MissingOracleError("transition oracle chose a state with no matching arrow");
  }
  w.set_current(next);
  return {true, w.oracles().observation->observe(ctx.t + 1, ctx.past_digest, next)};
}

namespace {

template <class W>
StateClass classify_impl(const W& w, StateId s) {
  if (s < 0 || s >= w.num_states()) throw InputError("unknown state id in classify_state()");
  if (w.all_incorrect(s)) return StateClass::SuddenDeath;
  for (StateId src = 0; src < w.num_states(); ++src) {
    for (ActionId a = 0; a < w.num_actions(); ++a) {
      if (w.is_incorrect(src, a)) continue;  // arrows we would never use
      const auto succ = w.successors(src, a);
      if (std::find(succ.begin(), succ.end(), s) != succ.end()) return StateClass::Ordinary;
    }
  }
  return StateClass::AbsoluteBeginning;
}

template <class W>
LifeRecord run_life_impl(const W& world, Policy& policy, int horizon, std::uint64_t seed) {
  if (horizon < 0) throw InputError("horizon must be nonnegative");
  W w = world;  // private cursor for this life
  if constexpr (std::is_same_v<W, RandomWorld>) {
    w.set_oracles(w.oracles().reseeded(seed));
  }
  Rng policy_rng = Rng(seed).substream("policy");

  LifeRecord rec;
  rec.path.start = w.current();
  std::vector<ActionId> pending_bad;
  std::uint64_t digest = 0xcbf29ce484222325ull;

  while (rec.path.moves() < horizon) {
    if (w.all_incorrect(w.current())) {
      rec.cause = TerminationCause::SuddenDeath;
      return rec;
    }
    const ActionId a =
        policy.next_action(rec.history, pending_bad, w.num_actions(), policy_rng);
    if (a < 0 || a >= w.num_actions()) throw InputError("policy emitted an unknown action");
    StepContext ctx{rec.path.moves(), digest, nullptr};
    const StepOutcome out = step(w, a, ctx);
    if (!out.moved) {
      auto it = std::lower_bound(pending_bad.begin(), pending_bad.end(), a);
      if (it == pending_bad.end() || *it != a) pending_bad.insert(it, a);
      continue;
    }
    HistoryStep hs{std::move(pending_bad), a, out.observation};
    for (ActionId b : hs.bad_before) digest = mix64(digest, 0x10 + static_cast<std::uint64_t>(b));
    digest = mix64(digest, 0x20 + static_cast<std::uint64_t>(a));
    digest = mix64(digest, 0x30 + static_cast<std::uint64_t>(out.observation));
    rec.history.steps.push_back(std::move(hs));
    pending_bad = {};
    rec.path.visited.push_back(w.current());
  }
  rec.cause = TerminationCause::NaturalDeath;
  return rec;
}

}  // namespace

StateClass classify_state(const PerfectWorld& w, StateId s) { return classify_impl(w, s); }
StateClass classify_state(const RandomWorld& w, StateId s) { return classify_impl(w, s); }

LifeRecord run_life(const PerfectWorld& world, Policy& policy, int horizon, std::uint64_t seed) {
  return run_life_impl(world, policy, horizon, seed);
}
LifeRecord run_life(const RandomWorld& world, Policy& policy, int horizon, std::uint64_t seed) {
  return run_life_impl(world, policy, horizon, seed);
}

ActionId UniformPolicy::next_action(const History&, std::span<const ActionId> pending_bad,
                                    int action_count, Rng& rng) {
  const int usable = action_count - static_cast<int>(pending_bad.size());
  if (usable <= 0) {
    // every action already rejected at this moment; run_life terminates
    // before this can happen, but stay total anyway
    return static_cast<ActionId>(rng.below(action_count));
  }
  std::uint64_t k = rng.below(static_cast<std::uint64_t>(usable));
  for (ActionId a = 0;; ++a) {
    if (std::binary_search(pending_bad.begin(), pending_bad.end(), a)) continue;
    if (k == 0) return a;
    --k;
  }
}

ScriptedPolicy::ScriptedPolicy(std::vector<ActionId> script) : script_(std::move(script)) {
  if (script_.empty()) throw InputError("scripted policy needs at least one action");
}

ActionId ScriptedPolicy::next_action(const History&, std::span<const ActionId>, int, Rng&) {
  const ActionId a = script_[cursor_];
  cursor_ = (cursor_ + 1) % script_.size();
  return a;
}

ActionId RepeatLastPolicy::next_action(const History& so_far, std::span<const ActionId> pending_bad,
                                       int action_count, Rng& rng) {
  const bool explore = rng.bernoulli(epsilon_);
  if (!explore && !so_far.steps.empty()) {
    const ActionId last = so_far.steps.back().action;
    if (!std::binary_search(pending_bad.begin(), pending_bad.end(), last)) return last;
  }
  UniformPolicy uniform;
  return uniform.next_action(so_far, pending_bad, action_count, rng);
}

std::unique_ptr<Policy> make_policy(const std::string& spec, const WorldLabels& labels) {
  if (spec == "uniform") return std::make_unique<UniformPolicy>();
  if (spec.rfind("scripted:", 0) == 0) {
    std::vector<ActionId> script;
    std::string rest = spec.substr(9);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      std::size_t comma = rest.find(',', pos);
      if (comma == std::string::npos) comma = rest.size();
      script.push_back(labels.action_id(rest.substr(pos, comma - pos)));
      pos = comma + 1;
    }
    return std::make_unique<ScriptedPolicy>(std::move(script));
  }
  if (spec.rfind("repeat-eps:", 0) == 0) {
    const std::string rest = spec.substr(11);
    double eps = 0.0;
    auto res = std::from_chars(rest.data(), rest.data() + rest.size(), eps);
    if (res.ec != std::errc() || eps < 0.0 || eps > 1.0) {
      throw InputError("bad epsilon in policy spec '" + spec + "'");
    }
    return std::make_unique<RepeatLastPolicy>(eps);
  }
  throw InputError("unknown policy spec '" + spec + "'");
}

PerfectWorld generate_world(int states, int actions, int observations, double incorrect_density,
                            std::uint64_t seed, bool allow_sudden_death) {
  if (states < 1 || actions < 1 || observations < 1) {
    throw InputError("generate_world: counts must be at least 1");
  }
  if (!(incorrect_density >= 0.0 && incorrect_density < 1.0)) {
    throw InputError("generate_world: incorrect density must be in [0, 1)");
  }
  Rng rng = Rng(seed).substream("world-gen");

  WorldLabels labels;
  for (int i = 0; i < states; ++i) labels.states.push_back("s" + std::to_string(i));
  for (int i = 0; i < actions; ++i) labels.actions.push_back("a" + std::to_string(i));
  for (int i = 0; i < observations; ++i) labels.observations.push_back("o" + std::to_string(i));

  std::vector<StateId> transition(static_cast<std::size_t>(states) * actions);
  std::vector<std::uint8_t> incorrect(transition.size(), 0);
  std::vector<ObsId> view(states);
  for (auto& t : transition) t = static_cast<StateId>(rng.below(states));
  for (auto& v : view) v = static_cast<ObsId>(rng.below(observations));

  constexpr int kMaxRetries = 100;
  for (int s = 0; s < states; ++s) {
    for (int attempt = 0;; ++attempt) {
      bool all_bad = true;
      for (int a = 0; a < actions; ++a) {
        const bool bad = rng.bernoulli(incorrect_density);
        incorrect[static_cast<std::size_t>(s) * actions + a] = bad ? 1 : 0;
        all_bad = all_bad && bad;
      }
      if (!all_bad || allow_sudden_death) break;
      if (attempt + 1 >= kMaxRetries) {
        throw GenerationError("could not sample a state without sudden death at density " +
                              std::to_string(incorrect_density));
      }
    }
  }

  return PerfectWorld(std::move(labels), std::move(transition), std::move(view),
                      std::move(incorrect), 0);
}

}  // namespace onelife
