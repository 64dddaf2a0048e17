#include "onelife/edm.hpp"

#include <algorithm>

#include "onelife/rng.hpp"

namespace onelife {

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::Visible: return "visible";
    case EventKind::SemiVisible: return "semi";
    default: return "invisible";
  }
}

EventKind event_kind_from_string(const std::string& s) {
  if (s == "visible") return EventKind::Visible;
  if (s == "semi" || s == "semi-visible") return EventKind::SemiVisible;
  if (s == "invisible") return EventKind::Invisible;
  throw InputError("unknown event kind '" + s + "'");
}

StateId EventDrivenModel::state_id(const std::string& name) const {
  for (StateId i = 0; i < num_states(); ++i) {
    if (state_names[i] == name) return i;
  }
  throw InputError("unknown model state '" + name + "'");
}

EventId EventDrivenModel::event_id(const std::string& name) const {
  for (EventId i = 0; i < num_events(); ++i) {
    if (events[i].name == name) return i;
  }
  throw InputError("unknown event '" + name + "'");
}

void EventDrivenModel::add_arrow(StateId s, EventId e, StateId target) {
  arrows.at(s).at(e).push_back(target);
}

void EventDrivenModel::validate() const {
  if (state_names.empty()) throw InputError("model needs at least one state");
  if (arrows.size() != static_cast<std::size_t>(num_states())) {
    throw InputError("arrow table does not cover every state");
  }
  for (const auto& per_state : arrows) {
    if (per_state.size() != static_cast<std::size_t>(num_events())) {
      throw InputError("arrow table does not cover every event");
    }
    for (const auto& targets : per_state) {
      for (StateId t : targets) {
        if (t < 0 || t >= num_states()) throw InputError("arrow target out of range");
      }
    }
  }
  if (outside && (*outside < 0 || *outside >= num_states())) {
    throw InputError("outside state out of range");
  }
  if (start < 0 || start >= num_states()) throw InputError("start state out of range");
}

void EventStream::validate() const {
  int last = 0;
  for (const auto& tick : ticks) {
    if (tick.t <= last) throw InputError("event stream moments must be strictly increasing");
    if (tick.t > total_steps) throw InputError("event stream tick beyond total steps");
    if (tick.events.empty()) throw InputError("event stream tick with empty event set");
    for (EventId e : tick.events) {
      if (e < 0 || e >= num_events()) throw InputError("event stream references unknown event");
    }
    last = tick.t;
  }
}

std::vector<EventId> map_stream_events(const EventStream& stream, const EventDrivenModel& m) {
  std::vector<EventId> map(stream.event_names.size());
  for (std::size_t i = 0; i < stream.event_names.size(); ++i) {
    map[i] = m.event_id(stream.event_names[i]);
  }
  return map;
}

namespace {

// Events of one tick in the order they are applied: lexicographic by name.
std::vector<EventId> ordered_events(const EventDrivenModel& m, std::span<const EventId> events) {
  std::vector<EventId> order(events.begin(), events.end());
  for (EventId e : order) {
    if (e < 0 || e >= m.num_events()) throw InputError("advance: event not in the model alphabet");
  }
  std::sort(order.begin(), order.end(),
            [&](EventId a, EventId b) { return m.events[a].name < m.events[b].name; });
  order.erase(std::unique(order.begin(), order.end()), order.end());
  return order;
}

}  // namespace

AdvanceResult advance(const EventDrivenModel& m, StateId current, std::span<const EventId> events,
                      const EdmOracle& oracle, int t, std::uint64_t past_digest,
                      const RealizedFuture* future) {
  if (current < 0 || current >= m.num_states()) throw InputError("advance: state out of range");
  AdvanceResult res{current, 0};
  if (events.empty()) return res;

  std::vector<EventId> order = ordered_events(m, events);
  if (oracle.policy == SimultaneityPolicy::ObscureKeepFirst) order.resize(1);

  for (EventId e : order) {
    const auto& targets = m.targets(res.state, e);
    if (targets.empty()) {
      ++res.no_arrow_events;
      continue;
    }
    TransitionChoice q;
    q.t = t;
    q.past_digest = past_digest;
    q.state = res.state;
    q.label = e;
    q.candidates = targets;
    q.future = future;
    res.state = oracle.alpha->choose(q);
  }
  return res;
}

EvalIndex VariablesModel::eval_count() const {
  EvalIndex n = 1;
  for (const auto& v : variables) n *= static_cast<EvalIndex>(v.domain.size());
  return n;
}

Evaluation VariablesModel::unpack(EvalIndex idx) const {
  Evaluation e;
  e.values.resize(variables.size());
  for (int i = static_cast<int>(variables.size()) - 1; i >= 0; --i) {
    const auto radix = static_cast<EvalIndex>(variables[i].domain.size());
    e.values[i] = static_cast<int>(idx % radix);
    idx /= radix;
  }
  return e;
}

EvalIndex VariablesModel::pack(const Evaluation& e) const {
  if (e.values.size() != variables.size()) throw InputError("evaluation arity mismatch");
  EvalIndex idx = 0;
  for (std::size_t i = 0; i < variables.size(); ++i) {
    const auto radix = static_cast<EvalIndex>(variables[i].domain.size());
    if (e.values[i] < 0 || e.values[i] >= radix) throw InputError("evaluation value out of domain");
    idx = idx * radix + e.values[i];
  }
  return idx;
}

std::string VariablesModel::eval_name(EvalIndex idx) const {
  const Evaluation e = unpack(idx);
  std::string out;
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (i) out += ',';
    out += variables[i].name + "=" + variables[i].domain[e.values[i]];
  }
  return out;
}

std::vector<std::pair<StateId, EvalIndex>> VariablesModel::choices(StateId s, EvalIndex eval,
                                                                   EventId e) const {
  if (variables.empty()) {
    std::vector<std::pair<StateId, EvalIndex>> out;
    for (StateId t : base.targets(s, e)) out.emplace_back(t, 0);
    return out;
  }
  auto it = update.find({s, eval, e});
  if (it == update.end()) return {};
  return it->second;
}

void VariablesModel::validate() const {
  base.validate();
  for (const auto& v : variables) {
    if (v.domain.empty()) throw InputError("variable '" + v.name + "' has an empty domain");
  }
  const EvalIndex evals = eval_count();
  for (const auto& [key, targets] : update) {
    const auto& [s, eval, e] = key;
    if (s < 0 || s >= base.num_states()) throw InputError("update source state out of range");
    if (eval < 0 || eval >= evals) throw InputError("update source evaluation out of range");
    if (e < 0 || e >= base.num_events()) throw InputError("update event out of range");
    for (const auto& [ts, teval] : targets) {
      if (ts < 0 || ts >= base.num_states()) throw InputError("update target state out of range");
      if (teval < 0 || teval >= evals) throw InputError("update target evaluation out of range");
      // the state coordinate must follow an arrow of the base relation
      const auto& base_targets = base.targets(s, e);
      if (std::find(base_targets.begin(), base_targets.end(), ts) == base_targets.end()) {
        throw InputError("update row leaves the base relation on the state coordinate");
      }
    }
  }
}

VmAdvanceResult advance(const VariablesModel& m, VmConfig current, std::span<const EventId> events,
                        const EdmOracle& oracle, int t, std::uint64_t past_digest) {
  VmAdvanceResult res{current, 0};
  if (events.empty()) return res;

  std::vector<EventId> order = ordered_events(m.base, events);
  if (oracle.policy == SimultaneityPolicy::ObscureKeepFirst) order.resize(1);

  for (EventId e : order) {
    const auto choices = m.choices(res.config.state, res.config.eval, e);
    if (choices.empty()) {
      ++res.no_arrow_events;
      continue;
    }
    // Choices are indexed like flattened arrows; reuse the transition oracle
    // by choosing an index via a candidate list of flattened ids.
    std::vector<StateId> flat_ids(choices.size());
    const EvalIndex evals = m.eval_count();
    for (std::size_t i = 0; i < choices.size(); ++i) {
      flat_ids[i] =
          static_cast<StateId>(choices[i].first * evals + choices[i].second);
    }
    TransitionChoice q;
    q.t = t;
    q.past_digest = past_digest;
    q.state = static_cast<StateId>(res.config.state * evals + res.config.eval);
    q.label = e;
    q.candidates = flat_ids;
    const StateId flat = oracle.alpha->choose(q);
    const auto it = std::find(flat_ids.begin(), flat_ids.end(), flat);
    const auto& picked = choices[static_cast<std::size_t>(it - flat_ids.begin())];
    res.config.state = picked.first;
    res.config.eval = picked.second;
  }
  return res;
}

EventDrivenModel flatten(const VariablesModel& m, std::int64_t state_bound) {
  m.validate();
  const EvalIndex evals = m.eval_count();
  const std::int64_t total = static_cast<std::int64_t>(m.base.num_states()) * evals;
  if (total > state_bound) {
    throw CapacityError("flatten: " + std::to_string(total) + " states exceed the bound of " +
                        std::to_string(state_bound));
  }

  EventDrivenModel out;
  out.events = m.base.events;
  out.state_names.reserve(static_cast<std::size_t>(total));
  for (StateId s = 0; s < m.base.num_states(); ++s) {
    for (EvalIndex v = 0; v < evals; ++v) {
      if (m.variables.empty()) {
        out.state_names.push_back(m.base.state_names[s]);
      } else {
        out.state_names.push_back(m.base.state_names[s] + "|" + m.eval_name(v));
      }
    }
  }
  out.arrows.assign(out.state_names.size(),
                    std::vector<std::vector<StateId>>(out.events.size()));
  for (StateId s = 0; s < m.base.num_states(); ++s) {
    for (EvalIndex v = 0; v < evals; ++v) {
      const auto flat_src = static_cast<StateId>(s * evals + v);
      for (EventId e = 0; e < m.base.num_events(); ++e) {
        for (const auto& [ts, tv] : m.choices(s, v, e)) {
          out.arrows[flat_src][e].push_back(static_cast<StateId>(ts * evals + tv));
        }
      }
    }
  }
  out.start = static_cast<StateId>(m.base.start * evals + m.start_eval);
  if (m.base.outside) out.outside = static_cast<StateId>(*m.base.outside * evals + m.start_eval);
  out.validate();
  return out;
}

EventStream project_events(const History& h, std::span<const EventDef> defs,
                           const ChiTranscript* chi) {
  for (const auto& def : defs) {
    if (def.kind == EventKind::Invisible) {
      if (!chi || !chi->marks.count(def.name)) {
        throw MissingOracleError("invisible event '" + def.name +
                                 "' referenced without a transcript");
      }
    } else {
      VisibleEvent ve{def.name, def.members};
      ve.validate();
    }
  }

  EventStream out;
  out.total_steps = h.step_count();
  for (const auto& def : defs) out.event_names.push_back(def.name);
  for (int t = 1; t <= h.step_count(); ++t) {
    std::vector<EventId> fired;
    for (std::size_t i = 0; i < defs.size(); ++i) {
      const EventDef& def = defs[i];
      bool on = false;
      if (def.kind != EventKind::Invisible) {
        VisibleEvent ve{def.name, def.members};
        on = occurred(ve, h, t);
      }
      if (!on && def.kind != EventKind::Visible && chi) {
        auto it = chi->marks.find(def.name);
        on = it != chi->marks.end() && it->second.count(t) > 0;
      }
      if (on) fired.push_back(static_cast<EventId>(i));
    }
    if (!fired.empty()) out.ticks.push_back(Tick{t, std::move(fired)});
  }
  return out;
}

EdmRun simulate_edm(const EventDrivenModel& m, const EventStream& stream, const EdmOracle& oracle,
                    StateId start) {
  m.validate();
  stream.validate();
  if (start < 0 || start >= m.num_states()) throw InputError("simulate_edm: bad start state");
  const std::vector<EventId> map = map_stream_events(stream, m);

  EdmRun run;
  run.path.push_back(start);
  std::uint64_t digest = 0xcbf29ce484222325ull;
  std::vector<EventId> mapped;
  for (const auto& tick : stream.ticks) {
    mapped.clear();
    for (EventId e : tick.events) mapped.push_back(map[e]);
    const AdvanceResult res = advance(m, run.path.back(), mapped, oracle, tick.t, digest);
    for (EventId e : mapped) digest = mix64(digest, 0x60 + static_cast<std::uint64_t>(e));
    run.no_arrow_notices += res.no_arrow_events;
    run.path.push_back(res.state);
  }
  return run;
}

Timeline edm_timeline(const EventDrivenModel& m, const EventStream& stream,
                      const EdmOracle& oracle, StateId start) {
  m.validate();
  stream.validate();
  if (start < 0 || start >= m.num_states()) throw InputError("edm_timeline: bad start state");
  const std::vector<EventId> map = map_stream_events(stream, m);

  Timeline tl;
  tl.state_at.assign(stream.total_steps + 1, start);
  tl.uses.assign(stream.total_steps + 1, {});
  std::uint64_t digest = 0xcbf29ce484222325ull;
  StateId state = start;
  std::size_t tick_i = 0;
  for (int t = 1; t <= stream.total_steps; ++t) {
    if (tick_i < stream.ticks.size() && stream.ticks[tick_i].t == t) {
      const auto& tick = stream.ticks[tick_i++];
      std::vector<EventId> mapped;
      for (EventId e : tick.events) mapped.push_back(map[e]);
      std::vector<EventId> order = ordered_events(m, mapped);
      if (oracle.policy == SimultaneityPolicy::ObscureKeepFirst) order.resize(1);
      for (EventId e : order) {
        const auto& targets = m.targets(state, e);
        if (targets.empty()) {
          ++tl.no_arrow_notices;
          continue;
        }
        TransitionChoice q;
        q.t = t;
        q.past_digest = digest;
        q.state = state;
        q.label = e;
        q.candidates = targets;
        const StateId next = oracle.alpha->choose(q);
        tl.uses[t].push_back(ArrowUse{state, e, next});
        state = next;
      }
      for (EventId e : mapped) digest = mix64(digest, 0x60 + static_cast<std::uint64_t>(e));
    }
    tl.state_at[t] = state;
  }
  return tl;
}

}  // namespace onelife
