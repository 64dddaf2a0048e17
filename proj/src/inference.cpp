#include "onelife/inference.hpp"

#include <algorithm>
#include <cmath>

#include <gsl/gsl_cdf.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "onelife/rng.hpp"

namespace onelife {

std::int64_t AbridgedModel::total_transitions() const {
  std::int64_t n = 0;
  for (const auto& [k, c] : arrow_counts) n += c;
  return n;
}

std::int64_t AbridgedModel::total_visits() const {
  std::int64_t n = 0;
  for (const auto& [k, c] : state_counts) n += c;
  return n;
}

AbridgedModel abridge(std::span<const StateId> node_path, std::span<const std::int32_t> labels,
                      const std::function<bool(StateId, std::int32_t, StateId)>& arrow_exists) {
  if (!node_path.empty() && node_path.size() != labels.size() + 1) {
    throw InputError("abridge: node path must have one more entry than labels");
  }
  AbridgedModel out;
  for (StateId s : node_path) ++out.state_counts[s];
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const StateId src = node_path[i];
    const StateId dst = node_path[i + 1];
    if (arrow_exists && !arrow_exists(src, labels[i], dst)) {
      throw InputError("abridge: path traverses an arrow absent from the model at transition " +
                       std::to_string(i));
    }
    ++out.arrow_counts[{src, labels[i], dst}];
  }
  out.kept_states.reserve(out.state_counts.size());
  for (const auto& [s, c] : out.state_counts) out.kept_states.push_back(s);
  return out;
}

namespace {

template <class W>
AbridgedModel abridge_life(const W& w, const LifeRecord& life) {
  std::vector<StateId> nodes;
  std::vector<std::int32_t> labels;
  nodes.push_back(life.path.start);
  for (std::size_t i = 0; i < life.path.visited.size(); ++i) {
    nodes.push_back(life.path.visited[i]);
    labels.push_back(life.history.steps.at(i).action);
  }
  auto exists = [&](StateId s, std::int32_t a, StateId s2) {
    if (w.is_incorrect(s, static_cast<ActionId>(a))) return false;
    const auto succ = w.successors(s, static_cast<ActionId>(a));
    return std::find(succ.begin(), succ.end(), s2) != succ.end();
  };
  return abridge(nodes, labels, exists);
}

}  // namespace

AbridgedModel abridge(const PerfectWorld& w, const LifeRecord& life) {
  return abridge_life(w, life);
}
AbridgedModel abridge(const RandomWorld& w, const LifeRecord& life) {
  return abridge_life(w, life);
}

AbridgedModel abridge(const EventDrivenModel& m, const Timeline& tl) {
  std::vector<StateId> nodes;
  std::vector<std::int32_t> labels;
  if (!tl.state_at.empty()) nodes.push_back(tl.state_at[0]);
  for (const auto& uses : tl.uses) {
    for (const auto& u : uses) {
      nodes.push_back(u.dst);
      labels.push_back(u.label);
    }
  }
  auto exists = [&](StateId s, std::int32_t e, StateId s2) {
    const auto& targets = m.targets(s, static_cast<EventId>(e));
    return std::find(targets.begin(), targets.end(), s2) != targets.end();
  };
  return abridge(nodes, labels, exists);
}

Timeline life_timeline(const LifeRecord& life) {
  Timeline tl;
  const int n = life.path.moves();
  tl.state_at.assign(n + 1, life.path.start);
  tl.uses.assign(n + 1, {});
  for (int t = 1; t <= n; ++t) {
    tl.state_at[t] = life.path.visited[t - 1];
    tl.uses[t].push_back(ArrowUse{tl.state_at[t - 1],
                                  life.history.steps.at(t - 1).action, tl.state_at[t]});
  }
  return tl;
}

double TraceStatistics::global_frequency(EventId e) const {
  if (total_moments <= 0) return 0.0;
  auto it = event_totals.find(e);
  return it == event_totals.end() ? 0.0 : it->second / total_moments;
}

namespace {

// Dense per-moment event presence built from a sparse stream.
struct DenseEvents {
  int num_events = 0;
  std::vector<std::vector<EventId>> at;  // events fired at each moment

  DenseEvents(const EventStream& stream) : num_events(stream.num_events()) {
    at.assign(stream.total_steps + 1, {});
    for (const auto& tick : stream.ticks) at[tick.t] = tick.events;
  }
};

void collect_range(const Timeline& tl, const DenseEvents& ev, int window, int t_begin, int t_end,
                   TraceStatistics& out) {
  const int n = static_cast<int>(tl.state_at.size()) - 1;
  for (int t = t_begin; t < t_end; ++t) {
    const StateId s = tl.state_at[t - 1];
    for (EventId e = 0; e < ev.num_events; ++e) {
      out.state_stats[{s, e}].opportunities += 1.0;
    }
    for (EventId e : ev.at[t]) out.state_stats[{s, e}].occurrences += 1.0;

    for (const auto& use : tl.uses[t]) {
      for (int off = -window; off <= window; ++off) {
        if (off == 0) continue;
        const int u = t + off;
        if (u < 1 || u > n) continue;
        for (EventId e = 0; e < ev.num_events; ++e) {
          out.window_stats[{use, e, off}].opportunities += 1.0;
        }
        for (EventId e : ev.at[u]) out.window_stats[{use, e, off}].occurrences += 1.0;
      }
    }
  }
}

void merge_into(TraceStatistics& dst, const TraceStatistics& src) {
  for (const auto& [k, c] : src.state_stats) {
    auto& d = dst.state_stats[k];
    d.occurrences += c.occurrences;
    d.opportunities += c.opportunities;
  }
  for (const auto& [k, c] : src.window_stats) {
    auto& d = dst.window_stats[k];
    d.occurrences += c.occurrences;
    d.opportunities += c.opportunities;
  }
}

void finish_totals(TraceStatistics& stats, const DenseEvents& ev, int n) {
  stats.total_moments = n;
  for (int t = 1; t <= n; ++t) {
    for (EventId e : ev.at[t]) stats.event_totals[e] += 1.0;
  }
}

void check_aligned(const Timeline& tl, const EventStream& stream) {
  if (static_cast<int>(tl.state_at.size()) != stream.total_steps + 1) {
    throw InputError("collect: timeline and stream cover different step ranges");
  }
  stream.validate();
}

}  // namespace

TraceStatistics collect_reference(const Timeline& tl, const EventStream& stream, int window) {
  check_aligned(tl, stream);
  const DenseEvents ev(stream);
  const int n = stream.total_steps;
  TraceStatistics out;
  out.window = window;
  collect_range(tl, ev, window, 1, n + 1, out);
  finish_totals(out, ev, n);
  return out;
}

TraceStatistics collect(const Timeline& tl, const EventStream& stream, int window) {
  check_aligned(tl, stream);
  const DenseEvents ev(stream);
  const int n = stream.total_steps;
  TraceStatistics out;
  out.window = window;

#ifdef _OPENMP
  const int threads = std::max(1, std::min(omp_get_max_threads(), n / 1024 + 1));
  std::vector<TraceStatistics> partial(threads);
  #pragma omp parallel num_threads(threads)
  {
    const int tid = omp_get_thread_num();
    const int chunk = (n + threads - 1) / threads;
    const int begin = 1 + tid * chunk;
    const int end = std::min(n + 1, begin + chunk);
    if (begin < end) {
      partial[tid].window = window;
      collect_range(tl, ev, window, begin, end, partial[tid]);
    }
  }
  for (const auto& p : partial) merge_into(out, p);
#else
  collect_range(tl, ev, window, 1, n + 1, out);
#endif
  finish_totals(out, ev, n);
  return out;
}

TraceStatistics collect_fractional(const EventDrivenModel& m, const EventStream& stream) {
  const std::vector<std::set<StateId>> sets = estimate_timeline(m, stream);
  const DenseEvents ev(stream);
  TraceStatistics out;
  out.approximate = true;
  out.window = 0;
  const int n = stream.total_steps;
  for (int t = 1; t <= n; ++t) {
    const auto& candidates = sets[t - 1];  // estimate before the tick lands
    if (candidates.empty()) continue;      // stream already contradicts the model here
    const double share = 1.0 / static_cast<double>(candidates.size());
    for (StateId s : candidates) {
      for (EventId e = 0; e < ev.num_events; ++e) {
        out.state_stats[{s, e}].opportunities += share;
      }
      for (EventId e : ev.at[t]) out.state_stats[{s, e}].occurrences += share;
    }
  }
  finish_totals(out, ev, n);
  return out;
}

std::string TraceFinding::location_string(std::span<const std::string> state_names,
                                          std::span<const std::string> label_names) const {
  if (state_level) return "state:" + state_names[static_cast<std::size_t>(state)];
  std::string out = "arrow:" + state_names[static_cast<std::size_t>(arrow.src)] + "-" +
                    label_names[static_cast<std::size_t>(arrow.label)] + ">" +
                    state_names[static_cast<std::size_t>(arrow.dst)] + "@";
  out += (offset >= 0 ? "+" : "") + std::to_string(offset);
  return out;
}

std::vector<TraceFinding> detect_trace(const TraceStatistics& stats, const DetectParams& params,
                                       std::span<const std::string> state_names,
                                       std::span<const std::string> label_names,
                                       std::span<const std::string> event_names) {
  if (params.min_support < 1.0) throw InputError("detect_trace: min_support must be >= 1");
  if (!(params.threshold > 0.0)) throw InputError("detect_trace: threshold must be positive");
  constexpr double kEps = 1e-9;

  const double uniform =
      event_names.empty() ? 0.0 : 1.0 / static_cast<double>(event_names.size());
  auto baseline_of = [&](EventId e) {
    return params.baseline == BaselineMode::GlobalFrequency ? stats.global_frequency(e) : uniform;
  };
  auto deviation_of = [&](double empirical, double baseline, double support) {
    return std::fabs(empirical - baseline) /
           std::sqrt(baseline * (1.0 - baseline) / support + kEps);
  };

  std::vector<TraceFinding> findings;
  for (const auto& [key, counts] : stats.state_stats) {
    if (counts.opportunities < params.min_support) continue;
    TraceFinding f;
    f.state_level = true;
    f.state = key.first;
    f.event = key.second;
    f.support = counts.opportunities;
    f.empirical = counts.frequency();
    f.baseline = baseline_of(key.second);
    f.deviation = deviation_of(f.empirical, f.baseline, f.support);
    if (f.deviation >= params.threshold) findings.push_back(f);
  }
  for (const auto& [key, counts] : stats.window_stats) {
    if (counts.opportunities < params.min_support) continue;
    TraceFinding f;
    f.state_level = false;
    f.arrow = std::get<0>(key);
    f.event = std::get<1>(key);
    f.offset = std::get<2>(key);
    f.support = counts.opportunities;
    f.empirical = counts.frequency();
    f.baseline = baseline_of(f.event);
    f.deviation = deviation_of(f.empirical, f.baseline, f.support);
    if (f.deviation >= params.threshold) findings.push_back(f);
  }

  std::sort(findings.begin(), findings.end(), [&](const TraceFinding& a, const TraceFinding& b) {
    if (a.deviation != b.deviation) return a.deviation > b.deviation;
    const std::string la = a.location_string(state_names, label_names);
    const std::string lb = b.location_string(state_names, label_names);
    if (la != lb) return la < lb;
    return event_names[static_cast<std::size_t>(a.event)] <
           event_names[static_cast<std::size_t>(b.event)];
  });
  return findings;
}

double adequacy(std::span<const TraceFinding> findings) {
  double best = 0.0;
  for (const auto& f : findings) best = std::max(best, f.deviation);
  return best;
}

namespace {

// One estimation step: every candidate state either follows an arrow of the
// fired event or is eliminated (the model said this event cannot happen
// there). Multi-event ticks are applied in lexicographic event-name order.
std::set<StateId> estimate_step(const EventDrivenModel& m, const std::set<StateId>& from,
                                std::vector<EventId> events) {
  std::sort(events.begin(), events.end(),
            [&](EventId a, EventId b) { return m.events[a].name < m.events[b].name; });
  events.erase(std::unique(events.begin(), events.end()), events.end());
  std::set<StateId> cur = from;
  for (EventId e : events) {
    std::set<StateId> next;
    for (StateId s : cur) {
      for (StateId t : m.targets(s, e)) next.insert(t);
    }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

std::vector<std::set<StateId>> estimate_timeline(const EventDrivenModel& m,
                                                 const EventStream& stream,
                                                 bool assume_outside_start) {
  m.validate();
  stream.validate();
  const std::vector<EventId> map = map_stream_events(stream, m);

  std::set<StateId> cur;
  if (assume_outside_start && m.outside) {
    cur.insert(*m.outside);
  } else {
    for (StateId s = 0; s < m.num_states(); ++s) cur.insert(s);
  }

  std::vector<std::set<StateId>> out(stream.total_steps + 1);
  out[0] = cur;
  std::size_t tick_i = 0;
  for (int t = 1; t <= stream.total_steps; ++t) {
    if (tick_i < stream.ticks.size() && stream.ticks[tick_i].t == t) {
      std::vector<EventId> mapped;
      for (EventId e : stream.ticks[tick_i].events) mapped.push_back(map[e]);
      cur = estimate_step(m, cur, std::move(mapped));
      ++tick_i;
    }
    out[t] = cur;
  }
  return out;
}

std::set<StateId> estimate_state(const EventDrivenModel& m, const EventStream& prefix,
                                 bool assume_outside_start) {
  return estimate_timeline(m, prefix, assume_outside_start).back();
}

const char* to_string(PastVerdict v) {
  switch (v) {
    case PastVerdict::PastIndependentAtLag: return "past-independent-at-lag";
    case PastVerdict::PastDependent: return "past-dependent";
    default: return "inconclusive";
  }
}

namespace {

// Chi-square test of independence on a contingency table given as
// cell counts indexed by (row, col). Returns the p-value, or 1.0 when the
// table is degenerate. Applies the Yates continuity correction on 2x2
// tables.
double chi_square_p(const std::map<std::pair<int, int>, std::int64_t>& cells) {
  std::map<int, std::int64_t> row_sum, col_sum;
  std::int64_t total = 0;
  for (const auto& [rc, n] : cells) {
    row_sum[rc.first] += n;
    col_sum[rc.second] += n;
    total += n;
  }
  const int r = static_cast<int>(row_sum.size());
  const int c = static_cast<int>(col_sum.size());
  if (r < 2 || c < 2 || total == 0) return 1.0;

  const bool yates = (r == 2 && c == 2);
  double stat = 0.0;
  for (const auto& [row, rs] : row_sum) {
    for (const auto& [col, cs] : col_sum) {
      const double expected =
          static_cast<double>(rs) * static_cast<double>(cs) / static_cast<double>(total);
      if (expected <= 0.0) continue;
      auto it = cells.find({row, col});
      const double observed = it == cells.end() ? 0.0 : static_cast<double>(it->second);
      double d = std::fabs(observed - expected);
      if (yates) d = std::max(0.0, d - 0.5);
      stat += d * d / expected;
    }
  }
  const double df = static_cast<double>((r - 1) * (c - 1));
  return gsl_cdf_chisq_Q(stat, df);
}

}  // namespace

PastIndependenceResult past_independence_test(const Timeline& tl, const EventStream& stream,
                                              int lag, double significance, int min_samples) {
  if (lag < 1) throw InputError("past_independence_test: lag must be >= 1");
  if (!(significance > 0.0 && significance < 1.0)) {
    throw InputError("past_independence_test: significance must be in (0, 1)");
  }
  check_aligned(tl, stream);
  const int n = stream.total_steps;

  // canonical key of each moment's tick (0 = no tick)
  std::vector<int> tick_key(n + 1, 0);
  std::map<std::vector<EventId>, int> key_index;
  for (const auto& tick : stream.ticks) {
    std::vector<EventId> sorted = tick.events;
    std::sort(sorted.begin(), sorted.end());
    auto [it, fresh] = key_index.emplace(std::move(sorted), static_cast<int>(key_index.size()) + 1);
    tick_key[tick.t] = it->second;
  }

  // per state: contingency of (lag-window key) x (current key)
  std::map<StateId, std::map<std::pair<int, int>, std::int64_t>> tables;
  std::map<std::vector<int>, int> row_index;
  std::int64_t usable = 0;
  for (int t = lag + 1; t <= n; ++t) {
    std::vector<int> row(lag);
    for (int j = 1; j <= lag; ++j) row[j - 1] = tick_key[t - j];
    auto [it, fresh] = row_index.emplace(std::move(row), static_cast<int>(row_index.size()));
    const StateId s = tl.state_at[t - 1];
    ++tables[s][{it->second, tick_key[t]}];
    ++usable;
  }

  PastIndependenceResult res;
  if (usable < min_samples) {
    res.verdict = PastVerdict::Inconclusive;
    return res;
  }

  struct StateP {
    StateId state;
    double p;
  };
  std::vector<StateP> tested;
  for (const auto& [s, cells] : tables) {
    std::set<int> rows, cols;
    for (const auto& [rc, cnt] : cells) {
      rows.insert(rc.first);
      cols.insert(rc.second);
    }
    if (rows.size() < 2 || cols.size() < 2) continue;  // no evidence possible
    tested.push_back({s, chi_square_p(cells)});
  }

  res.states_tested = static_cast<int>(tested.size());
  res.worst_p = 1.0;
  for (const auto& sp : tested) {
    if (sp.p < res.worst_p) {
      res.worst_p = sp.p;
      res.worst_state = sp.state;
    }
  }
  const double corrected =
      tested.empty() ? significance : significance / static_cast<double>(tested.size());
  res.verdict = (!tested.empty() && res.worst_p < corrected) ? PastVerdict::PastDependent
                                                             : PastVerdict::PastIndependentAtLag;
  return res;
}

ReverseOracle::ReverseOracle(const EventDrivenModel& m, std::vector<TraceConstraint> constraints,
                             std::uint64_t seed)
    : model_(&m), constraints_(std::move(constraints)), seed_(seed) {
  for (const auto& c : constraints_) {
    if (c.state < 0 || c.state >= m.num_states()) {
      throw InputError("trace constraint references an unknown state");
    }
    if (c.event < 0 || c.event >= m.num_events()) {
      throw InputError("trace constraint references an unknown event");
    }
    if (c.weight < 0.0) throw InputError("trace constraint weight must be nonnegative");
  }
}

double ReverseOracle::arrow_weight(StateId state, EventId event) const {
  double w = 1.0;
  for (const auto& c : constraints_) {
    if (c.state == state && c.event == event) w *= c.weight;
  }
  return w;
}

StateId ReverseOracle::choose(const TransitionChoice& q) const {
  if (q.candidates.empty()) {
    throw MissingOracleError("reverse oracle queried with no candidate arrows");
  }
  const double w = arrow_weight(q.state, static_cast<EventId>(q.label));
  if (w <= 0.0) ++fallbacks_;  // every candidate violates; least-violating = any of them
  const std::uint64_t i =
      keyed_pick(seed_, static_cast<std::uint64_t>(q.t),
                 static_cast<std::uint64_t>(q.label) + 0x811c, q.candidates.size(),
                 q.candidates.size());
  return q.candidates[i];
}

std::shared_ptr<const TransitionOracle> ReverseOracle::with_seed(std::uint64_t seed) const {
  return std::make_shared<ReverseOracle>(*model_, constraints_, seed);
}

ReverseOracle::OutgoingArrow ReverseOracle::generate(StateId state, int t,
                                                     const RealizedFuture* future) const {
  struct Cand {
    EventId event;
    StateId target;
    double weight;
    int violation;
  };
  std::vector<Cand> cands;
  for (EventId e = 0; e < model_->num_events(); ++e) {
    const double w = arrow_weight(state, e);
    const bool future_ok =
        !future || future->labels.empty() || future->labels.front() == static_cast<std::int32_t>(e);
    for (StateId target : model_->targets(state, e)) {
      const int violation = (future_ok ? 0 : 2) + (w > 0.0 ? 0 : 1);
      cands.push_back({e, target, future_ok ? w : 0.0, violation});
    }
  }
  if (cands.empty()) {
    throw MissingOracleError("generate: state has no outgoing arrows at all");
  }

  double total = 0.0;
  for (const auto& c : cands) total += c.weight;
  if (total <= 0.0) {
    // no compliant arrow: fall back to the least-violating one
    ++fallbacks_;
    const Cand* best = &cands.front();
    for (const auto& c : cands) {
      if (c.violation < best->violation) best = &c;
    }
    return {best->event, best->target};
  }

  const double u = keyed_real01(seed_, static_cast<std::uint64_t>(t),
                                static_cast<std::uint64_t>(state) + 0x9d2c, 0x51) *
                   total;
  double acc = 0.0;
  for (const auto& c : cands) {
    acc += c.weight;
    if (u < acc) return {c.event, c.target};
  }
  return {cands.back().event, cands.back().target};
}

GeneratedRun generate_run(const EventDrivenModel& m, const ReverseOracle& oracle, int ticks,
                          StateId start) {
  m.validate();
  if (start < 0 || start >= m.num_states()) throw InputError("generate_run: bad start state");
  GeneratedRun run;
  run.stream.total_steps = ticks;
  for (const auto& e : m.events) run.stream.event_names.push_back(e.name);
  run.states.push_back(start);
  StateId state = start;
  for (int t = 1; t <= ticks; ++t) {
    const auto arrow = oracle.generate(state, t);
    run.stream.ticks.push_back(Tick{t, {arrow.event}});
    state = arrow.target;
    run.states.push_back(state);
  }
  run.fallbacks = oracle.fallback_count();
  return run;
}

}  // namespace onelife
