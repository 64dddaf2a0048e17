#include "onelife/history.hpp"

#include "onelife/rng.hpp"

namespace onelife {

bool BadPattern::matches(std::span<const ActionId> bad) const {
  switch (kind) {
    case Kind::Any:
      return true;
    case Kind::Contains:
      return std::binary_search(bad.begin(), bad.end(), contains);
    case Kind::Equals:
      return std::equal(bad.begin(), bad.end(), equals.begin(), equals.end());
  }
  return false;
}

void VisibleEvent::validate() const {
  if (members.empty()) throw InputError("visible event '" + name + "' has no member patterns");
  for (const auto& m : members) {
    if (m.empty()) throw InputError("visible event '" + name + "' has an empty member pattern");
  }
}

TruncatedHistory truncated(const History& h) {
  TruncatedHistory out;
  out.moves.reserve(h.steps.size());
  for (const auto& s : h.steps) out.moves.emplace_back(s.action, s.observation);
  if (h.pending) out.pending_action = h.pending->action;
  return out;
}

LocalHistory local(const History& h, int k) {
  const int n = h.step_count();
  if (k < 0 || k > n) throw InputError("local history length out of range");
  LocalHistory out;
  out.suffix.assign(h.steps.end() - k, h.steps.end());
  return out;
}

FullHistory full_from_trace(const History& h, const StatePath& path,
                            const std::function<std::vector<ActionId>(StateId)>& incorrect_of) {
  if (path.moves() != h.step_count()) {
    throw InputError("state path does not align with history: " + std::to_string(path.moves()) +
                     " moves vs " + std::to_string(h.step_count()) + " steps");
  }
  auto check_subset = [](std::span<const ActionId> bad, std::span<const ActionId> full, int moment) {
    for (ActionId a : bad) {
      if (!std::binary_search(full.begin(), full.end(), a)) {
        throw ConsistencyError("tried-bad set exceeds the world's incorrect set at moment " +
                               std::to_string(moment));
      }
    }
  };

  FullHistory out;
  out.steps.reserve(h.steps.size());
  for (int i = 0; i < h.step_count(); ++i) {
    std::vector<ActionId> full = incorrect_of(path.state_before_move(i));
    std::sort(full.begin(), full.end());
    check_subset(h.steps[i].bad_before, full, i);
    out.steps.push_back(FullStep{std::move(full), h.steps[i].action, h.steps[i].observation});
  }
  if (h.pending) {
    std::vector<ActionId> full = incorrect_of(path.final_state());
    std::sort(full.begin(), full.end());
    check_subset(h.pending->bad, full, h.step_count());
    out.pending = FullPending{std::move(full), h.pending->action};
  }
  return out;
}

namespace {

bool match_step(const StepPattern& p, const HistoryStep& s) {
  if (p.action && *p.action != s.action) return false;
  if (p.observation && *p.observation != s.observation) return false;
  return p.bad.matches(s.bad_before);
}

bool match_pending(const StepPattern& p, const PendingStep& s) {
  if (p.observation) return false;  // nothing observed yet
  if (p.action && *p.action != s.action) return false;
  return p.bad.matches(s.bad);
}

}  // namespace

bool occurred(const VisibleEvent& event, const History& h, int t) {
  const int n = h.step_count();
  if (t < 0 || t > n) throw InputError("moment out of range in occurred()");
  const bool with_pending = (t == n) && h.pending.has_value();
  const int seq_len = t + (with_pending ? 1 : 0);

  for (const auto& member : event.members) {
    const int len = static_cast<int>(member.size());
    if (len == 0 || len > seq_len) continue;
    bool ok = true;
    for (int j = 0; j < len && ok; ++j) {
      // element index from the end of the sequence
      const int pos = seq_len - len + j;
      const StepPattern& pat = member[j];
      if (with_pending && pos == seq_len - 1) {
        ok = match_pending(pat, *h.pending);
      } else {
        ok = match_step(pat, h.steps[pos]);
      }
    }
    if (ok) return true;
  }
  return false;
}

ApproximateHistory approximate(const History& h, const ApproximateConfig& config) {
  ApproximateHistory out;
  out.tail = local(h, config.tail_length);
  for (const auto& ev : config.tracked) {
    ev.validate();
    auto& moments = out.event_moments[ev.name];
    for (int t = 1; t <= h.step_count(); ++t) {
      if (occurred(ev, h, t)) moments.push_back(t);
    }
  }
  for (const auto& s : h.steps) {
    ++out.action_counts[s.action];
    ++out.observation_counts[s.observation];
  }
  return out;
}

std::uint64_t history_digest(const History& h) {
  std::uint64_t d = 0xcbf29ce484222325ull;
  for (const auto& s : h.steps) {
    for (ActionId a : s.bad_before) d = mix64(d, 0x10 + static_cast<std::uint64_t>(a));
    d = mix64(d, 0x20 + static_cast<std::uint64_t>(s.action));
    d = mix64(d, 0x30 + static_cast<std::uint64_t>(s.observation));
  }
  if (h.pending) {
    for (ActionId a : h.pending->bad) d = mix64(d, 0x40 + static_cast<std::uint64_t>(a));
    d = mix64(d, 0x50 + static_cast<std::uint64_t>(h.pending->action));
  }
  return d;
}

}  // namespace onelife
