#include "doctest.h"

#include "onelife/history.hpp"
#include "onelife/world.hpp"
#include "test_util.hpp"

using namespace onelife;
using testutil::make_w1;
using testutil::make_w1_blocked;

namespace {

History alternating_ab(int steps) {
  // a,b,a,b,... all observing obs 0
  History h;
  for (int i = 0; i < steps; ++i) h.steps.push_back({{}, i % 2 == 0 ? 0 : 1, 0});
  return h;
}

VisibleEvent last_action_is(ActionId a) {
  StepPattern p;
  p.action = a;
  return {"last-action", {{p}}};
}

}  // namespace

TEST_CASE("truncated strips bad sets") {
  CHECK(truncated(History{}).token_count() == 0);

  History h;
  h.steps.push_back({{1}, 0, 0});  // bad={b}, a, white
  const TruncatedHistory t = truncated(h);
  REQUIRE(t.moves.size() == 1);
  CHECK(t.moves[0] == std::pair<ActionId, ObsId>{0, 0});
  CHECK_FALSE(t.pending_action.has_value());

  History big = alternating_ab(1000);
  CHECK(truncated(big).token_count() == 2000);
  big.pending = PendingStep{{}, 0};
  CHECK(truncated(big).token_count() == 2001);
}

TEST_CASE("rebuilding with empty bad sets round-trips through truncated") {
  const History h = alternating_ab(25);
  const TruncatedHistory t = truncated(h);
  History rebuilt;
  for (const auto& [a, o] : t.moves) rebuilt.steps.push_back({{}, a, o});
  CHECK(rebuilt == h);
}

TEST_CASE("local returns exactly the final k steps") {
  const History h = alternating_ab(10);
  CHECK(local(h, 0).length() == 0);
  CHECK(local(h, 10).suffix == h.steps);
  const LocalHistory l = local(h, 3);
  REQUIRE(l.length() == 3);
  for (int i = 0; i < 3; ++i) CHECK(l.suffix[i] == h.steps[7 + i]);
  CHECK_THROWS_AS(local(h, 11), InputError);
}

TEST_CASE("local slicing partitions the history") {
  const History h = alternating_ab(17);
  for (int k = 0; k <= 17; ++k) {
    std::vector<HistoryStep> joined(h.steps.begin(), h.steps.end() - k);
    const LocalHistory tail = local(h, k);
    joined.insert(joined.end(), tail.suffix.begin(), tail.suffix.end());
    CHECK(joined == h.steps);
  }
}

TEST_CASE("full_from_trace on a world with no incorrect moves") {
  PerfectWorld w = make_w1();
  UniformPolicy policy;
  const LifeRecord rec = run_life(w, policy, 50, 3);
  const FullHistory full = full_from_trace(rec.history, rec.path,
                                           [&](StateId s) { return w.incorrect_set(s); });
  for (const auto& s : full.steps) CHECK(s.full_before.empty());
}

TEST_CASE("full_from_trace looks up the incorrect table") {
  PerfectWorld w = make_w1_blocked();  // incorrect(s2) = {a}
  History h;
  h.steps.push_back({{}, 0, 1});   // s1 -a-> s2
  h.steps.push_back({{0}, 1, 1});  // tried a (bad), then b self-loop
  StatePath path{0, {1, 1}};
  const FullHistory full =
      full_from_trace(h, path, [&](StateId s) { return w.incorrect_set(s); });
  CHECK(full.steps[0].full_before.empty());
  CHECK(full.steps[1].full_before == std::vector<ActionId>{0});
}

TEST_CASE("full_from_trace validates alignment and subset") {
  PerfectWorld w = make_w1();
  History h;
  h.steps.push_back({{}, 0, 1});
  auto incorrect_of = [&](StateId s) { return w.incorrect_set(s); };
  CHECK_THROWS_AS(full_from_trace(h, StatePath{0, {}}, incorrect_of), InputError);
  // claiming 'b' was rejected contradicts the empty incorrect sets
  h.steps[0].bad_before = {1};
  CHECK_THROWS_AS(full_from_trace(h, StatePath{0, {1}}, incorrect_of), ConsistencyError);
}

TEST_CASE("full_from_trace holds over random lives") {
  const PerfectWorld w = generate_world(7, 4, 3, 0.3, 100);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    UniformPolicy policy;
    const LifeRecord rec = run_life(w, policy, 500, seed);
    const FullHistory full = full_from_trace(rec.history, rec.path,
                                             [&](StateId s) { return w.incorrect_set(s); });
    REQUIRE(full.steps.size() == rec.history.steps.size());
    for (std::size_t i = 0; i < full.steps.size(); ++i) {
      for (ActionId bad : rec.history.steps[i].bad_before) {
        CHECK(std::binary_search(full.steps[i].full_before.begin(),
                                 full.steps[i].full_before.end(), bad));
      }
    }
  }
}

TEST_CASE("occurred matches a single-slot action pattern") {
  const History h = alternating_ab(10);
  const VisibleEvent ev = last_action_is(0);
  // action a fires at odd moments (steps 1,3,5,7,9 are 'a')
  for (int t = 1; t <= 10; ++t) CHECK(occurred(ev, h, t) == (t % 2 == 1));
  CHECK_FALSE(occurred(ev, h, 0));
  CHECK_THROWS_AS(occurred(ev, h, 11), InputError);
}

TEST_CASE("prefix shorter than every member cannot match") {
  StepPattern any;
  const VisibleEvent two_steps{"pair", {{any, any}}};
  const History h = alternating_ab(1);
  CHECK_FALSE(occurred(two_steps, h, 0));
  CHECK_FALSE(occurred(two_steps, h, 1));
}

TEST_CASE("tried-incorrect visible part fires on the pending bad set") {
  // the probed action sits in bad_t, the set tried at the current moment
  History h = alternating_ab(4);
  h.pending = PendingStep{{1}, 0};  // tried b, rejected; now attempting a
  StepPattern probe;
  probe.bad = BadPattern::containing(1);
  const VisibleEvent tried_b{"tried-b", {{probe}}};
  CHECK(occurred(tried_b, h, 4));
  // at earlier moments the bad sets are empty, so it never fires
  for (int t = 0; t < 4; ++t) CHECK_FALSE(occurred(tried_b, h, t));
  // a concrete observation slot can never match the pending element
  StepPattern with_obs = probe;
  with_obs.observation = 0;
  const VisibleEvent impossible{"tried-b-obs", {{with_obs}}};
  CHECK_FALSE(occurred(impossible, h, 4));
}

TEST_CASE("bad-set patterns distinguish contains from equals") {
  History h;
  h.steps.push_back({{0, 1}, 2, 0});
  StepPattern contains;
  contains.bad = BadPattern::containing(0);
  CHECK(occurred({"c", {{contains}}}, h, 1));
  StepPattern equals;
  equals.bad = BadPattern::exactly({0});
  CHECK_FALSE(occurred({"e", {{equals}}}, h, 1));
  equals.bad = BadPattern::exactly({1, 0});
  CHECK(occurred({"e2", {{equals}}}, h, 1));
}

TEST_CASE("occurred is monotone in the member set") {
  Rng rng(321);
  for (int trial = 0; trial < 50; ++trial) {
    History h;
    const int n = 1 + static_cast<int>(rng.below(12));
    for (int i = 0; i < n; ++i) {
      HistoryStep s;
      if (rng.bernoulli(0.3)) s.bad_before.push_back(static_cast<ActionId>(rng.below(2)) + 1);
      s.action = static_cast<ActionId>(rng.below(3));
      s.observation = static_cast<ObsId>(rng.below(2));
      // keep the invariant action not-in-bad
      s.bad_before.erase(std::remove(s.bad_before.begin(), s.bad_before.end(), s.action),
                         s.bad_before.end());
      h.steps.push_back(std::move(s));
    }
    auto random_pattern = [&]() {
      SuffixPattern p(1 + rng.below(2));
      for (auto& slot : p) {
        if (rng.bernoulli(0.5)) slot.action = static_cast<ActionId>(rng.below(3));
        if (rng.bernoulli(0.5)) slot.observation = static_cast<ObsId>(rng.below(2));
      }
      return p;
    };
    VisibleEvent small{"small", {random_pattern()}};
    VisibleEvent big = small;
    big.name = "big";
    big.members.push_back(random_pattern());
    for (int t = 0; t <= n; ++t) {
      if (occurred(small, h, t)) CHECK(occurred(big, h, t));
    }
  }
}

TEST_CASE("approximate summarizes tail, events, and counters") {
  const History empty;
  const ApproximateHistory a0 = approximate(empty, {0, {last_action_is(0)}});
  CHECK(a0.tail.length() == 0);
  CHECK(a0.event_moments.at("last-action").empty());
  CHECK(a0.action_counts.empty());

  const History h = alternating_ab(10);
  ApproximateConfig cfg;
  cfg.tail_length = 4;
  cfg.tracked = {last_action_is(0)};
  const ApproximateHistory a = approximate(h, cfg);
  CHECK(a.tail.suffix == local(h, 4).suffix);
  CHECK(a.event_moments.at("last-action") == std::vector<int>{1, 3, 5, 7, 9});
  CHECK(a.action_counts.at(0) == 5);
  CHECK(a.action_counts.at(1) == 5);
  CHECK(a.observation_counts.at(0) == 10);
}

TEST_CASE("approximate event log equals a brute-force suffix scan") {
  // independent oracle: re-match each member against explicit slices
  Rng rng(99);
  History h;
  for (int i = 0; i < 200; ++i) {
    HistoryStep s;
    s.action = static_cast<ActionId>(rng.below(3));
    s.observation = static_cast<ObsId>(rng.below(2));
    h.steps.push_back(s);
  }
  std::vector<VisibleEvent> events;
  for (ActionId a = 0; a < 3; ++a) {
    StepPattern one;
    one.action = a;
    StepPattern prev;
    prev.action = a;
    StepPattern anything;
    events.push_back({"ev" + std::to_string(a), {{one}, {prev, anything}}});
  }
  ApproximateConfig cfg;
  cfg.tail_length = 0;
  cfg.tracked = events;
  const ApproximateHistory a = approximate(h, cfg);

  for (const auto& ev : events) {
    std::vector<int> expected;
    for (int t = 1; t <= 200; ++t) {
      bool hit = false;
      for (const auto& member : ev.members) {
        const int len = static_cast<int>(member.size());
        if (len > t) continue;
        bool ok = true;
        for (int j = 0; j < len; ++j) {
          const HistoryStep& s = h.steps[t - len + j];
          const StepPattern& p = member[j];
          if (p.action && *p.action != s.action) ok = false;
          if (p.observation && *p.observation != s.observation) ok = false;
        }
        hit = hit || ok;
      }
      if (hit) expected.push_back(t);
    }
    CHECK(a.event_moments.at(ev.name) == expected);
  }
}

TEST_CASE("visible events validate their members") {
  VisibleEvent empty{"none", {}};
  CHECK_THROWS_AS(empty.validate(), InputError);
  VisibleEvent hollow{"hollow", {SuffixPattern{}}};
  CHECK_THROWS_AS(hollow.validate(), InputError);
}
