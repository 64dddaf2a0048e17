#include "doctest.h"

#include <map>

#include "onelife/batch.hpp"
#include "onelife/world.hpp"
#include "test_util.hpp"

using namespace onelife;
using testutil::make_w1;
using testutil::make_w1_blocked;

namespace {

RandomWorld make_random_world(int states, int actions, int observations, double density,
                              std::uint64_t gen_seed, std::uint64_t oracle_seed) {
  // take a generated perfect world and fan each arrow out to two candidates
  const PerfectWorld base = generate_world(states, actions, observations, density, gen_seed);
  std::vector<std::vector<StateId>> succ;
  Rng rng = Rng(gen_seed).substream("fanout");
  for (StateId s = 0; s < base.num_states(); ++s) {
    for (ActionId a = 0; a < base.num_actions(); ++a) {
      std::vector<StateId> list = {base.next(s, a)};
      const StateId extra = static_cast<StateId>(rng.below(states));
      if (extra != list[0]) list.push_back(extra);
      succ.push_back(std::move(list));
    }
  }
  std::vector<std::uint8_t> incorrect;
  for (StateId s = 0; s < base.num_states(); ++s) {
    for (ActionId a = 0; a < base.num_actions(); ++a) {
      incorrect.push_back(base.is_incorrect(s, a) ? 1 : 0);
    }
  }
  OracleBundle bundle;
  bundle.seed = oracle_seed;
  return RandomWorld(base.labels(), std::move(succ), base.view_table(), std::move(incorrect), 0,
                     std::move(bundle));
}

}  // namespace

TEST_CASE("step follows the single deterministic arrow") {
  PerfectWorld w = make_w1();
  const StepOutcome out = step(w, w.labels().action_id("a"));
  CHECK(out.moved);
  CHECK(w.labels().observations[out.observation] == "black");
  CHECK(w.current() == w.labels().state_id("s2"));
}

TEST_CASE("rejected step leaves the state unchanged") {
  PerfectWorld w = make_w1_blocked();
  w.set_current(w.labels().state_id("s2"));
  const StepOutcome out = step(w, w.labels().action_id("a"));
  CHECK_FALSE(out.moved);
  CHECK(w.current() == w.labels().state_id("s2"));
}

TEST_CASE("step rejects unknown actions") {
  PerfectWorld w = make_w1();
  CHECK_THROWS_AS(step(w, 17), InputError);
}

TEST_CASE("random world replay is identical under one seed") {
  RandomWorld w = make_random_world(9, 3, 4, 0.0, 42, 42);
  auto run = [&]() {
    RandomWorld copy = w;
    copy.set_oracles(copy.oracles().reseeded(42));
    std::vector<std::pair<bool, ObsId>> log;
    Rng action_rng(5);
    std::uint64_t digest = 0;
    for (int t = 0; t < 100; ++t) {
      const auto a = static_cast<ActionId>(action_rng.below(3));
      const StepOutcome out = step(copy, a, StepContext{t, digest, nullptr});
      log.emplace_back(out.moved, out.observation);
      digest = mix64(digest, static_cast<std::uint64_t>(a));
    }
    return log;
  };
  CHECK(run() == run());
}

namespace {

// always answers with a state that has no matching arrow
class RogueOracle final : public TransitionOracle {
 public:
  StateId choose(const TransitionChoice&) const override { return 0; }
  std::shared_ptr<const TransitionOracle> with_seed(std::uint64_t) const override {
    return std::make_shared<RogueOracle>();
  }
};

}  // namespace

TEST_CASE("an oracle answering off the relation is an oracle error") {
  WorldLabels labels;
  labels.states = {"s1", "s2"};
  labels.actions = {"a"};
  labels.observations = {"o"};
  OracleBundle bundle;
  bundle.transition = std::make_shared<RogueOracle>();
  // the only arrow from s1 goes to s2, but the rogue oracle says s1
  RandomWorld w(labels, {{1}, {0}}, {0, 0}, {0, 0}, 0, std::move(bundle));
  CHECK_THROWS_AS(step(w, 0), MissingOracleError);
}

TEST_CASE("construction checks totality") {
  WorldLabels labels;
  labels.states = {"s1", "s2"};
  labels.actions = {"a"};
  labels.observations = {"o"};
  CHECK_THROWS_AS(PerfectWorld(labels, {1}, {0, 0}, {0, 0}, 0), InputError);  // missing entry
  CHECK_THROWS_AS(PerfectWorld(labels, {1, 5}, {0, 0}, {0, 0}, 0), InputError);  // bad target
}

TEST_CASE("classify_state follows the usable subgraph") {
  // s1 -a-> s2, s1 -b-> s1 (usable self-loop), s2: everything incorrect
  WorldLabels labels;
  labels.states = {"s1", "s2", "s3"};
  labels.actions = {"a", "b"};
  labels.observations = {"o"};
  // transitions: s1: a->s2 b->s1; s2: a->s3 b->s3; s3: a->s1 b->s1
  std::vector<StateId> tr = {1, 0, 2, 2, 0, 0};
  // s2 has every action incorrect; arrows out of it never count as inbound
  std::vector<std::uint8_t> inc = {0, 0, 1, 1, 0, 0};
  PerfectWorld w(labels, tr, {0, 0, 0}, inc, 0);

  CHECK(classify_state(w, 1) == StateClass::SuddenDeath);
  // s1 has a usable self-loop, so it is ordinary, never absolute beginning
  CHECK(classify_state(w, 0) == StateClass::Ordinary);
  // s3's only inbound arrows start at the dead state s2, so none is usable
  CHECK(classify_state(w, 2) == StateClass::AbsoluteBeginning);
  CHECK_THROWS_AS(classify_state(w, 9), InputError);
}

TEST_CASE("sudden death wins when a state is also unreachable") {
  WorldLabels labels;
  labels.states = {"s1", "s2"};
  labels.actions = {"a"};
  labels.observations = {"o"};
  // s2 unreachable (s1 loops) and all-incorrect
  PerfectWorld w(labels, {0, 0}, {0, 0}, {0, 1}, 0);
  CHECK(classify_state(w, 1) == StateClass::SuddenDeath);
}

TEST_CASE("run_life with horizon 0 is an empty natural death") {
  PerfectWorld w = make_w1();
  UniformPolicy policy;
  const LifeRecord rec = run_life(w, policy, 0, 1);
  CHECK(rec.history.steps.empty());
  CHECK(rec.path.visited.empty());
  CHECK(rec.cause == TerminationCause::NaturalDeath);
}

TEST_CASE("run_life stops immediately in a sudden-death state") {
  WorldLabels labels;
  labels.states = {"s1"};
  labels.actions = {"a"};
  labels.observations = {"o"};
  PerfectWorld w(labels, {0}, {0}, {1}, 0);
  UniformPolicy policy;
  const LifeRecord rec = run_life(w, policy, 10, 1);
  CHECK(rec.history.steps.empty());
  CHECK(rec.cause == TerminationCause::SuddenDeath);
}

TEST_CASE("run_life records exactly horizon observations") {
  PerfectWorld w = make_w1();
  UniformPolicy policy;
  const LifeRecord rec = run_life(w, policy, 1000, 7);
  CHECK(rec.history.steps.size() == 1000);
  CHECK(rec.path.visited.size() == 1000);
  std::map<ObsId, int> counts;
  for (const auto& s : rec.history.steps) ++counts[s.observation];
  CHECK(counts[0] + counts[1] == 1000);
  // observations match the ground-truth path's views
  for (std::size_t i = 0; i < rec.path.visited.size(); ++i) {
    CHECK(rec.history.steps[i].observation == w.observation(rec.path.visited[i]));
  }
}

TEST_CASE("run_life replay determinism across world kinds") {
  UniformPolicy p1, p2;
  PerfectWorld pw = generate_world(9, 3, 4, 0.3, 11);
  const LifeRecord a = run_life(pw, p1, 500, 123);
  const LifeRecord b = run_life(pw, p2, 500, 123);
  CHECK(a.history == b.history);
  CHECK(a.path.visited == b.path.visited);
  CHECK(a.cause == b.cause);

  RandomWorld rw = make_random_world(9, 3, 4, 0.3, 11, 0);
  UniformPolicy p3, p4;
  const LifeRecord c = run_life(rw, p3, 500, 123);
  const LifeRecord d = run_life(rw, p4, 500, 123);
  CHECK(c.history == d.history);
  CHECK(c.path.visited == d.path.visited);
}

TEST_CASE("rejections never move the ground-truth state") {
  // world-side invariant: between two moved steps the state is constant, so
  // each recorded step's transition must come from the state before it
  PerfectWorld w = generate_world(6, 4, 3, 0.4, 3);
  UniformPolicy policy;
  const LifeRecord rec = run_life(w, policy, 300, 9);
  bool saw_rejection = false;
  StateId cur = rec.path.start;
  for (std::size_t i = 0; i < rec.history.steps.size(); ++i) {
    const auto& st = rec.history.steps[i];
    saw_rejection = saw_rejection || !st.bad_before.empty();
    for (ActionId bad : st.bad_before) CHECK(w.is_incorrect(cur, bad));
    CHECK_FALSE(w.is_incorrect(cur, st.action));
    CHECK(w.next(cur, st.action) == rec.path.visited[i]);
    cur = rec.path.visited[i];
  }
  CHECK(saw_rejection);  // density 0.4 must produce some rejected tries
}

TEST_CASE("policies are total and reproducible") {
  PerfectWorld w = make_w1();
  auto scripted = make_policy("scripted:a,b,a", w.labels());
  const LifeRecord rec = run_life(w, *scripted, 6, 1);
  std::vector<std::string> acts;
  for (const auto& s : rec.history.steps) acts.push_back(w.labels().actions[s.action]);
  CHECK(acts == std::vector<std::string>{"a", "b", "a", "a", "b", "a"});

  auto eps = make_policy("repeat-eps:0.25", w.labels());
  const LifeRecord r2 = run_life(w, *eps, 200, 5);
  CHECK(r2.history.steps.size() == 200);

  CHECK_THROWS_AS(make_policy("nonsense", w.labels()), InputError);
  CHECK_THROWS_AS(make_policy("repeat-eps:2.0", w.labels()), InputError);
}

TEST_CASE("generate_world is deterministic and validates") {
  const PerfectWorld a = generate_world(9, 3, 4, 0.2, 5);
  const PerfectWorld b = generate_world(9, 3, 4, 0.2, 5);
  CHECK(a.transition_table() == b.transition_table());
  CHECK(a.view_table() == b.view_table());
  for (StateId s = 0; s < a.num_states(); ++s) {
    CHECK_FALSE(a.all_incorrect(s));  // no sudden death unless requested
    CHECK(a.incorrect_set(s) == b.incorrect_set(s));
  }
  CHECK_THROWS_AS(generate_world(0, 1, 1, 0.0, 1), InputError);
  CHECK_THROWS_AS(generate_world(1, 1, 1, 1.0, 1), InputError);
}

TEST_CASE("one-state zero-density world is the self-loop") {
  const PerfectWorld w = generate_world(1, 1, 1, 0.0, 9);
  CHECK(w.num_states() == 1);
  CHECK(w.next(0, 0) == 0);
  CHECK_FALSE(w.is_incorrect(0, 0));
}

TEST_CASE("batch runner matches the serial reference and ignores job count") {
  PerfectWorld w = generate_world(5, 3, 3, 0.2, 21);
  PolicyFactory factory = [] { return std::make_unique<UniformPolicy>(); };
  const auto serial = run_lives_serial(w, factory, 50, 20, 77);
  const auto par1 = run_lives(w, factory, 50, 20, 77, 1);
  const auto par2 = run_lives(w, factory, 50, 20, 77, 2);
  REQUIRE(serial.size() == 20);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].history == par1[i].history);
    CHECK(serial[i].history == par2[i].history);
    CHECK(serial[i].path.visited == par2[i].path.visited);
  }
}
