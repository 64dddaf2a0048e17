#include "doctest.h"

#include <cmath>

#include "onelife/evaluation.hpp"
#include "onelife/rng.hpp"

using namespace onelife;

namespace {

ScoreSequence seq1(std::vector<Score> scores) {
  ScoreSequence s;
  s.arity = 1;
  for (auto& v : scores) s.rows.push_back({v});
  return s;
}

ScoreSequence random_life(Rng& rng, int len, bool allow_undef) {
  ScoreSequence s;
  s.arity = 2;
  for (int i = 0; i < len; ++i) {
    ScoreVector row(2);
    for (auto& cell : row) {
      if (!allow_undef || !rng.bernoulli(0.25)) {
        cell = static_cast<double>(rng.below(11)) - 5.0;
      }
    }
    s.rows.push_back(std::move(row));
  }
  return s;
}

const CompareMode kPareto{};

}  // namespace

TEST_CASE("life_mean skips Undef instead of zeroing it") {
  const ScoreVector m = life_mean(seq1({1.0, std::nullopt, 3.0}));
  REQUIRE(m[0].has_value());
  CHECK(*m[0] == 2.0);

  const ScoreVector all_undef = life_mean(seq1({std::nullopt, std::nullopt}));
  CHECK_FALSE(all_undef[0].has_value());

  // tournament-style averaging of win/win/loss
  const ScoreVector wl = life_mean(seq1({1.0, 1.0, -1.0}));
  CHECK(*wl[0] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("inserting an all-Undef step never changes the mean") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    ScoreSequence s = random_life(rng, 1 + static_cast<int>(rng.below(20)), true);
    const ScoreVector before = life_mean(s);
    const auto pos = rng.below(s.rows.size() + 1);
    s.rows.insert(s.rows.begin() + static_cast<std::ptrdiff_t>(pos), ScoreVector(2));
    const ScoreVector after = life_mean(s);
    CHECK(before == after);
  }
}

TEST_CASE("pareto comparison") {
  CHECK(compare_finite({{2.0}, {5.0}}, {{1.0}, {7.0}}, kPareto) == Relation::Incomparable);
  CHECK(compare_finite({{2.0}, {5.0}}, {{2.0}, {5.0}}, kPareto) == Relation::Equal);
  CHECK(compare_finite({{2.0}, {5.0}}, {{1.0}, {5.0}}, kPareto) == Relation::Better);
  CHECK(compare_finite({{1.0}, {5.0}}, {{2.0}, {5.0}}, kPareto) == Relation::Worse);
  // Undef against a number cannot be ranked
  CHECK(compare_finite({std::nullopt}, {{1.0}}, kPareto) == Relation::Incomparable);
  CHECK(compare_finite({std::nullopt}, {std::nullopt}, kPareto) == Relation::Equal);
  CHECK_THROWS_AS(compare_finite({{1.0}}, {{1.0}, {2.0}}, kPareto), InputError);
}

TEST_CASE("lexicographic priority makes casualties infinitely expensive") {
  CompareMode lex;
  lex.kind = CompareMode::Kind::Lexicographic;
  lex.priority = {1, 0};  // casualties first, then delays
  // (delays 10, casualties 0) beats (delays 1, casualties 1): fewer
  // casualties win regardless of delays; note lower is better is the
  // caller's encoding, so negate
  const ScoreVector a = {{-10.0}, {0.0}};
  const ScoreVector b = {{-1.0}, {-1.0}};
  CHECK(compare_finite(a, b, lex) == Relation::Better);
  // at equal casualties the delays decide
  const ScoreVector c = {{-1.0}, {0.0}};
  CHECK(compare_finite(c, a, lex) == Relation::Better);
}

TEST_CASE("positive scaling preserves the pareto relation") {
  // power-of-two factors commute exactly with rounding, so the check is
  // exact rather than tolerance-based
  const double factors[] = {0.25, 0.5, 2.0, 4.0, 8.0};
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    ScoreSequence a = random_life(rng, 10, true);
    ScoreSequence b = random_life(rng, 10, true);
    const double c = factors[rng.below(5)];
    auto scale = [&](ScoreSequence s) {
      for (auto& row : s.rows) {
        for (auto& cell : row) {
          if (cell) cell = *cell * c;
        }
      }
      return s;
    };
    const Relation before = compare_finite(life_mean(a), life_mean(b), kPareto);
    const Relation after = compare_finite(life_mean(scale(a)), life_mean(scale(b)), kPareto);
    CHECK(before == after);
  }
}

TEST_CASE("identical lives are equal with witness zero") {
  Rng rng(4);
  const ScoreSequence life = random_life(rng, 64, true);
  const auto schedule = default_horizon_schedule();
  const LifeVerdict v = compare_lives(life, life, kPareto, schedule);
  CHECK(v.relation == LifeRelation::Equal);
  CHECK(v.witness == 0);
  CHECK(v.to_string() == "equal,n=0");
}

TEST_CASE("eventual dominance yields a finite witness") {
  // life1 scores 0 for 8 steps then 1 forever; life2 scores 0.5 then 0
  ScoreSequence l1, l2;
  l1.arity = l2.arity = 1;
  for (int i = 0; i < 2048; ++i) {
    l1.rows.push_back({Score(i < 8 ? 0.0 : 1.0)});
    l2.rows.push_back({Score(i < 8 ? 0.5 : 0.0)});
  }
  const auto schedule = default_horizon_schedule();
  const LifeVerdict v = compare_lives(l1, l2, kPareto, schedule);
  CHECK(v.relation == LifeRelation::Better);
  REQUIRE(v.witness.has_value());
  CHECK(*v.witness == 9);  // the last failing scheduled prefix is k=8

  // direct prefix-mean oracle at each scheduled k
  for (std::int64_t k : schedule) {
    const Relation r =
        compare_finite(life_mean_prefix(l1, k), life_mean_prefix(l2, k), kPareto);
    if (k >= *v.witness) CHECK(r == Relation::Better);
  }
}

TEST_CASE("perpetual oscillation stays undetermined") {
  // advantage flips between consecutive powers of two out to the schedule max
  ScoreSequence l1, l2;
  l1.arity = l2.arity = 1;
  const int len = 1 << 20;
  for (int i = 0; i < len; ++i) {
    const int block = static_cast<int>(std::floor(std::log2(i + 1)));
    const double v = block % 2 == 0 ? 1.0 : -1.0;
    l1.rows.push_back({Score(v)});
    l2.rows.push_back({Score(-v)});
  }
  const auto schedule = default_horizon_schedule();
  const LifeVerdict v = compare_lives(l1, l2, kPareto, schedule);
  CHECK(v.relation == LifeRelation::Undetermined);
  CHECK_FALSE(v.witness.has_value());
  CHECK(v.to_string() == "undetermined");
}

TEST_CASE("reflexivity holds on random lives") {
  Rng rng(77);
  const auto schedule = default_horizon_schedule();
  for (int trial = 0; trial < 500; ++trial) {
    const ScoreSequence life = random_life(rng, 1 + static_cast<int>(rng.below(40)), true);
    const LifeVerdict v = compare_lives(life, life, kPareto, schedule);
    CHECK(v.relation == LifeRelation::Equal);
    CHECK(v.witness == 0);
  }
}

TEST_CASE("transitivity of the mean comparison has no counterexamples") {
  Rng rng(123);
  int chains = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const ScoreSequence a = random_life(rng, 12, true);
    const ScoreSequence b = random_life(rng, 12, true);
    const ScoreSequence c = random_life(rng, 12, true);
    auto ge = [&](const ScoreSequence& x, const ScoreSequence& y) {
      const Relation r = compare_finite(life_mean(x), life_mean(y), kPareto);
      return r == Relation::Better || r == Relation::Equal;
    };
    if (ge(a, b) && ge(b, c)) {
      ++chains;
      CHECK(ge(a, c));
    }
  }
  CHECK(chains > 0);
}

TEST_CASE("half-wise dominance implies whole-life dominance on defined scores") {
  Rng rng(9);
  int applicable = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int half = 1 + static_cast<int>(rng.below(12));
    const ScoreSequence l1 = random_life(rng, 2 * half, false);
    const ScoreSequence l2 = random_life(rng, 2 * half, false);
    auto half_seq = [&](const ScoreSequence& s, int which) {
      ScoreSequence out;
      out.arity = s.arity;
      const auto begin = s.rows.begin() + static_cast<std::ptrdiff_t>(which * half);
      out.rows.assign(begin, begin + half);
      return out;
    };
    auto ge = [&](const ScoreVector& x, const ScoreVector& y) {
      const Relation r = compare_finite(x, y, kPareto);
      return r == Relation::Better || r == Relation::Equal;
    };
    if (ge(life_mean(half_seq(l1, 0)), life_mean(half_seq(l2, 0))) &&
        ge(life_mean(half_seq(l1, 1)), life_mean(half_seq(l2, 1)))) {
      ++applicable;
      CHECK(ge(life_mean(l1), life_mean(l2)));
    }
  }
  CHECK(applicable > 0);
}

TEST_CASE("compare_lives validates its schedule") {
  const ScoreSequence life = seq1({1.0});
  CHECK_THROWS_AS(compare_lives(life, life, kPareto, {}), InputError);
  const std::vector<std::int64_t> bad = {0};
  CHECK_THROWS_AS(compare_lives(life, life, kPareto, bad), InputError);
}
