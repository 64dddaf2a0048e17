#include "onelife/evaluation.hpp"

#include <algorithm>

namespace onelife {

void ScoreSequence::push(ScoreVector row) {
  if (rows.empty() && arity == 0) arity = row.size();
  if (row.size() != arity) throw InputError("score row arity mismatch");
  rows.push_back(std::move(row));
}

ScoreSequence score_life(const History& h, const RewardMap& rewards) {
  ScoreSequence out;
  out.arity = rewards.arity;
  for (const auto& s : h.steps) {
    const auto obs = static_cast<std::size_t>(s.observation);
    if (obs >= rewards.by_observation.size()) {
      throw InputError("reward map does not cover observation id " + std::to_string(s.observation));
    }
    out.push(rewards.by_observation[obs]);
  }
  return out;
}

ScoreVector life_mean_prefix(const ScoreSequence& scores, std::int64_t k) {
  const std::int64_t n = std::min<std::int64_t>(k, scores.length());
  ScoreVector out(scores.arity);
  std::vector<double> sum(scores.arity, 0.0);
  std::vector<std::int64_t> defined(scores.arity, 0);
  for (std::int64_t i = 0; i < n; ++i) {
    const ScoreVector& row = scores.rows[static_cast<std::size_t>(i)];
    for (std::size_t c = 0; c < scores.arity; ++c) {
      if (row[c]) {
        sum[c] += *row[c];
        ++defined[c];
      }
    }
  }
  for (std::size_t c = 0; c < scores.arity; ++c) {
    if (defined[c] > 0) out[c] = sum[c] / static_cast<double>(defined[c]);
  }
  return out;
}

ScoreVector life_mean(const ScoreSequence& scores) {
  return life_mean_prefix(scores, scores.length());
}

const char* to_string(Relation r) {
  switch (r) {
    case Relation::Better: return "better";
    case Relation::Worse: return "worse";
    case Relation::Equal: return "equal";
    default: return "incomparable";
  }
}

Relation compare_finite(const ScoreVector& v1, const ScoreVector& v2, const CompareMode& mode) {
  if (v1.size() != v2.size()) throw InputError("compare_finite: arity mismatch");

  if (mode.kind == CompareMode::Kind::Lexicographic) {
    std::vector<std::size_t> order = mode.priority;
    if (order.empty()) {
      order.resize(v1.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    }
    for (std::size_t c : order) {
      if (c >= v1.size()) throw InputError("priority index out of range");
      const Score& a = v1[c];
      const Score& b = v2[c];
      if (!a && !b) continue;
      if (!a || !b) return Relation::Incomparable;
      if (*a > *b) return Relation::Better;
      if (*a < *b) return Relation::Worse;
    }
    return Relation::Equal;
  }

  bool any_up = false, any_down = false;
  for (std::size_t c = 0; c < v1.size(); ++c) {
    const Score& a = v1[c];
    const Score& b = v2[c];
    if (!a && !b) continue;
    if (!a || !b) return Relation::Incomparable;
    if (*a > *b) any_up = true;
    if (*a < *b) any_down = true;
  }
  if (any_up && any_down) return Relation::Incomparable;
  if (any_up) return Relation::Better;
  if (any_down) return Relation::Worse;
  return Relation::Equal;
}

std::vector<std::int64_t> default_horizon_schedule() {
  std::vector<std::int64_t> out;
  for (std::int64_t k = 1; k <= (1 << 20); k *= 2) out.push_back(k);
  return out;
}

std::string LifeVerdict::to_string() const {
  std::string out;
  switch (relation) {
    case LifeRelation::Better: out = "better"; break;
    case LifeRelation::Worse: out = "worse"; break;
    case LifeRelation::Equal: out = "equal"; break;
    case LifeRelation::Incomparable: out = "incomparable"; break;
    default: out = "undetermined"; break;
  }
  if (witness) out += ",n=" + std::to_string(*witness);
  return out;
}

LifeVerdict compare_lives(const ScoreSequence& life1, const ScoreSequence& life2,
                          const CompareMode& mode, std::span<const std::int64_t> schedule,
                          int stability_window) {
  if (schedule.empty()) throw InputError("compare_lives: empty horizon schedule");
  if (life1.arity != life2.arity) throw InputError("compare_lives: arity mismatch");
  std::vector<std::int64_t> ks(schedule.begin(), schedule.end());
  std::sort(ks.begin(), ks.end());
  for (std::int64_t k : ks) {
    if (k < 1) throw InputError("compare_lives: schedule entries must be >= 1");
  }

  // incremental prefix sums, evaluated at each scheduled k
  const std::int64_t max_len = std::max(life1.length(), life2.length());
  std::vector<double> sum1(life1.arity, 0.0), sum2(life1.arity, 0.0);
  std::vector<std::int64_t> def1(life1.arity, 0), def2(life1.arity, 0);
  auto mean_of = [&](const std::vector<double>& sum, const std::vector<std::int64_t>& def) {
    ScoreVector out(life1.arity);
    for (std::size_t c = 0; c < life1.arity; ++c) {
      if (def[c] > 0) out[c] = sum[c] / static_cast<double>(def[c]);
    }
    return out;
  };
  auto absorb = [&](const ScoreSequence& life, std::int64_t i, std::vector<double>& sum,
                    std::vector<std::int64_t>& def) {
    if (i >= life.length()) return;
    const ScoreVector& row = life.rows[static_cast<std::size_t>(i)];
    for (std::size_t c = 0; c < life.arity; ++c) {
      if (row[c]) {
        sum[c] += *row[c];
        ++def[c];
      }
    }
  };

  std::vector<Relation> relations;
  relations.reserve(ks.size());
  std::int64_t absorbed = 0;
  for (std::int64_t k : ks) {
    const std::int64_t upto = std::min(k, max_len);
    for (; absorbed < upto; ++absorbed) {
      absorb(life1, absorbed, sum1, def1);
      absorb(life2, absorbed, sum2, def2);
    }
    relations.push_back(compare_finite(mean_of(sum1, def1), mean_of(sum2, def2), mode));
  }

  const Relation last = relations.back();
  const int window = std::min<int>(stability_window, static_cast<int>(relations.size()));
  for (int i = 0; i < window; ++i) {
    if (relations[relations.size() - 1 - static_cast<std::size_t>(i)] != last) {
      return {LifeRelation::Undetermined, std::nullopt};
    }
  }
  if (last == Relation::Incomparable) return {LifeRelation::Incomparable, std::nullopt};

  std::int64_t witness = 0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (relations[i] != last) witness = ks[i] + 1;
  }
  LifeVerdict v;
  v.relation = last == Relation::Better   ? LifeRelation::Better
               : last == Relation::Worse  ? LifeRelation::Worse
                                          : LifeRelation::Equal;
  v.witness = witness;
  return v;
}

}  // namespace onelife
