#pragma once

#include <string>

#include "onelife/io.hpp"
#include "onelife/world.hpp"

namespace onelife::testutil {

inline std::string data_path(const std::string& rel) {
  return std::string(ONELIFE_DATA_DIR) + "/" + rel;
}

// The 2-state white/black world: (s1,a)->s2, (s1,b)->s1, (s2,a)->s1,
// (s2,b)->s2; no incorrect moves.
inline PerfectWorld make_w1() {
  WorldLabels labels;
  labels.states = {"s1", "s2"};
  labels.actions = {"a", "b"};
  labels.observations = {"white", "black"};
  return PerfectWorld(labels, {1, 0, 0, 1}, {0, 1}, {0, 0, 0, 0}, 0);
}

// W1 with action a incorrect in s2.
inline PerfectWorld make_w1_blocked() {
  WorldLabels labels;
  labels.states = {"s1", "s2"};
  labels.actions = {"a", "b"};
  labels.observations = {"white", "black"};
  return PerfectWorld(labels, {1, 0, 0, 1}, {0, 1}, {0, 0, 1, 0}, 0);
}

inline EventDrivenModel load_edm(const std::string& rel) {
  return load_model(data_path(rel)).model.base;
}

}  // namespace onelife::testutil
