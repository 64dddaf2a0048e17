#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "onelife/edm.hpp"
#include "onelife/types.hpp"

namespace onelife {

// One factor of a Cartesian model: a plain event-driven model or a model
// with variables. Non-owning.
struct Component {
  const EventDrivenModel* edm = nullptr;
  const VariablesModel* vm = nullptr;

  const EventDrivenModel& base() const { return vm ? vm->base : *edm; }
  bool has_variables() const { return vm && !vm->variables.empty(); }
};

struct CompositeCoord {
  StateId state = kNoState;
  EvalIndex eval = 0;

  bool operator==(const CompositeCoord&) const = default;
  auto operator<=>(const CompositeCoord&) const = default;
};

using CompositeState = std::vector<CompositeCoord>;

// Synchronous product of event-driven models. Each offered event set drives
// every component whose alphabet contains some of its events; the others
// stay put. Per-component oracle seeds derive from the master seed by
// component index, so adding a component never perturbs the others.
class CartesianModel {
 public:
  CartesianModel(std::vector<Component> components, std::uint64_t master_seed,
                 SimultaneityPolicy policy = SimultaneityPolicy::SequenceLexicographic);

  int component_count() const { return static_cast<int>(components_.size()); }
  const Component& component(int i) const { return components_[static_cast<std::size_t>(i)]; }
  const CompositeState& current() const { return current_; }
  void reset(CompositeState s);

  // Union alphabet, each name listed once (declaration order of the first
  // component that declares it).
  const std::vector<std::string>& alphabet() const { return alphabet_; }

  // Advances every component on the intersection of `event_names` with its
  // alphabet. Unknown names are input errors.
  void advance_composite(std::span<const std::string> event_names, int t = 0);

  std::uint64_t component_seed(int i) const;
  SimultaneityPolicy policy() const { return policy_; }

  // "component:state" or "component:state/evaluation" tokens joined by
  // spaces, ordered by component index.
  std::string print_state(const CompositeState& s) const;

 private:
  std::vector<Component> components_;
  std::vector<std::shared_ptr<const TransitionOracle>> oracles_;
  std::vector<std::string> alphabet_;
  CompositeState current_;
  std::uint64_t master_seed_ = 0;
  SimultaneityPolicy policy_;
};

CartesianModel cartesian(std::vector<Component> components, std::uint64_t master_seed = 0);

struct ReachableResult {
  std::set<CompositeState> states;
  bool complete = true;  // false when the cap stopped the search
};

// Breadth-first closure of the composite state space under all singleton
// events of the union alphabet, exploring every arrow choice. Stops once
// more than `bound` states are found and flags the result partial.
ReachableResult reachable_composite(const CartesianModel& cart, const CompositeState& start,
                                    std::size_t bound);

// Product of the component state-space sizes (evaluations included).
std::int64_t product_state_count(const CartesianModel& cart);

}  // namespace onelife
