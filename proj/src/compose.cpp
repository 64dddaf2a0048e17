#include "onelife/compose.hpp"

#include <algorithm>
#include <deque>

#include "onelife/rng.hpp"

namespace onelife {

CartesianModel::CartesianModel(std::vector<Component> components, std::uint64_t master_seed,
                               SimultaneityPolicy policy)
    : components_(std::move(components)), master_seed_(master_seed), policy_(policy) {
  if (components_.empty()) throw InputError("cartesian: need at least one component model");
  const Rng master(master_seed_);
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const Component& c = components_[i];
    if ((c.edm == nullptr) == (c.vm == nullptr)) {
      throw InputError("cartesian: component must be exactly one of model / variables model");
    }
    c.base().validate();
    if (c.vm) c.vm->validate();
    oracles_.push_back(
        std::make_shared<UniformTransitionOracle>(master.substream(static_cast<std::uint64_t>(i)).seed()));
    for (const auto& ev : c.base().events) {
      if (std::find(alphabet_.begin(), alphabet_.end(), ev.name) == alphabet_.end()) {
        alphabet_.push_back(ev.name);
      }
    }
    CompositeCoord coord;
    coord.state = c.base().start;
    coord.eval = c.vm ? c.vm->start_eval : 0;
    current_.push_back(coord);
  }
}

void CartesianModel::reset(CompositeState s) {
  if (s.size() != components_.size()) throw InputError("composite state arity mismatch");
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Component& c = components_[i];
    if (s[i].state < 0 || s[i].state >= c.base().num_states()) {
      throw InputError("composite coordinate state out of range");
    }
    const EvalIndex evals = c.vm ? c.vm->eval_count() : 1;
    if (s[i].eval < 0 || s[i].eval >= evals) {
      throw InputError("composite coordinate evaluation out of range");
    }
  }
  current_ = std::move(s);
}

std::uint64_t CartesianModel::component_seed(int i) const {
  return Rng(master_seed_).substream(static_cast<std::uint64_t>(i)).seed();
}

void CartesianModel::advance_composite(std::span<const std::string> event_names, int t) {
  for (const auto& name : event_names) {
    if (std::find(alphabet_.begin(), alphabet_.end(), name) == alphabet_.end()) {
      throw InputError("composite event '" + name + "' not in the union alphabet");
    }
  }
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const Component& c = components_[i];
    const EventDrivenModel& base = c.base();
    std::vector<EventId> local;
    for (const auto& name : event_names) {
      for (EventId e = 0; e < base.num_events(); ++e) {
        if (base.events[e].name == name) {
          local.push_back(e);
          break;
        }
      }
    }
    if (local.empty()) continue;  // component ignores every offered event
    EdmOracle oracle{oracles_[i].get(), policy_};
    if (c.vm) {
      const auto res =
          advance(*c.vm, VmConfig{current_[i].state, current_[i].eval}, local, oracle, t);
      current_[i].state = res.config.state;
      current_[i].eval = res.config.eval;
    } else {
      const auto res = advance(*c.edm, current_[i].state, local, oracle, t);
      current_[i].state = res.state;
    }
  }
}

std::string CartesianModel::print_state(const CompositeState& s) const {
  if (s.size() != components_.size()) throw InputError("composite state arity mismatch");
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Component& c = components_[i];
    if (i) out += ' ';
    out += std::to_string(i) + ":" + c.base().state_names[static_cast<std::size_t>(s[i].state)];
    if (c.has_variables()) out += "/" + c.vm->eval_name(s[i].eval);
  }
  return out;
}

CartesianModel cartesian(std::vector<Component> components, std::uint64_t master_seed) {
  return CartesianModel(std::move(components), master_seed);
}

namespace {

// All coordinates one component may reach on one event (every arrow choice).
std::vector<CompositeCoord> coordinate_successors(const Component& c, CompositeCoord from,
                                                  const std::string& event_name) {
  const EventDrivenModel& base = c.base();
  EventId local = -1;
  for (EventId e = 0; e < base.num_events(); ++e) {
    if (base.events[e].name == event_name) {
      local = e;
      break;
    }
  }
  if (local < 0) return {from};  // not in this component's alphabet
  if (c.vm) {
    const auto choices = c.vm->choices(from.state, from.eval, local);
    if (choices.empty()) return {from};
    std::vector<CompositeCoord> out;
    for (const auto& [s, v] : choices) out.push_back({s, v});
    return out;
  }
  const auto& targets = c.edm->targets(from.state, local);
  if (targets.empty()) return {from};
  std::vector<CompositeCoord> out;
  for (StateId s : targets) out.push_back({s, 0});
  return out;
}

}  // namespace

ReachableResult reachable_composite(const CartesianModel& cart, const CompositeState& start,
                                    std::size_t bound) {
  ReachableResult res;
  res.states.insert(start);
  std::deque<CompositeState> frontier{start};
  while (!frontier.empty()) {
    const CompositeState cur = std::move(frontier.front());
    frontier.pop_front();
    for (const auto& event_name : cart.alphabet()) {
      // per-component alternative sets, then their product
      std::vector<std::vector<CompositeCoord>> alts;
      alts.reserve(cur.size());
      for (int i = 0; i < cart.component_count(); ++i) {
        alts.push_back(coordinate_successors(cart.component(i), cur[static_cast<std::size_t>(i)],
                                             event_name));
      }
      std::vector<std::size_t> pick(alts.size(), 0);
      while (true) {
        CompositeState next(cur.size());
        for (std::size_t i = 0; i < alts.size(); ++i) next[i] = alts[i][pick[i]];
        const auto [it, fresh] = res.states.insert(std::move(next));
        if (fresh) {
          if (res.states.size() > bound) {
            res.complete = false;
            return res;
          }
          frontier.push_back(*it);
        }
        // odometer over the alternative sets
        std::size_t d = 0;
        for (; d < pick.size(); ++d) {
          if (++pick[d] < alts[d].size()) break;
          pick[d] = 0;
        }
        if (d == pick.size()) break;
      }
    }
  }
  return res;
}

std::int64_t product_state_count(const CartesianModel& cart) {
  std::int64_t n = 1;
  for (int i = 0; i < cart.component_count(); ++i) {
    const Component& c = cart.component(i);
    const EvalIndex evals = c.vm ? c.vm->eval_count() : 1;
    n *= static_cast<std::int64_t>(c.base().num_states()) * evals;
  }
  return n;
}

}  // namespace onelife
