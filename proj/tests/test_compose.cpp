#include "doctest.h"

#include "onelife/compose.hpp"
#include "onelife/io.hpp"
#include "test_util.hpp"

using namespace onelife;
using testutil::load_edm;

TEST_CASE("a single-component composite mirrors its model") {
  const EventDrivenModel dn = load_edm("models/day_night.model");
  CartesianModel cart = cartesian({Component{&dn, nullptr}});
  CHECK(cart.component_count() == 1);
  CHECK(product_state_count(cart) == 2);
  CHECK(cart.current()[0].state == dn.start);
  const auto reach = reachable_composite(cart, cart.current(), 100);
  CHECK(reach.complete);
  CHECK(reach.states.size() == 2);
}

TEST_CASE("empty component lists are rejected") {
  CHECK_THROWS_AS(cartesian({}), InputError);
}

namespace {

EventDrivenModel ring(int states, const std::string& event) {
  EventDrivenModel m;
  for (int i = 0; i < states; ++i) m.state_names.push_back("r" + std::to_string(i));
  m.events = {{event, EventKind::Visible}};
  m.arrows.assign(states, std::vector<std::vector<StateId>>(1));
  for (StateId i = 0; i < states; ++i) m.add_arrow(i, 0, (i + 1) % states);
  return m;
}

}  // namespace

TEST_CASE("product size multiplies component sizes") {
  const EventDrivenModel a = ring(2, "x");
  const EventDrivenModel b = ring(3, "y");
  const EventDrivenModel c = ring(5, "z");
  CartesianModel cart =
      cartesian({Component{&a, nullptr}, Component{&b, nullptr}, Component{&c, nullptr}});
  CHECK(product_state_count(cart) == 30);
}

TEST_CASE("week times day/night reaches the full 14-state product") {
  const EventDrivenModel week = load_edm("models/week.model");
  const EventDrivenModel dn = load_edm("models/day_night.model");
  CartesianModel cart = cartesian({Component{&week, nullptr}, Component{&dn, nullptr}});
  CHECK(product_state_count(cart) == 14);
  const auto reach = reachable_composite(cart, cart.current(), 1000);
  CHECK(reach.complete);
  CHECK(reach.states.size() == 14);
}

TEST_CASE("advance_composite drives only subscribing components") {
  const EventDrivenModel week = load_edm("models/week.model");
  const EventDrivenModel dn = load_edm("models/day_night.model");
  CartesianModel cart = cartesian({Component{&week, nullptr}, Component{&dn, nullptr}});
  const CompositeState before = cart.current();

  SUBCASE("empty set is the identity") {
    cart.advance_composite({}, 1);
    CHECK(cart.current() == before);
  }
  SUBCASE("sunrise flips day/night and leaves the week alone") {
    // start state of day/night is day; sunset then sunrise cycles it
    cart.advance_composite(std::vector<std::string>{"sunset"}, 1);
    CHECK(cart.current()[0] == before[0]);
    CHECK(cart.current()[1].state == dn.state_id("night"));
    cart.advance_composite(std::vector<std::string>{"sunrise"}, 2);
    CHECK(cart.current()[0] == before[0]);
    CHECK(cart.current()[1].state == dn.state_id("day"));
  }
  SUBCASE("midnight advances the week only") {
    cart.advance_composite(std::vector<std::string>{"midnight"}, 1);
    CHECK(cart.current()[0].state == week.state_id("mon"));
    CHECK(cart.current()[1] == before[1]);
  }
  SUBCASE("unknown events are input errors") {
    CHECK_THROWS_AS(cart.advance_composite(std::vector<std::string>{"eclipse"}, 1), InputError);
  }
}

TEST_CASE("a shared event advances all subscribers in one tick") {
  const EventDrivenModel a = load_edm("models/phase_a.model");
  const EventDrivenModel b = load_edm("models/phase_b.model");
  CartesianModel cart = cartesian({Component{&a, nullptr}, Component{&b, nullptr}});
  cart.advance_composite(std::vector<std::string>{"tick"}, 1);
  CHECK(cart.current()[0].state == a.state_id("a1"));
  CHECK(cart.current()[1].state == b.state_id("b1"));
}

TEST_CASE("phase-locked components reach only the diagonal") {
  const EventDrivenModel a = load_edm("models/phase_a.model");
  const EventDrivenModel b = load_edm("models/phase_b.model");
  CartesianModel cart = cartesian({Component{&a, nullptr}, Component{&b, nullptr}});
  CHECK(product_state_count(cart) == 4);
  const auto reach = reachable_composite(cart, cart.current(), 100);
  CHECK(reach.complete);
  CHECK(reach.states.size() == 2);  // strictly smaller than the full product
}

TEST_CASE("the reachability cap flags a partial result") {
  const EventDrivenModel week = load_edm("models/week.model");
  const EventDrivenModel dn = load_edm("models/day_night.model");
  CartesianModel cart = cartesian({Component{&week, nullptr}, Component{&dn, nullptr}});
  const auto reach = reachable_composite(cart, cart.current(), 5);
  CHECK_FALSE(reach.complete);
  CHECK(reach.states.size() > 5);
}

TEST_CASE("projection commutes with composition") {
  const EventDrivenModel week = load_edm("models/week.model");
  const EventDrivenModel dn = load_edm("models/day_night.model");
  const std::uint64_t master = 99;
  CartesianModel cart = cartesian({Component{&week, nullptr}, Component{&dn, nullptr}}, master);

  Rng rng(5);
  std::vector<std::vector<std::string>> offered;
  for (int t = 1; t <= 1000; ++t) {
    std::vector<std::string> evs;
    if (rng.bernoulli(0.3)) evs.push_back("midnight");
    if (rng.bernoulli(0.3)) evs.push_back(rng.bernoulli(0.5) ? "sunrise" : "sunset");
    offered.push_back(std::move(evs));
  }

  std::vector<CompositeState> trajectory;
  for (int t = 1; t <= 1000; ++t) {
    cart.advance_composite(offered[static_cast<std::size_t>(t) - 1], t);
    trajectory.push_back(cart.current());
  }

  // simulate each component alone on its filtered stream, same seeds
  for (int i = 0; i < 2; ++i) {
    const EventDrivenModel& m = i == 0 ? week : dn;
    UniformTransitionOracle alpha(cart.component_seed(i));
    EdmOracle oracle{&alpha, cart.policy()};
    StateId s = m.start;
    for (int t = 1; t <= 1000; ++t) {
      std::vector<EventId> local;
      for (const auto& name : offered[static_cast<std::size_t>(t) - 1]) {
        for (EventId e = 0; e < m.num_events(); ++e) {
          if (m.events[e].name == name) local.push_back(e);
        }
      }
      s = advance(m, s, local, oracle, t).state;
      CHECK(s == trajectory[static_cast<std::size_t>(t) - 1][static_cast<std::size_t>(i)].state);
    }
  }
}

TEST_CASE("variables-model components carry evaluations through the product") {
  VariablesModel vm;
  vm.base.state_names = {"room"};
  vm.base.events = {{"toggle", EventKind::Visible}};
  vm.base.arrows.assign(1, std::vector<std::vector<StateId>>(1));
  vm.base.add_arrow(0, 0, 0);
  vm.variables = {{"door", {"locked", "unlocked"}}};
  vm.update[{0, 0, 0}] = {{0, 1}};
  vm.update[{0, 1, 0}] = {{0, 0}};

  const EventDrivenModel dn = load_edm("models/day_night.model");
  CartesianModel cart = cartesian({Component{nullptr, &vm}, Component{&dn, nullptr}});
  CHECK(product_state_count(cart) == 4);
  cart.advance_composite(std::vector<std::string>{"toggle"}, 1);
  CHECK(cart.current()[0].eval == 1);
  CHECK(cart.print_state(cart.current()) == "0:room/door=unlocked 1:day");
  const auto reach = reachable_composite(cart, cart.current(), 100);
  CHECK(reach.states.size() == 4);
}
