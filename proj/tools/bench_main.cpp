// Benchmark of the OpenMP kernels against their serial references:
// trace-statistics collection over a long timeline and a batch of
// independent lives.

#include <chrono>
#include <cstdio>

#include "onelife/batch.hpp"
#include "onelife/inference.hpp"

using namespace onelife;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

EventStream synthetic_stream(int n, std::uint64_t seed) {
  Rng rng(seed);
  EventStream s;
  s.total_steps = n;
  s.event_names = {"a", "b", "c", "d"};
  for (int t = 1; t <= n; ++t) {
    if (rng.bernoulli(0.6)) s.ticks.push_back({t, {static_cast<EventId>(rng.below(4))}});
  }
  return s;
}

EventDrivenModel ring_model(int states) {
  EventDrivenModel m;
  for (int i = 0; i < states; ++i) m.state_names.push_back("s" + std::to_string(i));
  m.events = {{"a", EventKind::Visible},
              {"b", EventKind::Visible},
              {"c", EventKind::Visible},
              {"d", EventKind::Visible}};
  m.arrows.assign(states, std::vector<std::vector<StateId>>(4));
  for (StateId i = 0; i < states; ++i) {
    for (EventId e = 0; e < 4; ++e) m.add_arrow(i, e, (i + e + 1) % states);
  }
  return m;
}

template <class F>
double time_best_of(int reps, F&& f) {
  double best = 1e99;
  for (int i = 0; i < reps; ++i) {
    const auto start = Clock::now();
    f();
    best = std::min(best, seconds_since(start));
  }
  return best;
}

}  // namespace

int main() {
  const int kMoments = 1000000;
  const int kWindow = 2;
  const EventDrivenModel model = ring_model(16);
  const EventStream stream = synthetic_stream(kMoments, 99);
  UniformTransitionOracle alpha(1);
  const Timeline tl = edm_timeline(model, stream, EdmOracle{&alpha}, 0);

  std::printf("collect over %d moments, window %d\n", kMoments, kWindow);
  double occ_check = 0.0;
  const double t_serial = time_best_of(3, [&] {
    const TraceStatistics s = collect_reference(tl, stream, kWindow);
    occ_check = s.total_moments;
  });
  double occ_check2 = 0.0;
  const double t_parallel = time_best_of(3, [&] {
    const TraceStatistics s = collect(tl, stream, kWindow);
    occ_check2 = s.total_moments;
  });
  std::printf("  serial reference: %8.3f s\n", t_serial);
  std::printf("  openmp kernel:    %8.3f s   speedup %.2fx\n", t_parallel, t_serial / t_parallel);
  if (occ_check != occ_check2) {
    std::printf("  MISMATCH in totals!\n");
    return 1;
  }

  const PerfectWorld world = generate_world(32, 4, 8, 0.2, 7);
  PolicyFactory factory = [] { return std::make_unique<UniformPolicy>(); };
  const int kLives = 256, kHorizon = 2000;
  std::printf("batch of %d lives, horizon %d\n", kLives, kHorizon);
  const double b_serial =
      time_best_of(3, [&] { run_lives_serial(world, factory, kHorizon, kLives, 5); });
  const double b_parallel =
      time_best_of(3, [&] { run_lives(world, factory, kHorizon, kLives, 5); });
  std::printf("  serial reference: %8.3f s\n", b_serial);
  std::printf("  openmp kernel:    %8.3f s   speedup %.2fx\n", b_parallel, b_serial / b_parallel);
  return 0;
}
