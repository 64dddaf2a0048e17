#include "onelife/batch.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include "onelife/rng.hpp"

namespace onelife {

std::uint64_t life_seed(std::uint64_t master_seed, int index) {
  return Rng(master_seed).substream(static_cast<std::uint64_t>(index)).seed();
}

namespace {

template <class W>
std::vector<LifeRecord> run_serial(const W& world, const PolicyFactory& make_policy, int horizon,
                                   int count, std::uint64_t master_seed) {
  std::vector<LifeRecord> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    auto policy = make_policy();
    out[static_cast<std::size_t>(i)] = run_life(world, *policy, horizon, life_seed(master_seed, i));
  }
  return out;
}

template <class W>
std::vector<LifeRecord> run_parallel(const W& world, const PolicyFactory& make_policy, int horizon,
                                     int count, std::uint64_t master_seed, int jobs) {
  if (count < 0) throw InputError("run_lives: count must be nonnegative");
  std::vector<LifeRecord> out(static_cast<std::size_t>(count));
#ifdef _OPENMP
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
  #pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < count; ++i) {
    auto policy = make_policy();
    out[static_cast<std::size_t>(i)] = run_life(world, *policy, horizon, life_seed(master_seed, i));
  }
#else
  (void)jobs;
  out = run_serial(world, make_policy, horizon, count, master_seed);
#endif
  return out;
}

}  // namespace

std::vector<LifeRecord> run_lives(const PerfectWorld& world, const PolicyFactory& make_policy,
                                  int horizon, int count, std::uint64_t master_seed, int jobs) {
  return run_parallel(world, make_policy, horizon, count, master_seed, jobs);
}
std::vector<LifeRecord> run_lives(const RandomWorld& world, const PolicyFactory& make_policy,
                                  int horizon, int count, std::uint64_t master_seed, int jobs) {
  return run_parallel(world, make_policy, horizon, count, master_seed, jobs);
}

std::vector<LifeRecord> run_lives_serial(const PerfectWorld& world,
                                         const PolicyFactory& make_policy, int horizon, int count,
                                         std::uint64_t master_seed) {
  return run_serial(world, make_policy, horizon, count, master_seed);
}
std::vector<LifeRecord> run_lives_serial(const RandomWorld& world,
                                         const PolicyFactory& make_policy, int horizon, int count,
                                         std::uint64_t master_seed) {
  return run_serial(world, make_policy, horizon, count, master_seed);
}

}  // namespace onelife
