#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "onelife/world.hpp"

namespace onelife {

using PolicyFactory = std::function<std::unique_ptr<Policy>()>;

// Runs `count` independent lives; life i uses seed substream(master_seed, i),
// so the result set is a pure function of the arguments and in particular
// independent of `jobs`. The parallel runner is the OpenMP kernel; the
// serial one is the reference it is tested against.
std::vector<LifeRecord> run_lives(const PerfectWorld& world, const PolicyFactory& make_policy,
                                  int horizon, int count, std::uint64_t master_seed, int jobs = 0);
std::vector<LifeRecord> run_lives(const RandomWorld& world, const PolicyFactory& make_policy,
                                  int horizon, int count, std::uint64_t master_seed, int jobs = 0);

std::vector<LifeRecord> run_lives_serial(const PerfectWorld& world,
                                         const PolicyFactory& make_policy, int horizon, int count,
                                         std::uint64_t master_seed);
std::vector<LifeRecord> run_lives_serial(const RandomWorld& world,
                                         const PolicyFactory& make_policy, int horizon, int count,
                                         std::uint64_t master_seed);

std::uint64_t life_seed(std::uint64_t master_seed, int index);

}  // namespace onelife
