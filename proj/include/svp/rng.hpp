#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace svp {

// Seeding contract shared by every sampler in the project.
//
// A stream is addressed by the triple (master_seed, trial_index, op_name).
// Identical triples produce bit-identical draws across runs and across any
// thread schedule, because each stream owns its engine and is never shared.
// Derivation: the triple is folded through SplitMix64 (op names via FNV-1a)
// into eight words that seed a mt19937_64 through std::seed_seq.
struct SeedRecord {
    std::uint64_t master_seed = 0;
    std::uint64_t trial_index = 0;
};

std::uint64_t splitmix64(std::uint64_t state);

// Order-sensitive combiner used to derive per-cell master seeds in sweeps.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

std::mt19937_64 make_stream(const SeedRecord& seed, std::string_view op_name);

}  // namespace svp
