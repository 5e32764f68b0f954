#include "svp/rng.hpp"

#include <array>

namespace svp {

std::uint64_t splitmix64(std::uint64_t state) {
    std::uint64_t z = state + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ (b + 0x9E3779B97F4A7C15ULL));
}

namespace {

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace

std::mt19937_64 make_stream(const SeedRecord& seed, std::string_view op_name) {
    std::uint64_t state = seed.master_seed;
    state = mix_seed(state, seed.trial_index);
    state = mix_seed(state, fnv1a64(op_name));

    std::array<std::uint32_t, 8> words{};
    for (auto& w : words) {
        state = splitmix64(state);
        w = static_cast<std::uint32_t>(state >> 32);
    }
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
}

}  // namespace svp
