#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace areacfd {

using RandomEngine = std::mt19937_64;

/// Independent substream for a (seed, path) pair, e.g. (seed, {iteration})
/// or (seed, {tag, day}). Seeding goes through std::seed_seq, whose mixing
/// is fully specified, so streams are reproducible across platforms.
inline RandomEngine make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {}) {
    std::vector<std::uint32_t> words;
    words.reserve(2 + 2 * path.size());
    auto push = [&](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(seed);
    for (const auto v : path) {
        push(v);
    }
    std::seed_seq seq(words.begin(), words.end());
    return RandomEngine(seq);
}

}  // namespace areacfd
