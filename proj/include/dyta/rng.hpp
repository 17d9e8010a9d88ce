#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace dyta {

/// splitmix64 finalizer; used to derive independent per-task seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view text, std::uint64_t h = 0xcbf29ce484222325ULL) noexcept
{
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Combine a base seed with a list of discriminators (user id, run, purpose).
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) noexcept
{
    std::uint64_t s = mix64(base);
    for (auto p : parts) {
        s = mix64(s ^ mix64(p));
    }
    return s;
}

enum class SeedPurpose : std::uint64_t {
    negatives = 0x6e65672d,
    page = 0x70616765,
    random_rank = 0x72616e64,
    user_sample = 0x75736572,
};

constexpr std::uint64_t derive_seed(std::uint64_t base, SeedPurpose purpose, std::uint64_t key) noexcept
{
    return derive_seed(base, {static_cast<std::uint64_t>(purpose), key});
}

/// mt19937_64 output is fully specified by the standard, unlike the
/// distributions; the helpers below keep draws identical across toolchains.
using Rng = std::mt19937_64;

/// Unbiased integer in [0, n) by rejection.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n)
{
    if (n <= 1) {
        return 0;
    }
    // 2^64 mod n; draws at or above it cover a multiple of n values.
    const std::uint64_t threshold = (0 - n) % n;
    std::uint64_t draw = 0;
    do {
        draw = rng();
    } while (draw < threshold);
    return draw % n;
}

template <typename T>
void shuffle(std::span<T> values, Rng& rng)
{
    for (std::size_t i = values.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(rng, i));
        using std::swap;
        swap(values[i - 1], values[j]);
    }
}

} // namespace dyta
