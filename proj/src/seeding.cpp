#include "normcite/seeding.hpp"

namespace normcite {

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t label_hash(std::string_view label)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> coords)
{
    std::uint64_t h = mix64(base);
    for (auto c : coords) {
        h = mix64(h ^ mix64(c));
    }
    return h;
}

Engine substream(std::uint64_t seed, std::uint64_t stream)
{
    // seed_seq's output is fully specified by the standard, so streams are
    // reproducible wherever mt19937_64 is.
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    return Engine(seq);
}

}  // namespace normcite
