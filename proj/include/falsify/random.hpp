#pragma once

#include <cstdint>

namespace falsify {

/// SplitMix64 finalizer. Good avalanche, used to derive independent seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for an independent random stream named by `stream`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix64(mix64(master) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

/// Named streams of one run.
enum class Stream : std::uint64_t { Tree = 1, Playout = 2, Subset = 3, Final = 4, Baseline = 5 };

constexpr std::uint64_t derive_seed(std::uint64_t master, Stream s) {
  return derive_seed(master, static_cast<std::uint64_t>(s));
}

}  // namespace falsify
