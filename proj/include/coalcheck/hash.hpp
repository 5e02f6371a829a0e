#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <tuple>
#include <utility>
#include <vector>

namespace coalcheck {

inline std::size_t hash_mix(std::size_t seed, std::size_t value) {
  std::uint64_t x = seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  x ^= x >> 31;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 29;
  return static_cast<std::size_t>(x);
}

// Hash used for states throughout the engine. Falls back to std::hash and
// to an ADL-found hash_value(x); vectors, pairs and arrays combine elementwise.
template <class T>
struct StateHash;

namespace detail {
template <class T>
concept StdHashable = requires(const T& x) { std::hash<T>{}(x); };
template <class T>
concept AdlHashable = requires(const T& x) {
  { hash_value(x) } -> std::convertible_to<std::size_t>;
};
}  // namespace detail

template <class T>
struct StateHash {
  std::size_t operator()(const T& x) const {
    if constexpr (detail::AdlHashable<T>) {
      return hash_value(x);
    } else {
      static_assert(detail::StdHashable<T>, "state type needs std::hash or hash_value");
      return hash_mix(0, std::hash<T>{}(x));
    }
  }
};

template <class T>
struct StateHash<std::vector<T>> {
  std::size_t operator()(const std::vector<T>& xs) const {
    std::size_t h = xs.size();
    for (const auto& x : xs) h = hash_mix(h, StateHash<T>{}(x));
    return h;
  }
};

template <class T, std::size_t N>
struct StateHash<std::array<T, N>> {
  std::size_t operator()(const std::array<T, N>& xs) const {
    std::size_t h = N;
    for (const auto& x : xs) h = hash_mix(h, StateHash<T>{}(x));
    return h;
  }
};

template <class A, class B>
struct StateHash<std::pair<A, B>> {
  std::size_t operator()(const std::pair<A, B>& p) const {
    return hash_mix(StateHash<A>{}(p.first), StateHash<B>{}(p.second));
  }
};

}  // namespace coalcheck
