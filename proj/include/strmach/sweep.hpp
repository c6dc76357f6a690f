#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "strmach/degrees.hpp"

namespace strmach {

// Exhaustive word sweeps are the hot loops of the analysis layer. Every
// sweep has a serial reference driver and an OpenMP driver over the same
// rank decoding; tests compare the two and the benchmark tool times them.
enum class Exec { Serial, Parallel };

// Number of words over an n-letter alphabet of length <= max_len.
Nat word_count(Nat letters, Nat max_len);

// Rank decoding: words ordered by length, then lexicographically.
std::string word_at(std::string_view letters, Nat rank);

// Calls fn(rank, word) for every word of length <= max_len. With
// Exec::Parallel fn must be safe to call concurrently; iteration order is
// unspecified but the rank identifies the word.
void for_each_word(std::string_view letters, Nat max_len, Exec exec,
                   const std::function<void(Nat, const std::string&)>& fn);

int sweep_thread_count();

}  // namespace strmach
