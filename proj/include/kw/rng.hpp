#pragma once

#include <array>
#include <cstdint>

namespace kw {

//! Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//! Stateless: the output is a pure function of (key, counter).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

//! Uniform on the open interval (0, 1) for draw `index` of stream `seed`.
double uniform_open(std::uint64_t seed, std::uint64_t index);

std::uint64_t splitmix64(std::uint64_t x);

//! Per-replicate seed: base ^ hash(n, r).
std::uint64_t replicate_seed(std::uint64_t base, std::uint64_t n, std::uint64_t r);

}  // namespace kw
