// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
//! \file rng.hpp
//! Counter-based random numbers. Every draw is a pure function of
//! (seed, stream, counter), so results do not depend on how work is split
//! between threads.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string_view>

namespace cfgdist
{
//! SplitMix64 finalizer; used to derive Philox keys from 64-bit seeds.
constexpr std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

//! FNV-1a, for naming streams ("bootstrap", "centroids", ...).
constexpr std::uint64_t stream_id(std::string_view name)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : name)
    {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

//! Philox4x32-10 block function.
struct Philox4x32
{
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter block(Counter ctr, Key key)
    {
        constexpr std::uint32_t kMulA = 0xD2511F53u;
        constexpr std::uint32_t kMulB = 0xCD9E8D57u;
        constexpr std::uint32_t kWeylA = 0x9E3779B9u;
        constexpr std::uint32_t kWeylB = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round)
        {
            std::uint64_t const p0 = std::uint64_t{kMulA} * ctr[0];
            std::uint64_t const p1 = std::uint64_t{kMulB} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
            key[0] += kWeylA;
            key[1] += kWeylB;
        }
        return ctr;
    }
};

//! Stateless generator addressed by (index, step, block).
class CounterRng
{
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
    {
        std::uint64_t const k = splitmix64(seed ^ splitmix64(stream));
        key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    }

    //! Two 64-bit words for the given address.
    std::array<std::uint64_t, 2>
    words(std::uint64_t index, std::uint32_t step, std::uint32_t block) const
    {
        auto const out = Philox4x32::block(
            {static_cast<std::uint32_t>(index),
             static_cast<std::uint32_t>(index >> 32), step, block},
            key_);
        return {(std::uint64_t{out[1]} << 32) | out[0],
                (std::uint64_t{out[3]} << 32) | out[2]};
    }

    //! Uniform on the open interval (0, 1) with 53 random bits.
    static double to_open_unit(std::uint64_t bits)
    {
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    //! Fill `out` with standard normals (Box-Muller, two per block).
    void normals(std::uint64_t index, std::uint32_t step,
                 std::span<double> out) const
    {
        std::size_t i = 0;
        for (std::uint32_t block = 0; i < out.size(); ++block)
        {
            auto const w = words(index, step, block);
            double const radius = std::sqrt(-2.0 * std::log(to_open_unit(w[0])));
            double const angle = 2.0 * std::numbers::pi * to_open_unit(w[1]);
            out[i++] = radius * std::cos(angle);
            if (i < out.size())
                out[i++] = radius * std::sin(angle);
        }
    }

    //! Uniform integer in [0, n) for n > 0 (bias < n / 2^64).
    std::uint64_t below(std::uint64_t n, std::uint64_t index,
                        std::uint32_t step, std::uint32_t block) const
    {
        __extension__ using u128 = unsigned __int128;
        auto const w = words(index, step, block);
        return static_cast<std::uint64_t>((static_cast<u128>(w[0]) * n) >> 64);
    }

  private:
    Philox4x32::Key key_;
};
}  // namespace cfgdist
