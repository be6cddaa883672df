// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>

#include "bdris/tensor.hpp"

namespace bdris
{

// Purpose tags used as the first key when deriving per-trial seeds, so that
// channels, training, noise and initialisation never share a stream.
enum class SeedPurpose : std::uint64_t
{
    Channels = 1,
    Training = 2,
    Noise = 3,
    Init = 4,
    Baseline = 5,
    Group = 6,
};

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Hash a master seed together with an ordered list of keys. Each key is
/// folded in through splitmix64, so (a, b) and (b, a) give different seeds.
inline std::uint64_t deriveSeed(std::uint64_t master, std::initializer_list<std::uint64_t> keys)
{
    std::uint64_t h = splitmix64(master);
    for (const auto key : keys)
        h = splitmix64(h ^ splitmix64(key + 0x632be59bd9b4e019ULL));
    return h;
}

inline std::uint64_t deriveSeed(std::uint64_t master, SeedPurpose purpose,
                                std::initializer_list<std::uint64_t> keys = {})
{
    std::uint64_t h = deriveSeed(master, {static_cast<std::uint64_t>(purpose)});
    for (const auto key : keys)
        h = splitmix64(h ^ splitmix64(key + 0x632be59bd9b4e019ULL));
    return h;
}

using Rng = std::mt19937_64;

/// i.i.d. CN(0, variance) entries.
inline CMat complexGaussian(Eigen::Index rows, Eigen::Index cols, Rng &rng, double variance = 1.0)
{
    std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
    CMat out(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
        {
            const double re = normal(rng);
            const double im = normal(rng);
            out(i, j) = {re, im};
        }
    return out;
}

/// Unit-modulus entries exp(i theta) with theta uniform on [0, 2 pi).
inline CMat randomPhases(Eigen::Index rows, Eigen::Index cols, Rng &rng)
{
    std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
    CMat out(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            out(i, j) = std::polar(1.0, uniform(rng));
    return out;
}

} // namespace bdris
