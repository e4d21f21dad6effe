/*
   Copyright 2026 The ccdetect Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace ccd {

using Engine = std::mt19937_64;

// Identifies one reproducible random stream. The stream for a given
// (master_seed, substream_id) pair depends on nothing else, so substreams can
// be consumed in any order and on any thread.
struct RngContract {
    std::uint64_t master_seed = 0;
    std::uint64_t substream_id = 0;

    friend bool operator==(const RngContract&, const RngContract&) = default;
};

Engine make_engine(const RngContract& contract);

// Substream ids at or above this value are reserved for projection draws;
// Monte Carlo trials use their trial index.
inline constexpr std::uint64_t kProjectionStreamBase = std::uint64_t{1} << 63;

// Stream for the batch-th projection draw; regeneration attempts occupy the
// low four bits.
RngContract projection_stream(std::uint64_t master_seed, std::uint64_t batch, unsigned attempt = 0);

// Fills out with i.i.d. N(mean, sd^2) draws.
void fill_normal(Engine& engine, std::span<double> out, double mean = 0.0, double sd = 1.0);

}  // namespace ccd
