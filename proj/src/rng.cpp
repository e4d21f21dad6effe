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

#include "ccd/rng.hpp"

#include <cassert>

namespace ccd {

Engine make_engine(const RngContract& contract)
{
    std::seed_seq seq{
        static_cast<std::uint32_t>(contract.master_seed),
        static_cast<std::uint32_t>(contract.master_seed >> 32),
        static_cast<std::uint32_t>(contract.substream_id),
        static_cast<std::uint32_t>(contract.substream_id >> 32),
    };
    return Engine(seq);
}

RngContract projection_stream(std::uint64_t master_seed, std::uint64_t batch, unsigned attempt)
{
    assert(attempt < 16);
    assert(batch < (std::uint64_t{1} << 59));
    return {master_seed, kProjectionStreamBase | (batch << 4) | attempt};
}

void fill_normal(Engine& engine, std::span<double> out, double mean, double sd)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& x : out) x = mean + sd * normal(engine);
}

}  // namespace ccd
