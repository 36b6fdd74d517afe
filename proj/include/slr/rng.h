/*
 * Copyright 2026 The slr-irls Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace slr
{

/**
 * @brief Reproducible random source.
 *
 * The engine is std::mt19937_64, whose output sequence is fixed by the C++
 * standard. The distributions are implemented here rather than taken from
 * <random>, because the standard library distributions are not required to
 * produce identical variates across implementations:
 *
 *   uniform()  : (engine() >> 11) * 2^-53, a double in [0, 1).
 *   normal()   : Box-Muller on (u1, u2) with u1 = 1 - uniform() in (0, 1];
 *                returns sqrt(-2 ln u1) cos(2 pi u2), then caches and returns
 *                sqrt(-2 ln u1) sin(2 pi u2) on the next call.
 *   index(n)   : rejection sampling on the raw 64-bit output, unbiased.
 */
class Rng
{
   public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal();

    // Uniform integer in [0, n). n must be positive.
    std::uint64_t index(std::uint64_t n);

    // k distinct indices from [0, n), sorted ascending (partial Fisher-Yates).
    std::vector<Eigen::Index> choose(Eigen::Index n, Eigen::Index k);

    // Fills a rows x cols matrix with standard normals, row by row.
    Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols);

   private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Deterministic seed for a sub-stream: folds each component through mix64 in
// order, so (base, s, m, t) and (base, m, s, t) give different streams.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts);

}  // namespace slr
