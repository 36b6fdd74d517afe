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

#include "slr/measurement.h"

namespace slr
{

/// Empirical restricted-isometry check over random rank-r, s-row-sparse Z.
struct RipEstimate
{
    // max |ratio - 1| over the sampled Z: a lower bound on the (r,s)-RIP constant.
    double lower_bound = 0.0;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    Index trials = 0;
};

/**
 * Samples Z from generate_ground_truth(n1, n2, r, s, derive_seed(seed, {t}))
 * for t = 0..trials-1 and records ratio = ||A(Z)||^2 / (scale ||Z||_F^2),
 * where scale = op.isometry_scale().
 */
RipEstimate rip_probe(const MeasurementOperator& op, Index r, Index s, Index trials,
                      std::uint64_t seed);

}  // namespace slr
