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

#include "slr/rip.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slr/error.h"
#include "slr/rng.h"

namespace slr
{

RipEstimate rip_probe(const MeasurementOperator& op, Index r, Index s, Index trials,
                      std::uint64_t seed)
{
    if (trials < 1)
    {
        throw InvalidArgument("rip_probe: trials must be >= 1");
    }
    RipEstimate est;
    est.trials = trials;
    est.min_ratio = std::numeric_limits<double>::infinity();
    est.max_ratio = -std::numeric_limits<double>::infinity();
    const double scale = op.isometry_scale();
    for (Index t = 0; t < trials; ++t)
    {
        const GroundTruth Z =
            generate_ground_truth(op.n1(), op.n2(), r, s, derive_seed(seed, {std::uint64_t(t)}));
        const double ratio = op.apply(Z.X_star).squaredNorm() / (scale * Z.X_star.squaredNorm());
        est.min_ratio = std::min(est.min_ratio, ratio);
        est.max_ratio = std::max(est.max_ratio, ratio);
        est.lower_bound = std::max(est.lower_bound, std::abs(ratio - 1.0));
    }
    return est;
}

}  // namespace slr
