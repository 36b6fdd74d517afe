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

#include "slr/trace.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace slr
{

std::string to_string(Termination reason)
{
    switch (reason)
    {
        case Termination::kTolerance:
            return "tolerance";
        case Termination::kMaxIter:
            return "max_iter";
        case Termination::kSmoothingFloor:
            return "smoothing_floor";
        case Termination::kDiverged:
            return "diverged";
    }
    return "unknown";
}

void write_trace_csv(std::ostream& out, const IterateTrace& trace)
{
    const auto flags = out.flags();
    const auto precision = out.precision();
    out << "k,eps,delta,r_k,s_k,rel_change,F_lr,F_sp,F,rel_error,wall_time_ms,eps_clamped,"
           "delta_clamped\n";
    out << std::setprecision(17);
    for (const IterateRecord& rec : trace)
    {
        out << rec.k << ',' << rec.eps << ',' << rec.delta << ',' << rec.r_k << ',' << rec.s_k
            << ',' << rec.rel_change << ',' << rec.F_lr << ',' << rec.F_sp << ',' << rec.F << ','
            << rec.rel_error << ',' << rec.wall_time_ms << ',' << (rec.eps_clamped ? 1 : 0) << ','
            << (rec.delta_clamped ? 1 : 0) << '\n';
    }
    out.flags(flags);
    out.precision(precision);
}

QuadraticRateFit fit_quadratic_rate(const std::vector<double>& errors,
                                    const QuadraticRateOptions& options)
{
    QuadraticRateFit best;
    const Index n = static_cast<Index>(errors.size());
    auto err = [&](Index k) { return errors[static_cast<std::size_t>(k)]; };
    auto eligible = [&](Index k) {
        return err(k) > 0.0 && err(k) <= options.start_below && err(k + 1) >= options.noise_floor;
    };

    for (Index first = 0; first + 1 < n; ++first)
    {
        if (!eligible(first))
        {
            continue;
        }
        double q_min = err(first + 1) / (err(first) * err(first));
        double q_max = q_min;
        double last_contraction = err(first + 1) / err(first);
        Index pairs = 1;
        for (Index k = first + 1; k + 1 < n && eligible(k); ++k)
        {
            const double q = err(k + 1) / (err(k) * err(k));
            const double contraction = err(k + 1) / err(k);
            const double lo = std::min(q_min, q);
            const double hi = std::max(q_max, q);
            if (hi / lo >= options.max_spread || !(contraction < last_contraction))
            {
                break;
            }
            q_min = lo;
            q_max = hi;
            last_contraction = contraction;
            ++pairs;
        }
        if (pairs > best.pairs)
        {
            best.first = first;
            best.pairs = pairs;
            best.mu_hat = q_max;
            best.spread = q_max / q_min;
        }
    }
    best.found = best.pairs >= options.min_pairs;
    return best;
}

}  // namespace slr
