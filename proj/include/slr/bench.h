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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "slr/core_model.h"
#include "slr/measurement.h"
#include "slr/trace.h"

namespace slr::bench
{

// A manifest that cannot be parsed or violates its invariants.
class ManifestError : public std::runtime_error
{
   public:
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind
{
    kPhaseGrid,
    kConvergence,
    kObjectiveEvolution,
    kRipProbe,
};

enum class Algorithm
{
    kIrls,
    kIht,
};

enum class OrderPolicy
{
    kExact,
    kOverestimate,  // r~ = 2r, s~ = floor(1.5 s), both capped by the dimensions
};

std::string to_string(ExperimentKind kind);
std::string to_string(Algorithm algorithm);
std::string to_string(OrderPolicy policy);
ExperimentKind parse_experiment_kind(const std::string& name);
Algorithm parse_algorithm(const std::string& name);
OrderPolicy parse_order_policy(const std::string& name);

/**
 * @brief Everything a bench run depends on.
 *
 * JSON keys (all optional except the dimensions, r and an s / m grid):
 *
 *   kind               "phase-grid" | "convergence" | "objective-evolution" | "rip-probe"
 *   n1, n2             matrix dimensions
 *   algorithms         ["irls", "iht"]                    default both
 *   measurement        "dense-gaussian" | "rank-one-gaussian" | "fourier-rank-one"
 *   r                  rank of the ground truth
 *   s                  list of row-sparsity levels
 *   m                  list of measurement counts, or
 *   m_factors          list of multiples of r(s + n2 - r), rounded up per s
 *   order_policy       "exact" | "overestimate"
 *   trials             per cell, default 64
 *   seed               base seed, default 0
 *   success_threshold  relative Frobenius error, default 1e-4
 *   output_dir         default "."
 *   record_timing      default true; false writes 0 into every time column
 *   irls_max_iter, iht_max_iter, rip_samples
 */
struct ExperimentManifest
{
    ExperimentKind kind = ExperimentKind::kPhaseGrid;
    Index n1 = 0;
    Index n2 = 0;
    std::vector<Algorithm> algorithms{Algorithm::kIrls, Algorithm::kIht};
    MeasurementKind measurement = MeasurementKind::kDenseGaussian;
    Index r = 1;
    std::vector<Index> s_values;
    std::vector<Index> m_values;
    std::vector<double> m_factors;
    OrderPolicy order_policy = OrderPolicy::kExact;
    Index trials = 64;
    std::uint64_t seed = 0;
    double success_threshold = 1e-4;
    std::filesystem::path output_dir = ".";
    bool record_timing = true;
    Index irls_max_iter = 250;
    Index iht_max_iter = 2000;
    Index rip_samples = 200;  // random model-set draws per operator
};

/// Parses and validates; throws ManifestError on any problem.
ExperimentManifest parse_manifest(const std::string& json_text);
ExperimentManifest load_manifest(const std::filesystem::path& path);

/// Checks the invariants (grid inside dimension bounds, trials >= 1, ...).
void validate(const ExperimentManifest& manifest);

/// The manifest with every default filled in, as JSON text.
std::string manifest_echo(const ExperimentManifest& manifest);

/// Degrees of freedom r(s + n2 - r) of the rank-r, s-row-sparse model set.
Index degrees_of_freedom(Index r, Index s, Index n2);

/// The m values of the grid for a given s (explicit list or factors x dof).
std::vector<Index> m_grid(const ExperimentManifest& manifest, Index s);

/// Model orders handed to the algorithms under the manifest's policy.
std::pair<Index, Index> model_orders(const ExperimentManifest& manifest, Index s);

/// Seed of trial t in cell (s, m); the instance seeds are derived from it.
std::uint64_t trial_seed(std::uint64_t base, Index s, Index m, Index t);

struct TrialOutcome
{
    Algorithm algorithm = Algorithm::kIrls;
    Index s = 0;
    Index m = 0;
    Index trial = 0;
    std::uint64_t seed = 0;
    bool success = false;
    double rel_error = 0.0;
    Index iterations = 0;
    double time_ms = 0.0;
    std::string reason;  // termination reason, or "error: <message>"
};

struct CellResult
{
    Index s = 0;
    Index m = 0;
    Index success_count = 0;
    Index trials = 0;
    double mean_error = 0.0;
    double median_error = 0.0;
    double mean_iters = 0.0;
    double mean_time_ms = 0.0;

    double success_rate() const
    {
        return trials > 0 ? static_cast<double>(success_count) / static_cast<double>(trials) : 0.0;
    }
};

struct PhaseGridResult
{
    std::vector<Algorithm> algorithms;
    std::vector<std::vector<CellResult>> cells;  // [algorithm][cell], cells ordered by (s, m)
    std::vector<TrialOutcome> trials;            // ordered by (algorithm, s, m, trial)
};

struct RunOptions
{
    unsigned threads = 1;
    bool write_files = true;
};

/// Runs every (s, m, trial) cell. Per-trial failures are recorded as
/// non-successes. Writes phase_<alg>.csv, phase_<alg>_trials.csv and
/// manifest.json into the output directory.
PhaseGridResult run_phase_grid(const ExperimentManifest& manifest, const RunOptions& options = {});

struct ConvergenceRun
{
    Algorithm algorithm = Algorithm::kIrls;
    Index trial = 0;
    RecoveryResult result;
    QuadraticRateFit quadratic;
    // Geometric-mean contraction per iteration over the iterates with error
    // in [1e-13, 0.1]; NaN when fewer than two such iterates exist.
    double linear_rate = 0.0;
    // First k with rel_error < 1e-10, or -1.
    Index iterations_to_1e10 = -1;
    std::string error;  // set when the run threw
};

/// One instance per trial at the first (s, m) of the grid. Writes
/// convergence_<alg>_t<trial>.csv traces and rates.csv.
std::vector<ConvergenceRun> run_convergence(const ExperimentManifest& manifest,
                                            const RunOptions& options = {});

struct ObjectiveRow
{
    Index k = 0;
    double sqrt_F_lr = 0.0;
    double sqrt_F_sp = 0.0;
    double sqrt_F = 0.0;
    double rel_error = 0.0;
};

/// IRLS only. Writes objective_t<trial>.csv with columns
/// k,sqrt_F_lr,sqrt_F_sp,sqrt_F,rel_error.
std::vector<std::vector<ObjectiveRow>> run_objective_evolution(const ExperimentManifest& manifest,
                                                               const RunOptions& options = {});

struct RipRow
{
    Index s = 0;
    Index m = 0;
    Index trial = 0;
    double lower_bound = 0.0;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
};

/// One operator draw per (s, m, trial); writes rip.csv.
std::vector<RipRow> run_rip_probe(const ExperimentManifest& manifest,
                                  const RunOptions& options = {});

/// Writes a double with 17 significant digits ("nan" / "inf" spelled out).
void write_double(std::ostream& out, double value);

}  // namespace slr::bench
