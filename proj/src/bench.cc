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

#include "slr/bench.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "slr/error.h"
#include "slr/iht.h"
#include "slr/irls.h"
#include "slr/rip.h"
#include "slr/rng.h"

namespace slr::bench
{

namespace
{

using nlohmann::json;

const double kNan = std::numeric_limits<double>::quiet_NaN();

// Runs task(i) for i in [0, count) on a pool of `threads` workers. Each task
// writes only its own output slot, so the schedule cannot change results.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task)
{
    const unsigned workers =
        std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (workers == 1)
    {
        for (std::size_t i = 0; i < count; ++i)
        {
            task(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
    {
        pool.emplace_back(
            [&]
            {
                for (std::size_t i = next++; i < count; i = next++)
                {
                    task(i);
                }
            });
    }
    for (std::thread& t : pool)
    {
        t.join();
    }
}

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name)
{
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / name);
    if (!out)
    {
        throw std::runtime_error("cannot write " + (dir / name).string());
    }
    return out;
}

void write_manifest_echo(const ExperimentManifest& manifest)
{
    std::ofstream out = open_output(manifest.output_dir, "manifest.json");
    out << manifest_echo(manifest) << '\n';
}

struct Instance
{
    GroundTruth gt;
    std::unique_ptr<MeasurementOperator> op;
    Vector y;
};

Instance make_instance(const ExperimentManifest& manifest, Index s, Index m, std::uint64_t seed)
{
    Instance inst;
    inst.gt = generate_ground_truth(manifest.n1, manifest.n2, manifest.r, s, derive_seed(seed, {0}));
    inst.op = make_operator(manifest.measurement, manifest.n1, manifest.n2, m, derive_seed(seed, {1}));
    inst.y = inst.op->apply(inst.gt.X_star);
    return inst;
}

RecoveryResult run_algorithm(Algorithm algorithm, const ExperimentManifest& manifest,
                             const Instance& inst, Index s, bool trace_objective)
{
    const auto [r_tilde, s_tilde] = model_orders(manifest, s);
    if (algorithm == Algorithm::kIrls)
    {
        IrlsConfig cfg;
        cfg.r_tilde = r_tilde;
        cfg.s_tilde = s_tilde;
        cfg.max_iter = manifest.irls_max_iter;
        cfg.trace_objective = trace_objective;
        cfg.record_timing = manifest.record_timing;
        return run_irls(*inst.op, inst.y, cfg, inst.gt.X_star);
    }
    IhtConfig cfg;
    cfg.r = r_tilde;
    cfg.s = s_tilde;
    cfg.max_iter = manifest.iht_max_iter;
    cfg.record_timing = manifest.record_timing;
    return run_iht(*inst.op, inst.y, cfg, inst.gt.X_star);
}

// Trace timestamps are cumulative from the start of the run.
double total_time_ms(const RecoveryResult& res)
{
    return res.trace.empty() ? 0.0 : res.trace.back().wall_time_ms;
}

template <typename T>
std::vector<T> scalar_or_list(const json& value, const char* key)
{
    if (value.is_array())
    {
        return value.get<std::vector<T>>();
    }
    if (value.is_number())
    {
        return {value.get<T>()};
    }
    throw ManifestError(std::string("manifest: '") + key + "' must be a number or a list");
}

}  // namespace

std::string to_string(ExperimentKind kind)
{
    switch (kind)
    {
        case ExperimentKind::kPhaseGrid:
            return "phase-grid";
        case ExperimentKind::kConvergence:
            return "convergence";
        case ExperimentKind::kObjectiveEvolution:
            return "objective-evolution";
        case ExperimentKind::kRipProbe:
            return "rip-probe";
    }
    return "unknown";
}

std::string to_string(Algorithm algorithm)
{
    return algorithm == Algorithm::kIrls ? "irls" : "iht";
}

std::string to_string(OrderPolicy policy)
{
    return policy == OrderPolicy::kExact ? "exact" : "overestimate";
}

ExperimentKind parse_experiment_kind(const std::string& name)
{
    for (ExperimentKind k : {ExperimentKind::kPhaseGrid, ExperimentKind::kConvergence,
                             ExperimentKind::kObjectiveEvolution, ExperimentKind::kRipProbe})
    {
        if (to_string(k) == name)
        {
            return k;
        }
    }
    throw ManifestError("unknown experiment kind: " + name);
}

Algorithm parse_algorithm(const std::string& name)
{
    if (name == "irls")
    {
        return Algorithm::kIrls;
    }
    if (name == "iht")
    {
        return Algorithm::kIht;
    }
    throw ManifestError("unknown algorithm: " + name);
}

OrderPolicy parse_order_policy(const std::string& name)
{
    if (name == "exact")
    {
        return OrderPolicy::kExact;
    }
    if (name == "overestimate")
    {
        return OrderPolicy::kOverestimate;
    }
    throw ManifestError("unknown model-order policy: " + name);
}

ExperimentManifest parse_manifest(const std::string& json_text)
{
    static const std::set<std::string> known{
        "kind",   "n1",           "n2",       "algorithms",       "measurement",
        "r",      "s",            "m",        "m_factors",        "order_policy",
        "trials", "seed",         "success_threshold", "output_dir", "record_timing",
        "irls_max_iter", "iht_max_iter", "rip_samples"};

    ExperimentManifest mf;
    try
    {
        const json j = json::parse(json_text);
        if (!j.is_object())
        {
            throw ManifestError("manifest: top level must be a JSON object");
        }
        for (const auto& item : j.items())
        {
            if (!known.count(item.key()))
            {
                throw ManifestError("manifest: unknown key '" + item.key() + "'");
            }
        }
        for (const char* key : {"n1", "n2", "r", "s"})
        {
            if (!j.contains(key))
            {
                throw ManifestError(std::string("manifest: missing '") + key + "'");
            }
        }
        if (j.contains("kind"))
        {
            mf.kind = parse_experiment_kind(j.at("kind").get<std::string>());
        }
        mf.n1 = j.at("n1").get<Index>();
        mf.n2 = j.at("n2").get<Index>();
        mf.r = j.at("r").get<Index>();
        mf.s_values = scalar_or_list<Index>(j.at("s"), "s");
        if (j.contains("m"))
        {
            mf.m_values = scalar_or_list<Index>(j.at("m"), "m");
        }
        if (j.contains("m_factors"))
        {
            mf.m_factors = scalar_or_list<double>(j.at("m_factors"), "m_factors");
        }
        if (j.contains("algorithms"))
        {
            mf.algorithms.clear();
            for (const std::string& name : j.at("algorithms").get<std::vector<std::string>>())
            {
                mf.algorithms.push_back(parse_algorithm(name));
            }
        }
        if (j.contains("measurement"))
        {
            try
            {
                mf.measurement = parse_measurement_kind(j.at("measurement").get<std::string>());
            }
            catch (const InvalidArgument& e)
            {
                throw ManifestError(e.what());
            }
        }
        if (j.contains("order_policy"))
        {
            mf.order_policy = parse_order_policy(j.at("order_policy").get<std::string>());
        }
        if (j.contains("trials"))
        {
            mf.trials = j.at("trials").get<Index>();
        }
        if (j.contains("seed"))
        {
            mf.seed = j.at("seed").get<std::uint64_t>();
        }
        if (j.contains("success_threshold"))
        {
            mf.success_threshold = j.at("success_threshold").get<double>();
        }
        if (j.contains("output_dir"))
        {
            mf.output_dir = j.at("output_dir").get<std::string>();
        }
        if (j.contains("record_timing"))
        {
            mf.record_timing = j.at("record_timing").get<bool>();
        }
        if (j.contains("irls_max_iter"))
        {
            mf.irls_max_iter = j.at("irls_max_iter").get<Index>();
        }
        if (j.contains("iht_max_iter"))
        {
            mf.iht_max_iter = j.at("iht_max_iter").get<Index>();
        }
        if (j.contains("rip_samples"))
        {
            mf.rip_samples = j.at("rip_samples").get<Index>();
        }
    }
    catch (const json::exception& e)
    {
        throw ManifestError(std::string("manifest: ") + e.what());
    }
    validate(mf);
    return mf;
}

ExperimentManifest load_manifest(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ManifestError("cannot read manifest " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_manifest(text.str());
}

void validate(const ExperimentManifest& mf)
{
    if (mf.n1 < 1 || mf.n2 < 1)
    {
        throw ManifestError("manifest: n1 and n2 must be positive");
    }
    if (mf.r < 1 || mf.r > mf.n2)
    {
        throw ManifestError("manifest: need 1 <= r <= n2");
    }
    if (mf.s_values.empty())
    {
        throw ManifestError("manifest: empty s grid");
    }
    for (Index s : mf.s_values)
    {
        if (s < mf.r || s > mf.n1)
        {
            throw ManifestError("manifest: every s must satisfy r <= s <= n1");
        }
    }
    if (mf.m_values.empty() == mf.m_factors.empty())
    {
        throw ManifestError("manifest: give exactly one of 'm' and 'm_factors'");
    }
    for (Index m : mf.m_values)
    {
        if (m < 1)
        {
            throw ManifestError("manifest: every m must be positive");
        }
    }
    for (double f : mf.m_factors)
    {
        if (!(f > 0.0) || !std::isfinite(f))
        {
            throw ManifestError("manifest: every m factor must be positive");
        }
    }
    if (mf.trials < 1)
    {
        throw ManifestError("manifest: trials must be at least 1");
    }
    if (mf.algorithms.empty())
    {
        throw ManifestError("manifest: empty algorithm list");
    }
    if (!(mf.success_threshold > 0.0))
    {
        throw ManifestError("manifest: success threshold must be positive");
    }
    if (mf.measurement == MeasurementKind::kExplicit)
    {
        throw ManifestError("manifest: measurement must be a random ensemble");
    }
    if (mf.irls_max_iter < 1 || mf.iht_max_iter < 1 || mf.rip_samples < 1)
    {
        throw ManifestError("manifest: iteration limits and rip_samples must be positive");
    }
}

std::string manifest_echo(const ExperimentManifest& mf)
{
    json j;
    j["kind"] = to_string(mf.kind);
    j["n1"] = mf.n1;
    j["n2"] = mf.n2;
    std::vector<std::string> algs;
    for (Algorithm a : mf.algorithms)
    {
        algs.push_back(to_string(a));
    }
    j["algorithms"] = algs;
    j["measurement"] = to_string(mf.measurement);
    j["r"] = mf.r;
    j["s"] = mf.s_values;
    if (!mf.m_values.empty())
    {
        j["m"] = mf.m_values;
    }
    else
    {
        j["m_factors"] = mf.m_factors;
    }
    j["order_policy"] = to_string(mf.order_policy);
    j["trials"] = mf.trials;
    j["seed"] = mf.seed;
    j["success_threshold"] = mf.success_threshold;
    j["output_dir"] = mf.output_dir.string();
    j["record_timing"] = mf.record_timing;
    j["irls_max_iter"] = mf.irls_max_iter;
    j["iht_max_iter"] = mf.iht_max_iter;
    j["rip_samples"] = mf.rip_samples;
    return j.dump(2);
}

Index degrees_of_freedom(Index r, Index s, Index n2) { return r * (s + n2 - r); }

std::vector<Index> m_grid(const ExperimentManifest& mf, Index s)
{
    if (!mf.m_values.empty())
    {
        return mf.m_values;
    }
    const auto dof = static_cast<double>(degrees_of_freedom(mf.r, s, mf.n2));
    std::vector<Index> out;
    for (double f : mf.m_factors)
    {
        out.push_back(std::max<Index>(1, static_cast<Index>(std::ceil(f * dof - 1e-9))));
    }
    return out;
}

std::pair<Index, Index> model_orders(const ExperimentManifest& mf, Index s)
{
    if (mf.order_policy == OrderPolicy::kExact)
    {
        return {mf.r, s};
    }
    const Index s_tilde = std::min(mf.n1, (3 * s) / 2);
    const Index r_tilde = std::min({2 * mf.r, s_tilde, mf.n2});
    return {r_tilde, s_tilde};
}

std::uint64_t trial_seed(std::uint64_t base, Index s, Index m, Index t)
{
    return derive_seed(base, {static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(m),
                              static_cast<std::uint64_t>(t)});
}

void write_double(std::ostream& out, double value)
{
    if (std::isnan(value))
    {
        out << "nan";
        return;
    }
    if (std::isinf(value))
    {
        out << (value > 0 ? "inf" : "-inf");
        return;
    }
    std::ostringstream tmp;
    tmp.imbue(std::locale::classic());
    tmp << std::setprecision(17) << value;
    out << tmp.str();
}

// ---------------------------------------------------------------------------

PhaseGridResult run_phase_grid(const ExperimentManifest& mf, const RunOptions& options)
{
    validate(mf);
    struct Cell
    {
        Index s;
        Index m;
    };
    std::vector<Cell> cells;
    for (Index s : mf.s_values)
    {
        for (Index m : m_grid(mf, s))
        {
            cells.push_back({s, m});
        }
    }

    const std::size_t n_alg = mf.algorithms.size();
    const auto n_trials = static_cast<std::size_t>(mf.trials);
    const std::size_t n_tasks = cells.size() * n_trials;
    // Slot layout: [algorithm][cell][trial].
    std::vector<TrialOutcome> outcomes(n_alg * n_tasks);

    parallel_for(n_tasks, options.threads,
                 [&](std::size_t task)
                 {
                     const Cell& cell = cells[task / n_trials];
                     const auto t = static_cast<Index>(task % n_trials);
                     const std::uint64_t seed = trial_seed(mf.seed, cell.s, cell.m, t);
                     std::optional<Instance> inst;
                     std::string setup_error;
                     try
                     {
                         inst = make_instance(mf, cell.s, cell.m, seed);
                     }
                     catch (const std::exception& e)
                     {
                         setup_error = e.what();
                     }
                     for (std::size_t a = 0; a < n_alg; ++a)
                     {
                         TrialOutcome& out = outcomes[a * n_tasks + task];
                         out.algorithm = mf.algorithms[a];
                         out.s = cell.s;
                         out.m = cell.m;
                         out.trial = t;
                         out.seed = seed;
                         out.rel_error = kNan;
                         if (!inst)
                         {
                             out.reason = "error: " + setup_error;
                             continue;
                         }
                         try
                         {
                             const RecoveryResult res =
                                 run_algorithm(out.algorithm, mf, *inst, cell.s, false);
                             out.rel_error = rel_frobenius_error(res.X_final, inst->gt.X_star);
                             out.success = out.rel_error < mf.success_threshold;
                             out.iterations = res.iterations;
                             out.time_ms = mf.record_timing ? total_time_ms(res) : 0.0;
                             out.reason = to_string(res.reason);
                         }
                         catch (const std::exception& e)
                         {
                             out.reason = std::string("error: ") + e.what();
                         }
                     }
                 });

    PhaseGridResult result;
    result.algorithms = mf.algorithms;
    result.cells.resize(n_alg);
    for (std::size_t a = 0; a < n_alg; ++a)
    {
        for (std::size_t c = 0; c < cells.size(); ++c)
        {
            CellResult cr;
            cr.s = cells[c].s;
            cr.m = cells[c].m;
            cr.trials = mf.trials;
            std::vector<double> errors;
            double iters = 0.0;
            double time = 0.0;
            for (std::size_t t = 0; t < n_trials; ++t)
            {
                const TrialOutcome& o = outcomes[a * n_tasks + c * n_trials + t];
                cr.success_count += o.success ? 1 : 0;
                if (std::isfinite(o.rel_error))
                {
                    errors.push_back(o.rel_error);
                }
                iters += static_cast<double>(o.iterations);
                time += o.time_ms;
            }
            const auto n = static_cast<double>(n_trials);
            cr.mean_iters = iters / n;
            cr.mean_time_ms = time / n;
            if (errors.empty())
            {
                cr.mean_error = kNan;
                cr.median_error = kNan;
            }
            else
            {
                double sum = 0.0;
                for (double e : errors)
                {
                    sum += e;
                }
                cr.mean_error = sum / static_cast<double>(errors.size());
                std::sort(errors.begin(), errors.end());
                const std::size_t h = errors.size() / 2;
                cr.median_error =
                    errors.size() % 2 ? errors[h] : 0.5 * (errors[h - 1] + errors[h]);
            }
            result.cells[a].push_back(cr);
        }
    }
    result.trials = std::move(outcomes);

    if (options.write_files)
    {
        write_manifest_echo(mf);
        for (std::size_t a = 0; a < n_alg; ++a)
        {
            const std::string name = "phase_" + to_string(mf.algorithms[a]);
            std::ofstream summary = open_output(mf.output_dir, name + ".csv");
            summary << "s,m,success_rate,trials,mean_error,mean_iters,mean_time_ms\n";
            for (const CellResult& cr : result.cells[a])
            {
                summary << cr.s << ',' << cr.m << ',';
                write_double(summary, cr.success_rate());
                summary << ',' << cr.trials << ',';
                write_double(summary, cr.mean_error);
                summary << ',';
                write_double(summary, cr.mean_iters);
                summary << ',';
                write_double(summary, cr.mean_time_ms);
                summary << '\n';
            }
            std::ofstream detail = open_output(mf.output_dir, name + "_trials.csv");
            detail << "s,m,trial,seed,success,rel_error,iterations,time_ms,reason\n";
            for (std::size_t i = 0; i < n_tasks; ++i)
            {
                const TrialOutcome& o = result.trials[a * n_tasks + i];
                detail << o.s << ',' << o.m << ',' << o.trial << ',' << o.seed << ','
                       << (o.success ? 1 : 0) << ',';
                write_double(detail, o.rel_error);
                detail << ',' << o.iterations << ',';
                write_double(detail, o.time_ms);
                // Messages may contain commas; quote them.
                std::string reason = o.reason;
                std::replace(reason.begin(), reason.end(), '"', '\'');
                detail << ",\"" << reason << "\"\n";
            }
        }
    }
    return result;
}

// ---------------------------------------------------------------------------

namespace
{

double linear_rate_of(const std::vector<double>& errors)
{
    Index first = -1;
    Index last = -1;
    for (std::size_t k = 0; k < errors.size(); ++k)
    {
        if (errors[k] <= 0.1 && errors[k] >= 1e-13)
        {
            if (first < 0)
            {
                first = static_cast<Index>(k);
            }
            last = static_cast<Index>(k);
        }
    }
    if (first < 0 || last <= first)
    {
        return kNan;
    }
    return std::pow(errors[static_cast<std::size_t>(last)] / errors[static_cast<std::size_t>(first)],
                    1.0 / static_cast<double>(last - first));
}

std::vector<double> error_sequence(const IterateTrace& trace)
{
    std::vector<double> errors;
    errors.reserve(trace.size());
    for (const IterateRecord& rec : trace)
    {
        errors.push_back(rec.rel_error);
    }
    return errors;
}

void zero_timing(IterateTrace& trace)
{
    for (IterateRecord& rec : trace)
    {
        rec.wall_time_ms = 0.0;
    }
}

}  // namespace

std::vector<ConvergenceRun> run_convergence(const ExperimentManifest& mf, const RunOptions& options)
{
    validate(mf);
    const Index s = mf.s_values.front();
    const Index m = m_grid(mf, s).front();
    const std::size_t n_alg = mf.algorithms.size();
    const auto n_trials = static_cast<std::size_t>(mf.trials);
    std::vector<ConvergenceRun> runs(n_alg * n_trials);

    parallel_for(n_trials, options.threads,
                 [&](std::size_t t)
                 {
                     const std::uint64_t seed = trial_seed(mf.seed, s, m, static_cast<Index>(t));
                     std::optional<Instance> inst;
                     std::string setup_error;
                     try
                     {
                         inst = make_instance(mf, s, m, seed);
                     }
                     catch (const std::exception& e)
                     {
                         setup_error = e.what();
                     }
                     for (std::size_t a = 0; a < n_alg; ++a)
                     {
                         ConvergenceRun& run = runs[a * n_trials + t];
                         run.algorithm = mf.algorithms[a];
                         run.trial = static_cast<Index>(t);
                         run.linear_rate = kNan;
                         if (!inst)
                         {
                             run.error = setup_error;
                             continue;
                         }
                         try
                         {
                             run.result = run_algorithm(run.algorithm, mf, *inst, s, true);
                         }
                         catch (const std::exception& e)
                         {
                             run.error = e.what();
                             continue;
                         }
                         const std::vector<double> errors = error_sequence(run.result.trace);
                         run.quadratic = fit_quadratic_rate(errors);
                         run.linear_rate = linear_rate_of(errors);
                         for (std::size_t k = 0; k < errors.size(); ++k)
                         {
                             if (errors[k] < 1e-10)
                             {
                                 run.iterations_to_1e10 = run.result.trace[k].k;
                                 break;
                             }
                         }
                         if (!mf.record_timing)
                         {
                             zero_timing(run.result.trace);
                         }
                     }
                 });

    if (options.write_files)
    {
        write_manifest_echo(mf);
        std::ofstream rates = open_output(mf.output_dir, "rates.csv");
        rates << "algorithm,trial,s,m,iterations,final_error,iterations_to_1e-10,quadratic_found,"
                 "mu_hat,linear_rate,reason\n";
        for (const ConvergenceRun& run : runs)
        {
            const std::string stem =
                "convergence_" + to_string(run.algorithm) + "_t" + std::to_string(run.trial);
            std::ofstream trace = open_output(mf.output_dir, stem + ".csv");
            write_trace_csv(trace, run.result.trace);

            const double final_error =
                run.result.trace.empty() ? kNan : run.result.trace.back().rel_error;
            rates << to_string(run.algorithm) << ',' << run.trial << ',' << s << ',' << m << ','
                  << run.result.iterations << ',';
            write_double(rates, final_error);
            rates << ',' << run.iterations_to_1e10 << ',' << (run.quadratic.found ? 1 : 0) << ',';
            write_double(rates, run.quadratic.found ? run.quadratic.mu_hat : kNan);
            rates << ',';
            write_double(rates, run.linear_rate);
            std::string reason = run.error.empty() ? to_string(run.result.reason) : "error: " + run.error;
            std::replace(reason.begin(), reason.end(), '"', '\'');
            rates << ",\"" << reason << "\"\n";
        }
    }
    return runs;
}

std::vector<std::vector<ObjectiveRow>> run_objective_evolution(const ExperimentManifest& mf,
                                                               const RunOptions& options)
{
    validate(mf);
    const Index s = mf.s_values.front();
    const Index m = m_grid(mf, s).front();
    const auto n_trials = static_cast<std::size_t>(mf.trials);
    std::vector<std::vector<ObjectiveRow>> rows(n_trials);
    std::vector<std::string> errors(n_trials);

    parallel_for(n_trials, options.threads,
                 [&](std::size_t t)
                 {
                     try
                     {
                         const Instance inst =
                             make_instance(mf, s, m, trial_seed(mf.seed, s, m, static_cast<Index>(t)));
                         const RecoveryResult res = run_algorithm(Algorithm::kIrls, mf, inst, s, true);
                         for (const IterateRecord& rec : res.trace)
                         {
                             rows[t].push_back({rec.k, std::sqrt(rec.F_lr), std::sqrt(rec.F_sp),
                                                std::sqrt(rec.F), rec.rel_error});
                         }
                     }
                     catch (const std::exception& e)
                     {
                         errors[t] = e.what();
                     }
                 });

    if (options.write_files)
    {
        write_manifest_echo(mf);
        for (std::size_t t = 0; t < n_trials; ++t)
        {
            std::ofstream out = open_output(mf.output_dir, "objective_t" + std::to_string(t) + ".csv");
            out << "k,sqrt_F_lr,sqrt_F_sp,sqrt_F,rel_error\n";
            for (const ObjectiveRow& row : rows[t])
            {
                out << row.k << ',';
                write_double(out, row.sqrt_F_lr);
                out << ',';
                write_double(out, row.sqrt_F_sp);
                out << ',';
                write_double(out, row.sqrt_F);
                out << ',';
                write_double(out, row.rel_error);
                out << '\n';
            }
        }
        std::ofstream failures = open_output(mf.output_dir, "objective_errors.csv");
        failures << "trial,error\n";
        for (std::size_t t = 0; t < n_trials; ++t)
        {
            if (!errors[t].empty())
            {
                std::replace(errors[t].begin(), errors[t].end(), '"', '\'');
                failures << t << ",\"" << errors[t] << "\"\n";
            }
        }
    }
    return rows;
}

std::vector<RipRow> run_rip_probe(const ExperimentManifest& mf, const RunOptions& options)
{
    validate(mf);
    struct Task
    {
        Index s;
        Index m;
        Index t;
    };
    std::vector<Task> tasks;
    for (Index s : mf.s_values)
    {
        for (Index m : m_grid(mf, s))
        {
            for (Index t = 0; t < mf.trials; ++t)
            {
                tasks.push_back({s, m, t});
            }
        }
    }
    std::vector<RipRow> rows(tasks.size());
    parallel_for(tasks.size(), options.threads,
                 [&](std::size_t i)
                 {
                     const Task& task = tasks[i];
                     RipRow& row = rows[i];
                     row.s = task.s;
                     row.m = task.m;
                     row.trial = task.t;
                     const std::uint64_t seed = trial_seed(mf.seed, task.s, task.m, task.t);
                     try
                     {
                         const auto op = make_operator(mf.measurement, mf.n1, mf.n2, task.m,
                                                       derive_seed(seed, {1}));
                         const RipEstimate est =
                             rip_probe(*op, mf.r, task.s, mf.rip_samples, derive_seed(seed, {2}));
                         row.lower_bound = est.lower_bound;
                         row.min_ratio = est.min_ratio;
                         row.max_ratio = est.max_ratio;
                     }
                     catch (const std::exception&)
                     {
                         row.lower_bound = row.min_ratio = row.max_ratio = kNan;
                     }
                 });

    if (options.write_files)
    {
        write_manifest_echo(mf);
        std::ofstream out = open_output(mf.output_dir, "rip.csv");
        out << "s,m,trial,lower_bound,min_ratio,max_ratio\n";
        for (const RipRow& row : rows)
        {
            out << row.s << ',' << row.m << ',' << row.trial << ',';
            write_double(out, row.lower_bound);
            out << ',';
            write_double(out, row.min_ratio);
            out << ',';
            write_double(out, row.max_ratio);
            out << '\n';
        }
    }
    return rows;
}

}  // namespace slr::bench
