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

// Acceptance suite: one PASS/FAIL line per criterion. Run with criterion
// numbers as arguments to select a subset, e.g. `acceptance 1 5 10`.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "oracles/oracles.h"
#include "slr/bench.h"
#include "slr/irls.h"
#include "slr/objective.h"
#include "slr/rip.h"
#include "slr/rng.h"
#include "slr/weight_operator.h"
#include "slr/wls.h"

namespace slr
{
namespace
{

struct Verdict
{
    bool pass = false;
    std::string detail;
};

class Stopwatch
{
   public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

   private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));

std::string fmt(const char* format, ...)
{
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

double log_uniform(Rng& rng, double lo, double hi)
{
    return std::exp(std::log(lo) + rng.uniform() * (std::log(hi) - std::log(lo)));
}

Index uniform_int(Rng& rng, Index lo, Index hi)
{
    return lo + static_cast<Index>(rng.index(static_cast<std::uint64_t>(hi - lo + 1)));
}

// A random state with some structure: low rank and row-sparse plus a small
// full perturbation, so that eps and delta fall among the spectrum and norms.
DenseMatrix random_state(Rng& rng, Index n1, Index n2)
{
    const Index k = std::min(n1, n2);
    const Index r = uniform_int(rng, 1, k);
    const Index s = uniform_int(rng, r, n1);
    const GroundTruth gt = generate_ground_truth(n1, n2, r, s, rng.index(1ULL << 62));
    const double noise = log_uniform(rng, 1e-8, 1e-1);
    return gt.X_star + noise * rng.normal_matrix(n1, n2) / std::sqrt(static_cast<double>(n1 * n2));
}

// ---------------------------------------------------------------------------

Verdict majorization()
{
    Stopwatch clock;
    Rng rng(101);
    double worst = std::numeric_limits<double>::infinity();
    int violations = 0;
    for (int t = 0; t < 200; ++t)
    {
        const Index n1 = uniform_int(rng, 1, 32);
        const Index n2 = uniform_int(rng, 1, 32);
        const DenseMatrix X = random_state(rng, n1, n2);
        const DenseMatrix Z = t % 2 ? random_state(rng, n1, n2)
                                    : X + log_uniform(rng, 1e-6, 10.0) * rng.normal_matrix(n1, n2);
        const double eps = log_uniform(rng, 1e-6, 10.0);
        const double delta = log_uniform(rng, 1e-6, 10.0);
        const double q = Q_lr(Z, X, eps) + Q_sp(Z, X, delta);
        const double slack = q - F(Z, {eps, delta});
        const double scaled = slack / (1.0 + std::abs(q));
        worst = std::min(worst, scaled);
        if (slack < -1e-9 * (1.0 + std::abs(q)))
        {
            ++violations;
        }
    }
    const double secs = clock.seconds();
    return {violations == 0 && secs < 10.0,
            fmt("200 tuples, %d violations, min slack/(1+|Q|) = %.3g, %.2f s", violations, worst,
                secs)};
}

Verdict monotonicity()
{
    Stopwatch clock;
    const MeasurementKind kinds[] = {MeasurementKind::kDenseGaussian,
                                     MeasurementKind::kRankOneGaussian,
                                     MeasurementKind::kFourierRankOne};
    const double factors[] = {1.0, 1.5, 3.0};  // multiples of the degrees of freedom
    const Index n1 = 64;
    const Index n2 = 16;
    const Index r = 2;
    const Index s = 8;
    const Index dof = r * (s + n2 - r);
    double worst_increase = -std::numeric_limits<double>::infinity();
    int runs = 0;
    for (int t = 0; t < 20; ++t)
    {
        const MeasurementKind kind = kinds[t % 3];
        const auto m = static_cast<Index>(std::ceil(factors[(t / 3) % 3] * static_cast<double>(dof)));
        const GroundTruth gt = generate_ground_truth(n1, n2, r, s, derive_seed(202, {2ULL * t}));
        const auto op = make_operator(kind, n1, n2, m, derive_seed(202, {2ULL * t + 1}));
        IrlsConfig cfg;
        cfg.r_tilde = r;
        cfg.s_tilde = s;
        cfg.record_timing = false;
        const RecoveryResult res = run_irls(*op, op->apply(gt.X_star), cfg);
        for (std::size_t k = 1; k < res.trace.size(); ++k)
        {
            worst_increase = std::max(worst_increase, res.trace[k].F - res.trace[k - 1].F);
        }
        ++runs;
    }
    const double secs = clock.seconds();
    return {worst_increase <= 1e-9 && secs < 120.0,
            fmt("%d runs over 3 ensembles, m/dof in {1, 1.5, 3}, largest F increase %.3g, %.1f s",
                runs, worst_increase, secs)};
}

Verdict gradient_identities()
{
    Rng rng(303);
    double worst_lr = 0.0;
    double worst_sp = 0.0;
    double worst_fd = 0.0;
    for (int t = 0; t < 50; ++t)
    {
        const Index n1 = uniform_int(rng, 2, 12);
        const Index n2 = uniform_int(rng, 2, 10);
        const DenseMatrix X = random_state(rng, n1, n2);
        const double eps = log_uniform(rng, 1e-4, 1.0);
        const double delta = log_uniform(rng, 1e-4, 1.0);
        const WeightState ws = build_weight(X, eps, delta);
        const DenseMatrix g_lr = grad_F_lr(X, eps);
        const DenseMatrix g_sp = grad_F_sp(X, delta);
        worst_lr = std::max(worst_lr, (g_lr - apply_W_lr(ws, X)).cwiseAbs().maxCoeff());
        worst_sp = std::max(worst_sp, (g_sp - apply_W_sp(ws, X)).cwiseAbs().maxCoeff());

        // f_tau bends on the scale tau, so the difference step has to resolve it.
        const DenseMatrix fd_lr = oracle::finite_diff_grad(
            [&](const DenseMatrix& Y) { return F_lr(Y, eps); }, X, 1e-3 * std::min(1.0, eps));
        const DenseMatrix fd_sp = oracle::finite_diff_grad(
            [&](const DenseMatrix& Y) { return F_sp(Y, delta); }, X, 1e-3 * std::min(1.0, delta));
        worst_fd = std::max(worst_fd, (fd_lr - g_lr).norm() / std::max(g_lr.norm(), 1e-300));
        worst_fd = std::max(worst_fd, (fd_sp - g_sp).norm() / std::max(g_sp.norm(), 1e-300));
    }
    return {worst_lr <= 1e-10 && worst_sp <= 1e-10 && worst_fd <= 1e-5,
            fmt("50 states: max |grad F_lr - W_lr(X)| = %.3g, max |grad F_sp - W_sp X| = %.3g, "
                "finite-difference rel. error %.3g",
                worst_lr, worst_sp, worst_fd)};
}

Verdict wls_optimality()
{
    Stopwatch clock;
    double worst_oracle = 0.0;
    double worst_feas = 0.0;
    double worst_kernel = 0.0;
    Rng rng(404);
    for (int t = 0; t < 20; ++t)
    {
        const Index n1 = 8;
        const Index n2 = 6;
        const GroundTruth gt = generate_ground_truth(n1, n2, 2, 4, derive_seed(404, {static_cast<std::uint64_t>(t)}));
        const DenseOperator op = gaussian_dense(n1, n2, 20, derive_seed(405, {static_cast<std::uint64_t>(t)}));
        const Vector y = op.apply(gt.X_star);
        const DenseMatrix X_state = random_state(rng, n1, n2);
        const double eps = log_uniform(rng, 1e-3, 1.0);
        const double delta = log_uniform(rng, 1e-3, 1.0);
        const WeightState ws = build_weight(X_state, eps, delta);

        const WlsSolution sol = solve_wls(op, y, ws);
        const DenseMatrix X_ref = oracle::dense_kkt_solve(op, y, oracle::dense_weight(X_state, eps, delta));
        worst_oracle = std::max(worst_oracle, (sol.X - X_ref).norm() / X_ref.norm());
        worst_feas = std::max(worst_feas, (op.apply(sol.X) - y).norm() / y.norm());

        const DenseMatrix kernel = oracle::kernel_basis(op);
        const Vector wx = apply_W(ws, sol.X).reshaped();
        worst_kernel = std::max(worst_kernel, (kernel.transpose() * wx).cwiseAbs().maxCoeff());
    }
    const double secs = clock.seconds();
    return {worst_oracle <= 1e-8 && worst_feas <= 1e-10 && worst_kernel <= 1e-8 && secs < 30.0,
            fmt("20 instances 8x6, m=20: rel. diff to KKT oracle %.3g, rel. residual %.3g, "
                "max |<W(X), Xi>| %.3g, %.2f s",
                worst_oracle, worst_feas, worst_kernel, secs)};
}

Verdict weight_form()
{
    Rng rng(505);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t)
    {
        const Index n1 = uniform_int(rng, 1, 12);
        const Index n2 = uniform_int(rng, 1, 12);
        const DenseMatrix X = random_state(rng, n1, n2);
        // Include eps above the top singular value, where the weight is the identity.
        const double eps = log_uniform(rng, 1e-4, 4.0);
        const DenseMatrix Z = rng.normal_matrix(n1, n2);
        const WeightState ws = build_weight(X, eps, 1.0);
        const DenseMatrix diff = apply_W_lr(ws, Z) - oracle::hadamard_weight(X, eps, Z);
        worst = std::max(worst, diff.cwiseAbs().maxCoeff());
    }
    return {worst <= 1e-10, fmt("50 tuples, max entrywise difference %.3g", worst)};
}

Verdict quadratic_rate()
{
    Stopwatch clock;
    const Index n1 = 64;
    const Index n2 = 16;
    const Index r = 2;
    const Index s = 8;
    const Index m = 3 * r * (s + n2 - r);
    int good = 0;
    std::ostringstream mus;
    for (std::uint64_t seed = 0; seed < 10; ++seed)
    {
        const GroundTruth gt = generate_ground_truth(n1, n2, r, s, derive_seed(606, {seed, 0}));
        const auto op = make_operator(MeasurementKind::kDenseGaussian, n1, n2, m,
                                      derive_seed(606, {seed, 1}));
        IrlsConfig cfg;
        cfg.r_tilde = r;
        cfg.s_tilde = s;
        const RecoveryResult res = run_irls(*op, op->apply(gt.X_star), cfg, gt.X_star);
        std::vector<double> errors;
        for (const IterateRecord& rec : res.trace)
        {
            errors.push_back(rec.rel_error);
        }
        const QuadraticRateFit fit = fit_quadratic_rate(errors);
        if (fit.found && errors.back() < 1e-10)
        {
            ++good;
            mus << (good > 1 ? "," : "") << fmt("%.3g", fit.mu_hat);
        }
    }
    const double desk_secs = clock.seconds();

    Stopwatch big_clock;
    const GroundTruth gt = generate_ground_truth(256, 40, 5, 40, derive_seed(607, {0}));
    const auto op = make_operator(MeasurementKind::kDenseGaussian, 256, 40, 1125, derive_seed(607, {1}));
    IrlsConfig cfg;
    cfg.r_tilde = 5;
    cfg.s_tilde = 40;
    cfg.max_iter = 20;
    const RecoveryResult res = run_irls(*op, op->apply(gt.X_star), cfg, gt.X_star);
    Index reached = -1;
    for (const IterateRecord& rec : res.trace)
    {
        if (rec.rel_error < 1e-11)
        {
            reached = rec.k;
            break;
        }
    }
    const double big_secs = big_clock.seconds();
    const bool pass = good >= 8 && desk_secs < 60.0 && reached > 0 && big_secs < 1800.0;
    return {pass, fmt("desk: %d/10 seeds quadratic and below 1e-10 (mu_hat %s), %.1f s; "
                      "256x40 r=5 s=40 m=1125: below 1e-11 at iteration %ld, final %.3g, %.1f s",
                      good, mus.str().c_str(), desk_secs, static_cast<long>(reached),
                      res.trace.back().rel_error, big_secs)};
}

// Phase grids are shared by criteria 7 and 8.
struct GridPair
{
    bench::PhaseGridResult exact;
    bench::PhaseGridResult over;
    double seconds = 0.0;
};

bench::ExperimentManifest desk_grid(Index r, bench::OrderPolicy policy)
{
    bench::ExperimentManifest mf;
    mf.n1 = 64;
    mf.n2 = 16;
    mf.r = r;
    mf.s_values = {4, 8, 12};
    mf.m_factors = {1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 6.0};
    mf.order_policy = policy;
    mf.trials = 16;
    mf.seed = 7;
    mf.record_timing = false;
    return mf;
}

const std::map<Index, GridPair>& phase_grids()
{
    static const std::map<Index, GridPair> grids = []
    {
        std::map<Index, GridPair> out;
        bench::RunOptions options;
        options.threads = std::max(1u, std::thread::hardware_concurrency());
        options.write_files = false;
        for (Index r : {1, 2})
        {
            Stopwatch clock;
            GridPair& g = out[r];
            g.exact = bench::run_phase_grid(desk_grid(r, bench::OrderPolicy::kExact), options);
            g.over = bench::run_phase_grid(desk_grid(r, bench::OrderPolicy::kOverestimate), options);
            g.seconds = clock.seconds();
        }
        return out;
    }();
    return grids;
}

std::size_t algorithm_slot(const bench::PhaseGridResult& res, bench::Algorithm a)
{
    return static_cast<std::size_t>(
        std::find(res.algorithms.begin(), res.algorithms.end(), a) - res.algorithms.begin());
}

Verdict phase_dominance()
{
    const auto& grids = phase_grids();
    bool dominance = true;
    // The second clause asks for success at some m <= 2.5 dof; we also count
    // how many (r, s) rows individually reach it.
    int early_rows = 0;
    int rows = 0;
    double seconds = 0.0;
    std::ostringstream detail;
    for (const auto& [r, g] : grids)
    {
        seconds += g.seconds;
        const auto& irls = g.exact.cells[algorithm_slot(g.exact, bench::Algorithm::kIrls)];
        const auto& iht = g.exact.cells[algorithm_slot(g.exact, bench::Algorithm::kIht)];
        std::map<Index, Index> first_irls;
        std::map<Index, Index> first_iht;
        const Index never = std::numeric_limits<Index>::max();
        for (std::size_t c = 0; c < irls.size(); ++c)
        {
            const Index s = irls[c].s;
            first_irls.try_emplace(s, never);
            first_iht.try_emplace(s, never);
            if (irls[c].success_rate() >= 0.9)
            {
                first_irls[s] = std::min(first_irls[s], irls[c].m);
            }
            if (iht[c].success_rate() >= 0.9)
            {
                first_iht[s] = std::min(first_iht[s], iht[c].m);
            }
        }
        for (const auto& [s, m_irls] : first_irls)
        {
            const Index m_iht = first_iht[s];
            const double limit = 2.5 * static_cast<double>(bench::degrees_of_freedom(r, s, 16));
            dominance = dominance && m_irls <= m_iht;
            ++rows;
            early_rows += m_irls != never && static_cast<double>(m_irls) <= limit ? 1 : 0;
            auto show = [&](Index m) { return m == never ? std::string("-") : std::to_string(m); };
            detail << " r=" << r << ",s=" << s << ":" << show(m_irls) << "/" << show(m_iht);
        }
    }
    return {dominance && early_rows > 0 && seconds < 3600.0,
            fmt("minimal m with >= 90%% success, IRLS/IHT:%s; IRLS at or below 2.5 dof in %d/%d "
                "rows; %.0f s for both policies",
                detail.str().c_str(), early_rows, rows, seconds)};
}

Verdict misparameterization()
{
    const auto& grids = phase_grids();
    double drop[2] = {0.0, 0.0};
    double cells = 0.0;
    for (const auto& [r, g] : grids)
    {
        for (bench::Algorithm a : {bench::Algorithm::kIrls, bench::Algorithm::kIht})
        {
            const auto& exact = g.exact.cells[algorithm_slot(g.exact, a)];
            const auto& over = g.over.cells[algorithm_slot(g.over, a)];
            for (std::size_t c = 0; c < exact.size(); ++c)
            {
                drop[static_cast<int>(a)] += exact[c].success_rate() - over[c].success_rate();
            }
        }
        cells += static_cast<double>(g.exact.cells.front().size());
    }
    const double d_irls = drop[static_cast<int>(bench::Algorithm::kIrls)] / cells;
    const double d_iht = drop[static_cast<int>(bench::Algorithm::kIht)] / cells;
    return {d_irls < d_iht,
            fmt("cell-averaged success drop with r~=2r, s~=floor(1.5s): IRLS %.4f, IHT %.4f",
                d_irls, d_iht)};
}

Verdict undersampled_parsimony()
{
    const Index n1 = 64;
    const Index n2 = 16;
    const Index r = 2;
    const Index s = 8;
    const Index m = r * (s + n2 - r);
    int good = 0;
    std::ostringstream detail;
    for (std::uint64_t seed = 0; seed < 10; ++seed)
    {
        const GroundTruth gt = generate_ground_truth(n1, n2, r, s, derive_seed(909, {seed, 0}));
        const auto op = make_operator(MeasurementKind::kDenseGaussian, n1, n2, m,
                                      derive_seed(909, {seed, 1}));
        const Vector y = op->apply(gt.X_star);
        IrlsConfig cfg;
        cfg.r_tilde = r;
        cfg.s_tilde = s;
        cfg.record_timing = false;
        const RecoveryResult res = run_irls(*op, y, cfg, gt.X_star);
        const double feas = (op->apply(res.X_final) - y).norm() / y.norm();
        const Index rank = full_svd(res.X_final).numeric_rank(1e-6);
        const Index support = numeric_row_support(res.X_final, 1e-6);
        const bool ok = feas <= 1e-8 && rank <= r + 2 && support <= s + 2;
        good += ok ? 1 : 0;
        detail << (seed ? " " : "") << rank << "/" << support;
    }
    return {good >= 5, fmt("m = %ld: %d/10 seeds feasible with rank <= %ld and support <= %ld "
                           "(rank/support per seed: %s)",
                           static_cast<long>(m), good, static_cast<long>(r + 2),
                           static_cast<long>(s + 2), detail.str().c_str())};
}

Verdict rip_sanity()
{
    const Index n1 = 64;
    const Index n2 = 16;
    const Index r = 2;
    const Index s = 8;
    const DenseOperator identity(n1, n2, DenseMatrix::Identity(n1 * n2, n1 * n2));
    const RipEstimate id = rip_probe(identity, r, s, 200, 1001);

    const Index m = 6 * r * (s + n2);
    double worst = 0.0;
    int below = 0;
    for (int t = 0; t < 20; ++t)
    {
        const DenseOperator op = gaussian_dense(n1, n2, m, derive_seed(1002, {static_cast<std::uint64_t>(t)}));
        const RipEstimate est = rip_probe(op, r, s, 200, derive_seed(1003, {static_cast<std::uint64_t>(t)}));
        worst = std::max(worst, est.lower_bound);
        below += est.lower_bound < 1.0 ? 1 : 0;
    }
    return {id.lower_bound < 1e-10 && below == 20,
            fmt("identity embedding %.3g; dense Gaussian m=%ld: %d/20 draws below 1, largest %.3g",
                id.lower_bound, static_cast<long>(m), below, worst)};
}

}  // namespace
}  // namespace slr

int main(int argc, char** argv)
{
    using Check = std::function<slr::Verdict()>;
    const std::vector<std::pair<const char*, Check>> criteria = {
        {"majorization", slr::majorization},
        {"monotone objective", slr::monotonicity},
        {"gradient identities", slr::gradient_identities},
        {"weighted least squares optimality", slr::wls_optimality},
        {"weight form equivalence", slr::weight_form},
        {"quadratic local rate", slr::quadratic_rate},
        {"phase transition dominance", slr::phase_dominance},
        {"robust to overestimated orders", slr::misparameterization},
        {"under-sampled parsimony", slr::undersampled_parsimony},
        {"RIP probe sanity", slr::rip_sanity},
    };

    std::set<int> selected;
    for (int i = 1; i < argc; ++i)
    {
        selected.insert(std::atoi(argv[i]));
    }

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        const int id = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.count(id))
        {
            continue;
        }
        slr::Verdict v;
        try
        {
            v = criteria[i].second();
        }
        catch (const std::exception& e)
        {
            v = {false, std::string("exception: ") + e.what()};
        }
        failures += v.pass ? 0 : 1;
        std::printf("criterion %2d %s: %s (%s)\n", id, v.pass ? "PASS" : "FAIL", criteria[i].first,
                    v.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
