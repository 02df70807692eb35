#include "spinband/fp_solver.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace spinband
{

AuxState update_chi(const GainTables& gains, const Allocation& alloc, double noise_variance)
{
    const LinkPowers lp = link_powers(gains, alloc, noise_variance);
    AuxState aux(gains.ues(), gains.sats());
    for (std::size_t k = 0; k < gains.ues(); ++k)
        for (std::size_t j = 0; j < gains.sats(); ++j)
        {
            aux.chi_dl(k, j) = lp.dl_signal(k, j) / (noise_variance + lp.dl_interference(k, j));
            aux.chi_ul(k, j) = lp.ul_signal(k, j) / (noise_variance + lp.ul_interference(k, j));
        }
    return aux;
}

void update_xi(const GainTables& gains, const Allocation& alloc, double noise_variance, AuxState& aux)
{
    const LinkPowers lp = link_powers(gains, alloc, noise_variance);
    for (std::size_t k = 0; k < gains.ues(); ++k)
        for (std::size_t j = 0; j < gains.sats(); ++j)
        {
            aux.xi_dl(k, j) = std::sqrt((1.0 + aux.chi_dl(k, j)) * lp.dl_signal(k, j)) / lp.dl_total(k, j);
            aux.xi_ul(k, j) = std::sqrt((1.0 + aux.chi_ul(k, j)) * lp.ul_signal(k, j)) / lp.ul_total(k, j);
        }
}

Allocation initialize_alloc(const GainTables& gains, const SpinVector& spin, const Scenario& scenario)
{
    const std::size_t K = gains.ues();
    const std::size_t J = gains.sats();
    if (spin.size() != J || scenario.ue_count() != K || scenario.sat_count() != J)
        throw std::invalid_argument("initialize_alloc: dimension mismatch");
    Allocation a(K, J);
    std::vector<int> load(J, 0);
    for (std::size_t k = 0; k < K; ++k)
    {
        std::size_t best = 0;
        for (std::size_t j = 1; j < J; ++j)
            if (gains.dl_sig(k, j) > gains.dl_sig(k, best))
                best = j;
        a.d(k, best) = 1;
        a.u(k, best) = 1;
        a.p_ul[k] = scenario.p_ue_max;
        ++load[best];
    }
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < J; ++j)
            if (a.d(k, j))
                a.p_dl[k] = scenario.p_sat_max / load[j];
    return a;
}

SpinRun inner_loop(const GainTables& gains, const Scenario& scenario, const Allocation& init,
                   const SolveOptions& options)
{
    if (options.max_inner_iterations < 1 || !(options.convergence_rel_tol > 0.0))
        throw std::invalid_argument("inner_loop: invalid options");
    const FeasibilityReport rep = check_feasibility(init, gains.spin, scenario);
    if (!rep.feasible)
        throw std::invalid_argument("inner_loop: infeasible initial allocation: " + rep.violations.front());

    using clock = std::chrono::steady_clock;
    const double sigma2 = scenario.noise_variance;
    const double big_m = big_m_value(scenario);

    SpinRun run;
    run.spin = gains.spin;
    run.alloc = init;
    double prev = eval_f0(gains, init, sigma2);

    for (int it = 1; it <= options.max_inner_iterations; ++it)
    {
        const auto start = clock::now();
        AuxState aux = update_chi(gains, run.alloc, sigma2);
        update_xi(gains, run.alloc, sigma2, aux);
        const double f2_keep = eval_f2(gains, run.alloc, aux, sigma2);

        const SubproblemP4 p4 = build_p4(gains, run.spin, aux, scenario, big_m);
        const SubproblemSolution sol = branch_and_bound(p4, options.subproblem);
        run.total_nodes += sol.nodes;
        run.unconverged_relaxations += sol.unconverged_relaxations;
        if (sol.status == BnbStatus::node_limit)
            ++run.node_limit_hits;

        // A subproblem result worse than the current point is discarded,
        // which keeps the ascent monotone even for inexact solves.
        Allocation cand = allocation_of(sol);
        double f2 = f2_keep;
        if (check_feasibility(cand, run.spin, scenario).feasible)
        {
            const double f2_cand = eval_f2(gains, cand, aux, sigma2);
            if (f2_cand >= f2_keep)
            {
                run.alloc = std::move(cand);
                f2 = f2_cand;
            }
            else
                ++run.fallbacks;
        }
        else
            ++run.fallbacks;

        run.iterations = it;
        if (options.trace)
        {
            TracePoint tp;
            tp.iteration = it;
            tp.f2 = f2;
            tp.f0 = eval_f0(gains, run.alloc, sigma2);
            tp.subproblem_nodes = sol.nodes;
            tp.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
            run.trace.push_back(tp);
        }
        const double scale = std::max(std::abs(prev), std::abs(f2));
        if (std::abs(f2 - prev) <= options.convergence_rel_tol * scale)
        {
            run.converged = true;
            break;
        }
        prev = f2;
    }

    run.aux = update_chi(gains, run.alloc, sigma2);
    update_xi(gains, run.alloc, sigma2, run.aux);
    run.f0 = eval_f0(gains, run.alloc, sigma2);
    run.f2 = eval_f2(gains, run.alloc, run.aux, sigma2);
    return run;
}

SpinRun solve_fixed_spin(const Scenario& scenario, const ChannelSet& channels, const SpinVector& spin,
                         const SolveOptions& options)
{
    const GainTables gains = precompute_gains(channels, spin, scenario.ue_ue_convention);
    return inner_loop(gains, scenario, initialize_alloc(gains, spin, scenario), options);
}

SolveResult solve(const Scenario& scenario, const ChannelSet& channels, const SolveOptions& options)
{
    const std::size_t J = scenario.sat_count();
    if (J == 0 || J > options.max_spin_sats || J >= 63)
        throw std::invalid_argument("solve: satellite count outside the spin-enumeration cap");
    const std::size_t count = std::size_t{1} << J;

    SolveResult res;
    res.runs.resize(count);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t code = next++; code < count; code = next++)
        {
            try
            {
                res.runs[code] = solve_fixed_spin(scenario, channels, SpinVector::from_code(code, J), options);
            }
            catch (...)
            {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };
    const unsigned n = std::clamp<unsigned>(options.threads, 1u, static_cast<unsigned>(count));
    if (n == 1)
        worker();
    else
    {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n; ++i)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    double top = -std::numeric_limits<double>::infinity();
    for (const auto& r : res.runs)
        top = std::max(top, r.f2);
    const double slack = 1e-12 * std::max(1.0, std::abs(top));
    const SpinRun* best = nullptr;
    for (const auto& r : res.runs)
        if (r.f2 >= top - slack && (best == nullptr || r.spin < best->spin))
            best = &r;

    res.best_spin = best->spin;
    res.best_alloc = best->alloc;
    res.best_aux = best->aux;
    res.f0_value = best->f0;
    res.f2_value = best->f2;
    return res;
}

std::string format_double(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void write_trace_csv(std::ostream& out, const SolveResult& result)
{
    out << "spin_bits,iteration,f2,f0,subproblem_nodes,wall_ms\n";
    for (const auto& run : result.runs)
        for (const auto& tp : run.trace)
            out << run.spin.bits_string() << ',' << tp.iteration << ',' << format_double(tp.f2) << ','
                << format_double(tp.f0) << ',' << tp.subproblem_nodes << ',' << format_double(tp.wall_ms) << '\n';
}

} // namespace spinband
