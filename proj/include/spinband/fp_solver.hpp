#pragma once

#include "spinband/channel.hpp"
#include "spinband/coupling.hpp"
#include "spinband/miqcqp.hpp"
#include "spinband/objective.hpp"
#include "spinband/scenario.hpp"

#include <cstddef>
#include <ostream>
#include <vector>

namespace spinband
{

struct SolveOptions
{
    int max_inner_iterations = 100;
    double convergence_rel_tol = 1e-5;
    BnbOptions subproblem;
    bool trace = true;
    std::size_t max_spin_sats = 16; // 2^J spin vectors are enumerated
    unsigned threads = 1;           // workers across spin vectors
};

struct TracePoint
{
    int iteration = 0;
    double f2 = 0.0; // after the subproblem solve, at that iteration's aux
    double f0 = 0.0;
    std::size_t subproblem_nodes = 0;
    double wall_ms = 0.0;
};

struct SpinRun
{
    SpinVector spin;
    Allocation alloc;
    AuxState aux; // refreshed at the final allocation
    double f0 = 0.0;
    double f2 = 0.0;
    std::vector<TracePoint> trace;
    int iterations = 0;
    bool converged = false;
    std::size_t total_nodes = 0;
    std::size_t fallbacks = 0; // subproblem results rejected as worse
    std::size_t unconverged_relaxations = 0;
    std::size_t node_limit_hits = 0;
};

struct SolveResult
{
    SpinVector best_spin;
    Allocation best_alloc;
    AuxState best_aux;
    double f0_value = 0.0;
    double f2_value = 0.0;
    std::vector<SpinRun> runs; // indexed by spin code (bit j = satellite j)
};

// SINRs of the current allocation (interference from k' != k only).
AuxState update_chi(const GainTables& gains, const Allocation& alloc, double noise_variance);

// Fills xi from aux.chi: xi = sqrt((1 + chi) p sig) / total received power.
void update_xi(const GainTables& gains, const Allocation& alloc, double noise_variance, AuxState& aux);

// Both directions of every UE on its strongest direct DL link, satellite
// power split equally, full UL power.
Allocation initialize_alloc(const GainTables& gains, const SpinVector& spin, const Scenario& scenario);

SpinRun inner_loop(const GainTables& gains, const Scenario& scenario, const Allocation& init,
                   const SolveOptions& options = {});

SpinRun solve_fixed_spin(const Scenario& scenario, const ChannelSet& channels, const SpinVector& spin,
                         const SolveOptions& options = {});

// Every spin vector; the winner has the highest final f2. Values within a
// relative 1e-12 count as ties, resolved to the lexicographically smallest
// spin vector.
SolveResult solve(const Scenario& scenario, const ChannelSet& channels, const SolveOptions& options = {});

// spin_bits,iteration,f2,f0,subproblem_nodes,wall_ms
void write_trace_csv(std::ostream& out, const SolveResult& result);

// Shortest round-trip decimal text, locale independent.
std::string format_double(double v);

} // namespace spinband
