#pragma once

#include "spinband/coupling.hpp"
#include "spinband/objective.hpp"
#include "spinband/qcqp.hpp"
#include "spinband/scenario.hpp"
#include "spinband/types.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace spinband
{

// Association/power subproblem for fixed auxiliary variables:
//
//   max  constant + sum_kj lin_dl z_dl - quad_dl z_dl^2 + lin_ul z_ul - quad_ul z_ul^2
//   s.t. 0 <= z <= t,  t - M(1 - b) <= z <= M b           (b = d or u, binary)
//        sum_j d_kj <= 1, sum_j u_kj <= 1
//        t_ul_k <= sqrt(p_ue_max)
//        sum_k z_dl_kj^2 <= p_sat_max                      (per satellite)
//        |sum_j d_kj r_j - sum_j u_kj r_j| <= M (2 - sum_j d_kj - sum_j u_kj)
//
// Coefficients are stored in bits (already divided by ln 2) and the constant
// keeps the log / chi / xi^2 sigma^2 terms so the objective equals f3.
struct SubproblemP4
{
    std::size_t ues = 0;
    std::size_t sats = 0;
    SpinVector spin;
    double big_m = 1.0;
    double p_sat_max = 0.0;
    double ue_amp_max = 0.0; // sqrt(p_ue_max)
    Grid<double> lin_dl, lin_ul;
    Grid<double> quad_dl, quad_ul;
    double constant = 0.0;

    double objective(const Grid<double>& z_dl, const Grid<double>& z_ul) const;
};

// Smallest integer M covering sqrt of every power budget and 1.
double big_m_value(const Scenario& scenario);

SubproblemP4 build_p4(const GainTables& gains, const SpinVector& spin, const AuxState& aux,
                      const Scenario& scenario, double big_m);

enum class BinaryFix : std::uint8_t
{
    free,
    zero,
    one,
};

struct NodeFixings
{
    Grid<BinaryFix> d;
    Grid<BinaryFix> u;

    static NodeFixings root(std::size_t ues, std::size_t sats)
    {
        return {Grid<BinaryFix>(ues, sats, BinaryFix::free), Grid<BinaryFix>(ues, sats, BinaryFix::free)};
    }
};

struct RelaxationSolution
{
    bool infeasible = false;
    Grid<double> d, u;       // relaxed binaries
    Grid<double> z_dl, z_ul;
    std::vector<double> t_dl, t_ul;
    double objective = 0.0;  // at (z_dl, z_ul)
    double bound = 0.0;      // certified upper bound for the node
    double kkt_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct RelaxationOptions
{
    double tolerance = 1e-10;
    int max_iterations = 150;
};

// Continuous relaxation of P4 restricted by the node's fixings. The relaxed
// binaries are returned integral wherever an integral choice is consistent
// with the relaxed amplitudes.
RelaxationSolution solve_relaxation(const SubproblemP4& p4, const NodeFixings& fixings,
                                    const RelaxationOptions& options = {});
RelaxationSolution solve_relaxation(const SubproblemP4& p4, const RelaxationOptions& options = {});

enum class BranchingRule
{
    most_fractional,
};

struct BnbOptions
{
    double relative_gap_tol = 1e-9;
    double absolute_gap_tol = 1e-12;
    std::size_t node_limit = 200000;
    double relaxation_tol = 1e-10;
    BranchingRule branching = BranchingRule::most_fractional;
};

enum class BnbStatus
{
    optimal,
    gap_limit,
    node_limit,
};

std::string to_string(BnbStatus s);

struct SubproblemSolution
{
    Grid<std::uint8_t> d, u;
    std::vector<double> t_dl, t_ul;
    Grid<double> z_dl, z_ul;
    double objective = 0.0;
    double bound = 0.0;
    double gap = 0.0;
    std::size_t nodes = 0;
    std::size_t unconverged_relaxations = 0;
    BnbStatus status = BnbStatus::optimal;
};

// Integral feasible point from a relaxed one: argmax rounding per row (none
// when every entry is below 0.5), UL dropped on an FDD conflict, amplitudes
// clipped and scaled into the budgets.
SubproblemSolution round_and_repair(const RelaxationSolution& relaxed, const SubproblemP4& p4);

// Best-first branch and bound on the relaxation bound.
SubproblemSolution branch_and_bound(const SubproblemP4& p4, const BnbOptions& options = {});

// Largest violation of any P4 constraint by an integral solution.
double p4_violation(const SubproblemP4& p4, const SubproblemSolution& sol);

// Allocation encoded by an integral solution: p = t^2 on served directions.
Allocation allocation_of(const SubproblemSolution& sol);

// Self-describing JSON dump of the coefficients and bounds.
std::string p4_dump_json(const SubproblemP4& p4);

} // namespace spinband
