#pragma once

#include "spinband/coupling.hpp"
#include "spinband/scenario.hpp"
#include "spinband/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace spinband
{

struct Allocation
{
    Grid<std::uint8_t> d; // DL association (k, j)
    Grid<std::uint8_t> u; // UL association (k, j)
    std::vector<double> p_dl;
    std::vector<double> p_ul;

    Allocation() = default;
    Allocation(std::size_t ues, std::size_t sats)
        : d(ues, sats, 0), u(ues, sats, 0), p_dl(ues, 0.0), p_ul(ues, 0.0)
    {
    }

    std::size_t ues() const { return d.rows(); }
    std::size_t sats() const { return d.cols(); }

    friend bool operator==(const Allocation&, const Allocation&) = default;
};

struct AuxState
{
    Grid<double> chi_dl;
    Grid<double> chi_ul;
    Grid<double> xi_dl;
    Grid<double> xi_ul;

    AuxState() = default;
    AuxState(std::size_t ues, std::size_t sats)
        : chi_dl(ues, sats), chi_ul(ues, sats), xi_dl(ues, sats), xi_ul(ues, sats)
    {
    }
};

struct FeasibilityReport
{
    bool feasible = true;
    std::vector<std::string> violations;
};

// Checks (8c)-(8g) and the FDD consistency condition for UEs served in both
// directions. `tol` is a relative slack on the power constraints.
FeasibilityReport check_feasibility(const Allocation& alloc, const SpinVector& spin, const Scenario& scenario,
                                    double tol = 1e-9);

// Per-link received power split used by every evaluator.
//   signal:        assoc * p * sig
//   interference:  co-channel power from k' != k (plus UE-UE for DL)
//   total:         sigma^2 + co-channel power summed over every k' (the
//                  desired signal included) + UE-UE
struct LinkPowers
{
    Grid<double> dl_signal, dl_interference, dl_total;
    Grid<double> ul_signal, ul_interference, ul_total;
};

LinkPowers link_powers(const GainTables& gains, const Allocation& alloc, double noise_variance);

// Sum spectral efficiency in bits/s/Hz. Interference excludes k' = k.
double eval_f0(const GainTables& gains, const Allocation& alloc, double noise_variance);

// Lagrangian-dual transform. Fractions use the total received power in the
// denominator (every k', including the desired signal); this is the form
// for which chi = SINR is the maximiser and must stay that way. Expressed in
// bits: log2 terms plus the natural-log transform remainder divided by ln 2.
double eval_f1(const GainTables& gains, const Allocation& alloc, const AuxState& aux, double noise_variance);

// Quadratic transform of f1, same units.
double eval_f2(const GainTables& gains, const Allocation& alloc, const AuxState& aux, double noise_variance);

// f2 rewritten in z = assoc * sqrt(power). The quadratic penalty on each z is
// the regrouped (index-transposed) interference each link causes.
double eval_f3(const GainTables& gains, const SpinVector& spin, const Grid<double>& z_dl,
               const Grid<double>& z_ul, const AuxState& aux, double noise_variance);

// z_kj = assoc_kj * sqrt(p_k).
void amplitudes_of(const Allocation& alloc, Grid<double>& z_dl, Grid<double>& z_ul);

} // namespace spinband
