#pragma once

// Brute-force references for tests and the `oracle` subcommand. Nothing here
// is called by the solver path, and the arithmetic is re-derived from the raw
// model instead of reusing GainTables or the B&B machinery.

#include "spinband/channel.hpp"
#include "spinband/miqcqp.hpp"
#include "spinband/objective.hpp"
#include "spinband/scenario.hpp"

#include <cstddef>
#include <cstdint>
#include <stdexcept>

namespace spinband
{

class OracleTooLarge : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

struct OracleP4Result
{
    double objective = 0.0;
    Grid<std::uint8_t> d, u;
    Grid<double> z_dl, z_ul;
    std::size_t patterns = 0; // association patterns that passed the filters
};

// Exhaustive over association patterns (K <= 3, J <= 2); each pattern's
// continuous problem is solved in closed form (UL) or by bisection on the
// satellite budget multiplier (DL).
OracleP4Result oracle_p4(const SubproblemP4& p4);

struct LinkSinrs
{
    Grid<double> dl;
    Grid<double> ul;
};

// SINRs straight from the complex channels with MRT/MRC built here.
LinkSinrs oracle_sinr(const ChannelSet& channels, const SpinVector& spin, const Allocation& alloc,
                      double noise_variance, UeUeBandConvention convention = UeUeBandConvention::paper);

struct GlobalBracket
{
    double best_f0 = 0.0; // lower bound on the global optimum
    SpinVector spin;
    Allocation alloc;
    std::size_t evaluated = 0;
};

// Spins x associations x uniform power grid {p_max * i / levels, i = 1..levels}
// for K <= 2, J <= 2.
GlobalBracket oracle_global_f0(const Scenario& scenario, const ChannelSet& channels, int power_levels);

} // namespace spinband
