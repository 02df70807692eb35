#include "spinband/objective.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace spinband
{
namespace
{

constexpr double inv_ln2 = 1.0 / std::numbers::ln2;

void check_dims(const GainTables& gains, const Allocation& alloc)
{
    if (alloc.ues() != gains.ues() || alloc.sats() != gains.sats() || alloc.p_dl.size() != gains.ues() ||
        alloc.p_ul.size() != gains.ues() || alloc.u.rows() != gains.ues() || alloc.u.cols() != gains.sats())
        throw std::invalid_argument("allocation dimensions do not match gain tables");
}

void check_dims(const GainTables& gains, const AuxState& aux)
{
    for (const auto* g : {&aux.chi_dl, &aux.chi_ul, &aux.xi_dl, &aux.xi_ul})
        if (g->rows() != gains.ues() || g->cols() != gains.sats())
            throw std::invalid_argument("auxiliary state dimensions do not match gain tables");
}

// Sum of log2(1+chi) - chi/ln2 over both directions, the part shared by f1,
// f2 and f3.
double chi_terms(const AuxState& aux, std::size_t k, std::size_t j)
{
    const double cd = aux.chi_dl(k, j);
    const double cu = aux.chi_ul(k, j);
    return std::log2(1.0 + cd) + std::log2(1.0 + cu) - (cd + cu) * inv_ln2;
}

} // namespace

FeasibilityReport check_feasibility(const Allocation& alloc, const SpinVector& spin, const Scenario& scenario,
                                    double tol)
{
    const std::size_t K = scenario.ue_count();
    const std::size_t J = scenario.sat_count();
    if (alloc.ues() != K || alloc.sats() != J || alloc.u.rows() != K || alloc.u.cols() != J ||
        alloc.p_dl.size() != K || alloc.p_ul.size() != K || spin.size() != J)
        throw std::invalid_argument("check_feasibility: dimension mismatch");

    FeasibilityReport rep;
    auto fail = [&](const std::string& what) {
        rep.feasible = false;
        rep.violations.push_back(what);
    };

    for (std::size_t k = 0; k < K; ++k)
    {
        int nd = 0;
        int nu = 0;
        int d_spin = 0;
        int u_spin = 0;
        for (std::size_t j = 0; j < J; ++j)
        {
            if (alloc.d(k, j) > 1 || alloc.u(k, j) > 1)
                fail("(8g) non-binary association for ue " + std::to_string(k));
            nd += alloc.d(k, j);
            nu += alloc.u(k, j);
            d_spin += alloc.d(k, j) * spin[j];
            u_spin += alloc.u(k, j) * spin[j];
        }
        if (nd > 1)
            fail("(8c) ue " + std::to_string(k) + " has more than one DL satellite");
        if (nu > 1)
            fail("(8c) ue " + std::to_string(k) + " has more than one UL satellite");
        if (nd == 1 && nu == 1 && d_spin != u_spin)
            fail("(8b) ue " + std::to_string(k) + " uses the same band for DL and UL");
        if (!(alloc.p_ul[k] <= scenario.p_ue_max * (1.0 + tol)))
            fail("(8e) ue " + std::to_string(k) + " exceeds its UL budget");
        if (!(alloc.p_dl[k] >= 0.0) || !(alloc.p_ul[k] >= 0.0))
            fail("(8f) negative power for ue " + std::to_string(k));
    }
    for (std::size_t j = 0; j < J; ++j)
    {
        double load = 0.0;
        for (std::size_t k = 0; k < K; ++k)
            load += alloc.d(k, j) * alloc.p_dl[k];
        if (!(load <= scenario.p_sat_max * (1.0 + tol)))
            fail("(8d) satellite " + std::to_string(j) + " exceeds its DL budget");
    }
    return rep;
}

LinkPowers link_powers(const GainTables& gains, const Allocation& alloc, double noise_variance)
{
    check_dims(gains, alloc);
    const std::size_t K = gains.ues();
    const std::size_t J = gains.sats();
    LinkPowers lp;
    for (auto* g : {&lp.dl_signal, &lp.dl_interference, &lp.dl_total, &lp.ul_signal, &lp.ul_interference,
                    &lp.ul_total})
        *g = Grid<double>(K, J);

    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < J; ++j)
        {
            double dl_self = 0.0;
            double dl_other = 0.0;
            double ue_ue = 0.0;
            double ul_self = 0.0;
            double ul_other = 0.0;
            for (std::size_t k2 = 0; k2 < K; ++k2)
                for (std::size_t j2 = 0; j2 < J; ++j2)
                {
                    const double pd = alloc.d(k2, j2) * alloc.p_dl[k2];
                    const double pu = alloc.u(k2, j2) * alloc.p_ul[k2];
                    const double dl = pd * gains.dl_xint(k, j, k2, j2);
                    const double ul = pu * gains.ul_xint(k, j, k2, j2);
                    if (k2 == k)
                    {
                        dl_self += dl;
                        ul_self += ul;
                    }
                    else
                    {
                        dl_other += dl;
                        ul_other += ul;
                        if (j2 != j)
                            ue_ue += pu * gains.uu(k, j, k2, j2);
                    }
                }
            lp.dl_signal(k, j) = alloc.d(k, j) * alloc.p_dl[k] * gains.dl_sig(k, j);
            lp.ul_signal(k, j) = alloc.u(k, j) * alloc.p_ul[k] * gains.ul_sig(k, j);
            lp.dl_interference(k, j) = dl_other + ue_ue;
            lp.ul_interference(k, j) = ul_other;
            lp.dl_total(k, j) = noise_variance + dl_self + dl_other + ue_ue;
            lp.ul_total(k, j) = noise_variance + ul_self + ul_other;
        }
    return lp;
}

double eval_f0(const GainTables& gains, const Allocation& alloc, double noise_variance)
{
    const LinkPowers lp = link_powers(gains, alloc, noise_variance);
    double f = 0.0;
    for (std::size_t k = 0; k < gains.ues(); ++k)
        for (std::size_t j = 0; j < gains.sats(); ++j)
        {
            f += std::log2(1.0 + lp.ul_signal(k, j) / (noise_variance + lp.ul_interference(k, j)));
            f += std::log2(1.0 + lp.dl_signal(k, j) / (noise_variance + lp.dl_interference(k, j)));
        }
    return f;
}

double eval_f1(const GainTables& gains, const Allocation& alloc, const AuxState& aux, double noise_variance)
{
    check_dims(gains, aux);
    const LinkPowers lp = link_powers(gains, alloc, noise_variance);
    double f = 0.0;
    for (std::size_t k = 0; k < gains.ues(); ++k)
        for (std::size_t j = 0; j < gains.sats(); ++j)
        {
            const double frac = (1.0 + aux.chi_ul(k, j)) * lp.ul_signal(k, j) / lp.ul_total(k, j) +
                                (1.0 + aux.chi_dl(k, j)) * lp.dl_signal(k, j) / lp.dl_total(k, j);
            f += chi_terms(aux, k, j) + frac * inv_ln2;
        }
    return f;
}

double eval_f2(const GainTables& gains, const Allocation& alloc, const AuxState& aux, double noise_variance)
{
    check_dims(gains, aux);
    const LinkPowers lp = link_powers(gains, alloc, noise_variance);
    double f = 0.0;
    for (std::size_t k = 0; k < gains.ues(); ++k)
        for (std::size_t j = 0; j < gains.sats(); ++j)
        {
            const double xd = aux.xi_dl(k, j);
            const double xu = aux.xi_ul(k, j);
            const double lin_dl = 2.0 * xd * alloc.d(k, j) *
                                  std::sqrt((1.0 + aux.chi_dl(k, j)) * alloc.p_dl[k]) *
                                  std::sqrt(gains.dl_sig(k, j));
            const double lin_ul = 2.0 * xu * alloc.u(k, j) *
                                  std::sqrt((1.0 + aux.chi_ul(k, j)) * alloc.p_ul[k]) *
                                  std::sqrt(gains.ul_sig(k, j));
            const double quad = xd * xd * lp.dl_total(k, j) + xu * xu * lp.ul_total(k, j);
            f += chi_terms(aux, k, j) + (lin_dl + lin_ul - quad) * inv_ln2;
        }
    return f;
}

double eval_f3(const GainTables& gains, const SpinVector& spin, const Grid<double>& z_dl,
               const Grid<double>& z_ul, const AuxState& aux, double noise_variance)
{
    check_dims(gains, aux);
    if (!(spin == gains.spin))
        throw std::invalid_argument("eval_f3: gain tables were built for another spin vector");
    const std::size_t K = gains.ues();
    const std::size_t J = gains.sats();
    if (z_dl.rows() != K || z_dl.cols() != J || z_ul.rows() != K || z_ul.cols() != J)
        throw std::invalid_argument("eval_f3: amplitude dimensions do not match gain tables");

    double f = 0.0;
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < J; ++j)
        {
            const double xd = aux.xi_dl(k, j);
            const double xu = aux.xi_ul(k, j);
            double rest = -(xd * xd + xu * xu) * noise_variance;
            rest += 2.0 * xd * z_dl(k, j) * std::sqrt(1.0 + aux.chi_dl(k, j)) * std::sqrt(gains.dl_sig(k, j));
            rest += 2.0 * xu * z_ul(k, j) * std::sqrt(1.0 + aux.chi_ul(k, j)) * std::sqrt(gains.ul_sig(k, j));

            double pen_dl = 0.0;
            double pen_ul = 0.0;
            for (std::size_t k2 = 0; k2 < K; ++k2)
                for (std::size_t j2 = 0; j2 < J; ++j2)
                {
                    const double xd2 = aux.xi_dl(k2, j2);
                    const double xu2 = aux.xi_ul(k2, j2);
                    pen_dl += xd2 * xd2 * gains.dl_xint(k2, j2, k, j);
                    pen_ul += xu2 * xu2 * gains.ul_xint(k2, j2, k, j);
                    if (k2 != k && j2 != j)
                        pen_ul += xd2 * xd2 * gains.uu(k2, j2, k, j);
                }
            rest -= z_dl(k, j) * z_dl(k, j) * pen_dl + z_ul(k, j) * z_ul(k, j) * pen_ul;
            f += chi_terms(aux, k, j) + rest * inv_ln2;
        }
    return f;
}

void amplitudes_of(const Allocation& alloc, Grid<double>& z_dl, Grid<double>& z_ul)
{
    z_dl = Grid<double>(alloc.ues(), alloc.sats());
    z_ul = Grid<double>(alloc.ues(), alloc.sats());
    for (std::size_t k = 0; k < alloc.ues(); ++k)
        for (std::size_t j = 0; j < alloc.sats(); ++j)
        {
            z_dl(k, j) = alloc.d(k, j) * std::sqrt(alloc.p_dl[k]);
            z_ul(k, j) = alloc.u(k, j) * std::sqrt(alloc.p_ul[k]);
        }
}

} // namespace spinband
