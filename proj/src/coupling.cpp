#include "spinband/coupling.hpp"

#include <stdexcept>

namespace spinband
{
namespace
{

void check_spin(const ChannelSet& ch, const SpinVector& spin)
{
    if (spin.size() != ch.sats())
        throw std::invalid_argument("spin vector length differs from satellite count");
}

CVector scaled_copy(std::span<const Complex> v, double factor)
{
    CVector out(v.begin(), v.end());
    for (auto& x : out)
        x *= factor;
    return out;
}

} // namespace

CVector effective_dl_channel(const ChannelSet& ch, const SpinVector& spin, std::size_t k, std::size_t j,
                             std::size_t j2)
{
    check_spin(ch, spin);
    const double same = spin[j] == spin[j2] ? 1.0 : 0.0;
    // r_j2 = 1 -> band 1, else band 2: the DL band of satellite j2.
    return scaled_copy(ch.h(k, j2, spin.downlink_band(j2)), same);
}

CVector effective_ul_channel(const ChannelSet& ch, const SpinVector& spin, std::size_t k2, std::size_t j,
                             std::size_t j2)
{
    check_spin(ch, spin);
    const double same = spin[j] == spin[j2] ? 1.0 : 0.0;
    return scaled_copy(ch.h(k2, j, spin.uplink_band(j2)), same);
}

double ue_ue_effective(const ChannelSet& ch, const SpinVector& spin, std::size_t k, std::size_t k2,
                       std::size_t j, std::size_t j2, UeUeBandConvention convention)
{
    check_spin(ch, spin);
    if (spin[j] == spin[j2] || k == k2)
        return 0.0;
    // default convention: r_j2 * g_{l=1} + (1 - r_j2) * g_{l=2}
    Band band = spin[j2] ? Band::first : Band::second;
    if (convention == UeUeBandConvention::physical)
        band = spin.downlink_band(j);
    return ch.g(k2, k, band);
}

GainTables precompute_gains(const ChannelSet& ch, const SpinVector& spin, UeUeBandConvention convention)
{
    check_spin(ch, spin);
    const std::size_t K = ch.ues();
    const std::size_t J = ch.sats();

    GainTables t;
    t.spin = spin;
    t.dl_sig = Grid<double>(K, J);
    t.ul_sig = Grid<double>(K, J);
    t.dl_xint = LinkTable<double>(K, J);
    t.ul_xint = LinkTable<double>(K, J);
    t.uu = LinkTable<double>(K, J);

    // Beamformers on the direct channels.
    std::vector<CVector> w(K * J);
    std::vector<CVector> v(K * J);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < J; ++j)
        {
            auto dl = ch.h(k, j, spin.downlink_band(j));
            auto ul = ch.h(k, j, spin.uplink_band(j));
            t.dl_sig(k, j) = squared_norm(dl);
            t.ul_sig(k, j) = squared_norm(ul);
            w[k * J + j] = mrt_precoder(dl);
            v[k * J + j] = mrc_combiner(ul);
        }

    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < J; ++j)
            for (std::size_t k2 = 0; k2 < K; ++k2)
                for (std::size_t j2 = 0; j2 < J; ++j2)
                {
                    if (spin[j] == spin[j2])
                    {
                        // DL: victim k on j, interferer j2 beaming to k2.
                        t.dl_xint(k, j, k2, j2) =
                            std::norm(dot_t(ch.h(k, j2, spin.downlink_band(j2)), w[k2 * J + j2]));
                        // UL: satellite j combining for k, UE k2 transmitting toward j2.
                        t.ul_xint(k, j, k2, j2) =
                            std::norm(dot_t(v[k * J + j], ch.h(k2, j, spin.uplink_band(j2))));
                    }
                    else
                    {
                        const double nu = ue_ue_effective(ch, spin, k, k2, j, j2, convention);
                        t.uu(k, j, k2, j2) = nu * nu;
                    }
                }
    return t;
}

} // namespace spinband
