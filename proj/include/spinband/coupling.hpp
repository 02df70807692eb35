#pragma once

#include "spinband/channel.hpp"
#include "spinband/scenario.hpp"
#include "spinband/types.hpp"

namespace spinband
{

// Effective DL channel from satellite j2 to UE k, as seen by a UE served by
// satellite j. Zero when the two satellites have opposite spins; the direct
// DL channel when j2 == j.
CVector effective_dl_channel(const ChannelSet& ch, const SpinVector& spin, std::size_t k, std::size_t j,
                             std::size_t j2);

// Effective UL channel from UE k2 (served by j2) into satellite j.
CVector effective_ul_channel(const ChannelSet& ch, const SpinVector& spin, std::size_t k2, std::size_t j,
                             std::size_t j2);

// UE-UE coupling from UL transmitter k2 (served by j2) into DL receiver k
// (served by j). Non-zero only for opposite spins.
double ue_ue_effective(const ChannelSet& ch, const SpinVector& spin, std::size_t k, std::size_t k2,
                       std::size_t j, std::size_t j2, UeUeBandConvention convention = UeUeBandConvention::paper);

// Squared power gains for one spin vector, with MRT/MRC beamformers fixed on
// the direct channels.
struct GainTables
{
    SpinVector spin;
    Grid<double> dl_sig;         // ||gamma^dl_kjj||^2
    LinkTable<double> dl_xint;   // |(gamma^dl_kjj')^T w_k'j'|^2
    Grid<double> ul_sig;         // ||gamma^ul_kjj||^2
    LinkTable<double> ul_xint;   // |v_kj^T gamma^ul_k'jj'|^2
    LinkTable<double> uu;        // |nu_kk'jj'|^2

    std::size_t ues() const { return dl_sig.rows(); }
    std::size_t sats() const { return dl_sig.cols(); }
};

GainTables precompute_gains(const ChannelSet& ch, const SpinVector& spin,
                            UeUeBandConvention convention = UeUeBandConvention::paper);

} // namespace spinband
