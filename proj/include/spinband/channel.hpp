#pragma once

#include "spinband/scenario.hpp"
#include "spinband/types.hpp"

#include <complex>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace spinband
{

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

struct ArrayGeometry
{
    // (D^x_n, D^y_n) per element, metres.
    std::vector<std::pair<double, double>> element_positions;

    std::size_t size() const { return element_positions.size(); }

    // Regular nx-by-ny grid starting at the origin.
    static ArrayGeometry upa(int nx, int ny, double spacing);
};

ArrayGeometry array_of(const SatelliteGeometry& sat);

// Free-space gain (c / (4 pi d f))^2.
double path_loss(double distance_m, double frequency_hz);

CVector array_response(const ArrayGeometry& array, double frequency_hz, double azimuth, double elevation);

CVector sat_ue_channel(const Scenario& scenario, std::size_t k, std::size_t j, Band band);

// Real, non-negative amplitude; the phase never reaches any objective.
double ue_ue_channel(const Scenario& scenario, std::size_t k, std::size_t k2, Band band);

// Unit-norm conjugate beamformer on the direct channel: h^T w = ||h||.
CVector mrt_precoder(std::span<const Complex> h_direct);
CVector mrc_combiner(std::span<const Complex> h_direct);

double squared_norm(std::span<const Complex> v);
// Bilinear product a^T b (no conjugation).
Complex dot_t(std::span<const Complex> a, std::span<const Complex> b);

// Optional long-term multiplier applied to beta_{kjl}.
using LongTermScale = std::function<double(std::size_t k, std::size_t j, Band band)>;

class ChannelSet
{
  public:
    ChannelSet() = default;
    ChannelSet(std::size_t ues, std::size_t sats, std::size_t antennas);

    std::size_t ues() const { return ues_; }
    std::size_t sats() const { return sats_; }
    std::size_t antennas() const { return antennas_; }

    std::span<const Complex> h(std::size_t k, std::size_t j, Band band) const;
    std::span<Complex> h(std::size_t k, std::size_t j, Band band);

    double g(std::size_t k, std::size_t k2, Band band) const;
    void set_g(std::size_t k, std::size_t k2, Band band, double amplitude);

    // Same links with the two bands' roles exchanged.
    ChannelSet with_bands_swapped() const;

  private:
    std::size_t h_offset(std::size_t k, std::size_t j, Band band) const;

    std::size_t ues_ = 0;
    std::size_t sats_ = 0;
    std::size_t antennas_ = 0;
    std::vector<Complex> h_;
    std::vector<double> g_;
};

ChannelSet synthesize_channels(const Scenario& scenario, const LongTermScale& scale = {});

// Debug export: per-(k,j,l) channel norms and per-pair |g|^2.
std::string channel_dump_json(const ChannelSet& channels);

} // namespace spinband
