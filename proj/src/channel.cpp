#include "spinband/channel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spinband
{

ArrayGeometry ArrayGeometry::upa(int nx, int ny, double spacing)
{
    if (nx < 1 || ny < 1 || !(spacing > 0.0))
        throw std::invalid_argument("invalid UPA geometry");
    ArrayGeometry a;
    a.element_positions.reserve(static_cast<std::size_t>(nx * ny));
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix)
            a.element_positions.emplace_back(ix * spacing, iy * spacing);
    return a;
}

ArrayGeometry array_of(const SatelliteGeometry& sat)
{
    return ArrayGeometry::upa(sat.antennas_x, sat.antennas_y, sat.element_spacing);
}

double path_loss(double distance_m, double frequency_hz)
{
    if (!(distance_m > 0.0) || !(frequency_hz > 0.0))
        throw std::invalid_argument("path_loss: distance and frequency must be positive");
    const double a = speed_of_light / (4.0 * std::numbers::pi * distance_m * frequency_hz);
    return a * a;
}

CVector array_response(const ArrayGeometry& array, double frequency_hz, double azimuth, double elevation)
{
    if (array.size() == 0 || !(frequency_hz > 0.0))
        throw std::invalid_argument("array_response: empty array or non-positive frequency");
    const double psi_x = std::cos(elevation) * std::cos(azimuth);
    const double psi_y = std::cos(elevation) * std::sin(azimuth);
    const double wavenumber = 2.0 * std::numbers::pi * frequency_hz / speed_of_light;
    CVector b(array.size());
    for (std::size_t n = 0; n < array.size(); ++n)
    {
        const auto [dx, dy] = array.element_positions[n];
        b[n] = std::polar(1.0, -wavenumber * (dx * psi_x + dy * psi_y));
    }
    return b;
}

CVector sat_ue_channel(const Scenario& scenario, std::size_t k, std::size_t j, Band band)
{
    const LinkGeometry geo = geometry_of(scenario, k, j);
    const double f = scenario.bands.frequency(band);
    CVector h = array_response(array_of(scenario.satellites[j]), f, geo.azimuth, geo.elevation);
    const double amp = std::sqrt(path_loss(geo.distance, f));
    for (auto& x : h)
        x *= amp;
    return h;
}

double ue_ue_channel(const Scenario& scenario, std::size_t k, std::size_t k2, Band band)
{
    if (k >= scenario.ue_count() || k2 >= scenario.ue_count())
        throw std::out_of_range("ue_ue_channel: index out of range");
    if (k == k2)
        throw std::invalid_argument("ue_ue_channel: no self channel");
    const double d = (scenario.ues[k].position - scenario.ues[k2].position).norm();
    return std::sqrt(path_loss(d, scenario.bands.frequency(band)));
}

double squared_norm(std::span<const Complex> v)
{
    double s = 0.0;
    for (const auto& x : v)
        s += std::norm(x);
    return s;
}

Complex dot_t(std::span<const Complex> a, std::span<const Complex> b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("dot_t: length mismatch");
    Complex s{0.0, 0.0};
    for (std::size_t n = 0; n < a.size(); ++n)
        s += a[n] * b[n];
    return s;
}

CVector mrt_precoder(std::span<const Complex> h_direct)
{
    const double nrm = std::sqrt(squared_norm(h_direct));
    if (!(nrm > 0.0))
        throw std::invalid_argument("beamformer: zero-norm direct channel");
    CVector w(h_direct.size());
    for (std::size_t n = 0; n < w.size(); ++n)
        w[n] = std::conj(h_direct[n]) / nrm;
    return w;
}

CVector mrc_combiner(std::span<const Complex> h_direct) { return mrt_precoder(h_direct); }

ChannelSet::ChannelSet(std::size_t ues, std::size_t sats, std::size_t antennas)
    : ues_(ues), sats_(sats), antennas_(antennas), h_(ues * sats * 2 * antennas), g_(ues * ues * 2, 0.0)
{
}

std::size_t ChannelSet::h_offset(std::size_t k, std::size_t j, Band band) const
{
    if (k >= ues_ || j >= sats_)
        throw std::out_of_range("ChannelSet: index out of range");
    return ((k * sats_ + j) * 2 + static_cast<std::size_t>(band)) * antennas_;
}

std::span<const Complex> ChannelSet::h(std::size_t k, std::size_t j, Band band) const
{
    return {h_.data() + h_offset(k, j, band), antennas_};
}

std::span<Complex> ChannelSet::h(std::size_t k, std::size_t j, Band band)
{
    return {h_.data() + h_offset(k, j, band), antennas_};
}

double ChannelSet::g(std::size_t k, std::size_t k2, Band band) const
{
    if (k >= ues_ || k2 >= ues_)
        throw std::out_of_range("ChannelSet: index out of range");
    return g_[(k * ues_ + k2) * 2 + static_cast<std::size_t>(band)];
}

void ChannelSet::set_g(std::size_t k, std::size_t k2, Band band, double amplitude)
{
    if (k >= ues_ || k2 >= ues_)
        throw std::out_of_range("ChannelSet: index out of range");
    g_[(k * ues_ + k2) * 2 + static_cast<std::size_t>(band)] = amplitude;
    g_[(k2 * ues_ + k) * 2 + static_cast<std::size_t>(band)] = amplitude;
}

ChannelSet ChannelSet::with_bands_swapped() const
{
    ChannelSet out(ues_, sats_, antennas_);
    for (std::size_t k = 0; k < ues_; ++k)
        for (std::size_t j = 0; j < sats_; ++j)
            for (Band b : both_bands)
            {
                auto src = h(k, j, b);
                auto dst = out.h(k, j, other_band(b));
                std::copy(src.begin(), src.end(), dst.begin());
            }
    for (std::size_t k = 0; k < ues_; ++k)
        for (std::size_t k2 = 0; k2 < ues_; ++k2)
            for (Band b : both_bands)
                out.g_[(k * ues_ + k2) * 2 + static_cast<std::size_t>(other_band(b))] = g(k, k2, b);
    return out;
}

ChannelSet synthesize_channels(const Scenario& scenario, const LongTermScale& scale)
{
    const std::size_t K = scenario.ue_count();
    const std::size_t J = scenario.sat_count();
    if (K == 0 || J == 0)
        throw std::invalid_argument("synthesize_channels: empty scenario");
    const std::size_t N = scenario.satellites.front().antenna_count();
    for (const auto& s : scenario.satellites)
        if (s.antenna_count() != N)
            throw std::invalid_argument("synthesize_channels: satellites must share an antenna count");

    ChannelSet ch(K, J, N);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < J; ++j)
            for (Band b : both_bands)
            {
                CVector h = sat_ue_channel(scenario, k, j, b);
                if (scale)
                {
                    const double f = std::sqrt(scale(k, j, b));
                    for (auto& x : h)
                        x *= f;
                }
                auto dst = ch.h(k, j, b);
                std::copy(h.begin(), h.end(), dst.begin());
            }
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t k2 = k + 1; k2 < K; ++k2)
            for (Band b : both_bands)
                ch.set_g(k, k2, b, ue_ue_channel(scenario, k, k2, b));
    return ch;
}

std::string channel_dump_json(const ChannelSet& channels)
{
    nlohmann::ordered_json out;
    out["ues"] = channels.ues();
    out["sats"] = channels.sats();
    out["antennas"] = channels.antennas();
    auto& links = out["sat_ue"] = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < channels.ues(); ++k)
        for (std::size_t j = 0; j < channels.sats(); ++j)
            for (Band b : both_bands)
                links.push_back({{"k", k},
                                 {"j", j},
                                 {"band", static_cast<int>(b) + 1},
                                 {"norm", std::sqrt(squared_norm(channels.h(k, j, b)))}});
    auto& pairs = out["ue_ue"] = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < channels.ues(); ++k)
        for (std::size_t k2 = k + 1; k2 < channels.ues(); ++k2)
            for (Band b : both_bands)
            {
                const double g = channels.g(k, k2, b);
                pairs.push_back({{"k", k}, {"k2", k2}, {"band", static_cast<int>(b) + 1}, {"gain", g * g}});
            }
    return out.dump(2);
}

} // namespace spinband
