#include "spinband/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace spinband
{
namespace
{

constexpr double boltzmann = 1.380649e-23;

// Portable uniform draw in [0, 1); std::uniform_real_distribution is not
// bit-reproducible across standard libraries.
double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

} // namespace

double thermal_noise_power(double bandwidth_hz) { return boltzmann * 290.0 * bandwidth_hz; }

void validate(const ScenarioConfig& config)
{
    if (config.satellites.empty())
        throw std::invalid_argument("scenario needs at least one satellite");
    if (config.ue_count <= 0)
        throw std::invalid_argument("scenario needs at least one UE");
    if (!(config.altitude_m > 0.0))
        throw std::invalid_argument("altitude must be positive");
    if (!(config.region_radius_m >= 0.0) || !std::isfinite(config.region_radius_m))
        throw std::invalid_argument("region radius must be non-negative and finite");
    if (config.region_radius_m == 0.0 && config.ue_count > 1)
        throw std::invalid_argument("zero region radius co-locates every UE");
    const auto& b = config.bands;
    if (!(b.f1_hz > 0.0) || !(b.f2_hz > 0.0) || !(b.b1_hz > 0.0) || !(b.b2_hz > 0.0))
        throw std::invalid_argument("band frequencies and bandwidths must be positive");
    if (b.f1_hz == b.f2_hz)
        throw std::invalid_argument("the two bands must have distinct carriers");
    if (!(config.p_sat_max_w > 0.0) || !(config.p_ue_max_w > 0.0))
        throw std::invalid_argument("power budgets must be positive");
    if (config.noise_variance_w && !(*config.noise_variance_w > 0.0))
        throw std::invalid_argument("noise variance must be positive");
    if (config.antennas_x < 1 || config.antennas_y < 1)
        throw std::invalid_argument("antenna counts must be at least 1");
    if (config.element_spacing_m && !(*config.element_spacing_m > 0.0))
        throw std::invalid_argument("element spacing must be positive");

    for (std::size_t a = 0; a < config.satellites.size(); ++a)
    {
        const auto& s = config.satellites[a];
        if (!(s.elevation_deg > 0.0 && s.elevation_deg <= 90.0))
            throw std::invalid_argument("satellite elevation must lie in (0, 90] degrees");
        for (std::size_t c = 0; c < a; ++c)
        {
            const auto& o = config.satellites[c];
            const bool both_zenith = s.elevation_deg == 90.0 && o.elevation_deg == 90.0;
            if (both_zenith || (s.elevation_deg == o.elevation_deg && s.azimuth_deg == o.azimuth_deg))
                throw std::invalid_argument("duplicate satellite placement");
        }
    }
}

Scenario build_scenario(const ScenarioConfig& config, std::uint64_t seed)
{
    validate(config);

    Scenario sc;
    sc.bands = config.bands;
    sc.p_sat_max = config.p_sat_max_w;
    sc.p_ue_max = config.p_ue_max_w;
    sc.seed = seed;
    sc.ue_ue_convention = config.ue_ue_convention;
    sc.noise_variance = config.noise_variance_w.value_or(thermal_noise_power(config.bands.b1_hz));

    const double spacing =
        config.element_spacing_m.value_or(speed_of_light / config.bands.f1_hz / 2.0);

    for (const auto& placement : config.satellites)
    {
        const double el = deg2rad(placement.elevation_deg);
        const double az = deg2rad(placement.azimuth_deg);
        const double ground = placement.elevation_deg == 90.0 ? 0.0 : config.altitude_m / std::tan(el);
        SatelliteGeometry g;
        g.position = {ground * std::cos(az), ground * std::sin(az), config.altitude_m};
        g.antennas_x = config.antennas_x;
        g.antennas_y = config.antennas_y;
        g.element_spacing = spacing;
        sc.satellites.push_back(g);
    }

    std::mt19937_64 rng(seed);
    const auto count = static_cast<std::size_t>(config.ue_count);
    for (std::size_t k = 0; k < count; ++k)
    {
        const double radius = config.region_radius_m * std::sqrt(uniform01(rng));
        const double angle = 2.0 * std::numbers::pi * uniform01(rng);
        UePosition ue;
        ue.position = {radius * std::cos(angle), radius * std::sin(angle), 0.0};
        sc.ues.push_back(ue);
    }

    for (std::size_t a = 0; a < count; ++a)
        for (std::size_t b = 0; b < a; ++b)
            if ((sc.ues[a].position - sc.ues[b].position).norm() < config.min_ue_separation_m)
                throw std::invalid_argument("UE drop produced co-located UEs; choose another seed");

    return sc;
}

LinkGeometry geometry_of(const Scenario& scenario, std::size_t k, std::size_t j)
{
    if (k >= scenario.ue_count() || j >= scenario.sat_count())
        throw std::out_of_range("geometry_of: index out of range");
    const Vec3 d = scenario.ues[k].position - scenario.satellites[j].position;
    const double m = d.norm();
    // Local frame: x = east, y = -north, z = down.
    const double lx = d.x;
    const double ly = -d.y;
    const double lz = -d.z;
    LinkGeometry g;
    g.distance = m;
    g.elevation = std::asin(std::clamp(lz / m, -1.0, 1.0));
    g.azimuth = std::atan2(ly, lx);
    return g;
}

std::string to_string(UeUeBandConvention c)
{
    return c == UeUeBandConvention::paper ? "paper" : "physical";
}

UeUeBandConvention parse_ue_ue_convention(const std::string& text)
{
    if (text == "paper")
        return UeUeBandConvention::paper;
    if (text == "physical")
        return UeUeBandConvention::physical;
    throw std::invalid_argument("unknown ue_ue_band_convention '" + text + "'");
}

} // namespace spinband
