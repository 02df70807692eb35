#pragma once

#include "spinband/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace spinband
{

struct BandPlan
{
    double f1_hz = 2.4e9;
    double f2_hz = 1.9e9;
    double b1_hz = 10e6;
    double b2_hz = 10e6;

    double frequency(Band b) const { return b == Band::first ? f1_hz : f2_hz; }
    double bandwidth(Band b) const { return b == Band::first ? b1_hz : b2_hz; }
};

struct SatelliteGeometry
{
    Vec3 position;
    int antennas_x = 16;
    int antennas_y = 16;
    double element_spacing = 0.0; // metres

    std::size_t antenna_count() const { return static_cast<std::size_t>(antennas_x * antennas_y); }
};

struct UePosition
{
    Vec3 position;
};

// Which band's UE-UE channel couples a downlink victim to an opposite-spin
// uplink interferer.
//   paper:    r_j' selects band 1, its complement band 2 (literal formula)
//   physical: the band the victim actually receives its downlink on
enum class UeUeBandConvention
{
    paper,
    physical,
};

struct Scenario
{
    std::vector<SatelliteGeometry> satellites;
    std::vector<UePosition> ues;
    BandPlan bands;
    double p_sat_max = 20.0;
    double p_ue_max = 2.0;
    double noise_variance = 0.0;
    std::uint64_t seed = 0;
    UeUeBandConvention ue_ue_convention = UeUeBandConvention::paper;

    std::size_t sat_count() const { return satellites.size(); }
    std::size_t ue_count() const { return ues.size(); }
};

struct SatellitePlacement
{
    double elevation_deg = 90.0;
    double azimuth_deg = 0.0;
};

// Declarative description of one snapshot. Everything except the UE drop is
// deterministic.
struct ScenarioConfig
{
    std::vector<SatellitePlacement> satellites;
    double altitude_m = 500e3;
    int ue_count = 10;
    double region_radius_m = 100.0;
    double region_lat_deg = 53.0793; // metadata only
    double region_lon_deg = 8.8017;  // metadata only
    BandPlan bands;
    double p_sat_max_w = 20.0;
    double p_ue_max_w = 2.0;
    std::optional<double> noise_variance_w;
    int antennas_x = 16;
    int antennas_y = 16;
    std::optional<double> element_spacing_m; // default: half wavelength at f1
    double min_ue_separation_m = 0.1;
    UeUeBandConvention ue_ue_convention = UeUeBandConvention::paper;
    std::uint64_t seed = 0;
};

// Thermal noise floor k_B * 290 K * bandwidth.
double thermal_noise_power(double bandwidth_hz);

// Throws std::invalid_argument when the configuration is unusable.
void validate(const ScenarioConfig& config);

Scenario build_scenario(const ScenarioConfig& config, std::uint64_t seed);

struct LinkGeometry
{
    double distance = 0.0;  // metres
    double azimuth = 0.0;   // radians, satellite-local frame
    double elevation = 0.0; // radians from the array plane; pi/2 at nadir
};

// The satellite-local frame has its z-axis toward nadir, x along the global
// east axis and y completing a right-handed frame.
LinkGeometry geometry_of(const Scenario& scenario, std::size_t k, std::size_t j);

std::string to_string(UeUeBandConvention c);
UeUeBandConvention parse_ue_ue_convention(const std::string& text);

} // namespace spinband
