#include "spinband/config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace spinband
{
namespace
{

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where)
{
    if (!obj.is_object())
        throw ConfigError(where + " must be an object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            throw ConfigError("unknown key '" + key + "' in " + where);
}

template <typename T>
void read(const json& obj, const char* key, T& out)
{
    if (!obj.contains(key))
        return;
    try
    {
        out = obj.at(key).get<T>();
    }
    catch (const json::exception& e)
    {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

} // namespace

ModeSelection parse_modes(const std::string& text)
{
    if (text == "with-spin" || text == "with_spin")
        return ModeSelection::with_spin;
    if (text == "without-spin" || text == "without_spin")
        return ModeSelection::without_spin;
    if (text == "both")
        return ModeSelection::both;
    throw ConfigError("unknown mode '" + text + "' (expected with-spin, without-spin or both)");
}

std::string to_string(ModeSelection m)
{
    switch (m)
    {
    case ModeSelection::with_spin:
        return "with-spin";
    case ModeSelection::without_spin:
        return "without-spin";
    case ModeSelection::both:
        return "both";
    }
    return "both";
}

ExperimentConfig parse_config(const std::string& json_text)
{
    json doc;
    try
    {
        doc = json::parse(json_text);
    }
    catch (const json::parse_error& e)
    {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    reject_unknown(doc,
                   {"satellites", "altitude_m", "ue_count", "region_radius_m", "region_center", "bands",
                    "p_sat_max_w", "p_ue_max_w", "noise_variance_w", "antennas", "element_spacing_m",
                    "min_ue_separation_m", "ue_ue_band_convention", "seed", "experiment"},
                   "config");

    ExperimentConfig cfg;
    ScenarioConfig& sc = cfg.scenario;
    if (!doc.contains("satellites") || !doc["satellites"].is_array())
        throw ConfigError("config needs a 'satellites' array");
    for (const auto& s : doc["satellites"])
    {
        reject_unknown(s, {"elevation_deg", "azimuth_deg"}, "satellite entry");
        if (!s.contains("elevation_deg"))
            throw ConfigError("satellite entry needs elevation_deg");
        SatellitePlacement p;
        read(s, "elevation_deg", p.elevation_deg);
        read(s, "azimuth_deg", p.azimuth_deg);
        sc.satellites.push_back(p);
    }
    read(doc, "altitude_m", sc.altitude_m);
    read(doc, "ue_count", sc.ue_count);
    read(doc, "region_radius_m", sc.region_radius_m);
    if (doc.contains("region_center"))
    {
        const auto& c = doc["region_center"];
        reject_unknown(c, {"lat_deg", "lon_deg"}, "region_center");
        read(c, "lat_deg", sc.region_lat_deg);
        read(c, "lon_deg", sc.region_lon_deg);
    }
    if (doc.contains("bands"))
    {
        const auto& b = doc["bands"];
        reject_unknown(b, {"f1_hz", "f2_hz", "b1_hz", "b2_hz"}, "bands");
        read(b, "f1_hz", sc.bands.f1_hz);
        read(b, "f2_hz", sc.bands.f2_hz);
        read(b, "b1_hz", sc.bands.b1_hz);
        read(b, "b2_hz", sc.bands.b2_hz);
    }
    read(doc, "p_sat_max_w", sc.p_sat_max_w);
    read(doc, "p_ue_max_w", sc.p_ue_max_w);
    if (doc.contains("noise_variance_w") && !doc["noise_variance_w"].is_null())
    {
        double v = 0.0;
        read(doc, "noise_variance_w", v);
        sc.noise_variance_w = v;
    }
    if (doc.contains("antennas"))
    {
        const auto& a = doc["antennas"];
        reject_unknown(a, {"x", "y"}, "antennas");
        read(a, "x", sc.antennas_x);
        read(a, "y", sc.antennas_y);
    }
    if (doc.contains("element_spacing_m") && !doc["element_spacing_m"].is_null())
    {
        double v = 0.0;
        read(doc, "element_spacing_m", v);
        sc.element_spacing_m = v;
    }
    read(doc, "min_ue_separation_m", sc.min_ue_separation_m);
    if (doc.contains("ue_ue_band_convention"))
    {
        std::string conv;
        read(doc, "ue_ue_band_convention", conv);
        try
        {
            sc.ue_ue_convention = parse_ue_ue_convention(conv);
        }
        catch (const std::invalid_argument& e)
        {
            throw ConfigError(e.what());
        }
    }
    read(doc, "seed", sc.seed);
    cfg.base_seed = sc.seed;

    if (doc.contains("experiment"))
    {
        const auto& e = doc["experiment"];
        reject_unknown(e, {"drops", "base_seed", "modes", "output_dir"}, "experiment");
        read(e, "drops", cfg.drops);
        read(e, "base_seed", cfg.base_seed);
        if (e.contains("modes"))
        {
            std::string m;
            read(e, "modes", m);
            cfg.modes = parse_modes(m);
        }
        read(e, "output_dir", cfg.output_dir);
    }
    if (cfg.drops < 1)
        throw ConfigError("experiment.drops must be at least 1");

    try
    {
        validate(sc);
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError(e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string config_to_json(const ExperimentConfig& cfg)
{
    const ScenarioConfig& sc = cfg.scenario;
    nlohmann::ordered_json out;
    out["satellites"] = nlohmann::ordered_json::array();
    for (const auto& s : sc.satellites)
        out["satellites"].push_back({{"elevation_deg", s.elevation_deg}, {"azimuth_deg", s.azimuth_deg}});
    out["altitude_m"] = sc.altitude_m;
    out["ue_count"] = sc.ue_count;
    out["region_radius_m"] = sc.region_radius_m;
    out["region_center"] = {{"lat_deg", sc.region_lat_deg}, {"lon_deg", sc.region_lon_deg}};
    out["bands"] = {{"f1_hz", sc.bands.f1_hz}, {"f2_hz", sc.bands.f2_hz}, {"b1_hz", sc.bands.b1_hz},
                    {"b2_hz", sc.bands.b2_hz}};
    out["p_sat_max_w"] = sc.p_sat_max_w;
    out["p_ue_max_w"] = sc.p_ue_max_w;
    if (sc.noise_variance_w)
        out["noise_variance_w"] = *sc.noise_variance_w;
    out["antennas"] = {{"x", sc.antennas_x}, {"y", sc.antennas_y}};
    if (sc.element_spacing_m)
        out["element_spacing_m"] = *sc.element_spacing_m;
    out["min_ue_separation_m"] = sc.min_ue_separation_m;
    out["ue_ue_band_convention"] = to_string(sc.ue_ue_convention);
    out["seed"] = sc.seed;
    out["experiment"] = {{"drops", cfg.drops},
                         {"base_seed", cfg.base_seed},
                         {"modes", to_string(cfg.modes)},
                         {"output_dir", cfg.output_dir}};
    return out.dump(2);
}

} // namespace spinband
