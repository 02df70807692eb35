#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include "spinband/channel.hpp"

#include <json.hpp>

#include <cmath>
#include <complex>
#include <numbers>

using namespace spinband;

namespace
{

Scenario two_ues(double separation)
{
    Scenario sc;
    sc.satellites.push_back({{0.0, 0.0, 5e5}, 4, 4, speed_of_light / 2.4e9 / 2.0});
    sc.ues.push_back({{0.0, 0.0, 0.0}});
    sc.ues.push_back({{separation, 0.0, 0.0}});
    return sc;
}

} // namespace

TEST_CASE("path loss closed form")
{
    // (c / (4 pi d f))^2 evaluated by hand: 2.99792458e8 / (4 pi 1.2e15).
    const double a = 2.99792458e8 / (4.0 * std::numbers::pi * 5e5 * 2.4e9);
    CHECK(path_loss(5e5, 2.4e9) == doctest::Approx(a * a).epsilon(1e-14));
    CHECK(path_loss(5e5, 2.4e9) == doctest::Approx(3.952e-16).epsilon(1e-3));
    CHECK(10.0 * std::log10(path_loss(5e5, 2.4e9)) == doctest::Approx(-154.0).epsilon(1e-3));
    CHECK(path_loss(1e6, 2.4e9) * 4.0 == doctest::Approx(path_loss(5e5, 2.4e9)).epsilon(1e-15));
    CHECK(path_loss(5e5, 1.9e9) / path_loss(5e5, 2.4e9) == doctest::Approx(1.5955678670360109).epsilon(1e-12));
    CHECK_THROWS_AS(path_loss(0.0, 2.4e9), std::invalid_argument);
}

TEST_CASE("array response")
{
    const auto upa = ArrayGeometry::upa(16, 16, 0.0625);
    SUBCASE("nadir gives all ones")
    {
        for (const auto& x : array_response(upa, 2.4e9, 0.3, std::numbers::pi / 2))
            CHECK(std::abs(x - Complex(1.0, 0.0)) < 1e-12);
    }
    SUBCASE("unit modulus everywhere")
    {
        std::mt19937_64 rng(1);
        for (int t = 0; t < 20; ++t)
            for (const auto& x : array_response(upa, testing::uniform(rng, 1e9, 3e9), testing::uniform(rng, -3, 3),
                                                testing::uniform(rng, -1.5, 1.5)))
                CHECK(std::abs(std::abs(x) - 1.0) < 1e-12);
    }
    SUBCASE("two elements half a wavelength apart")
    {
        const double f = 2.4e9;
        const auto b = array_response(ArrayGeometry::upa(2, 1, speed_of_light / (2.0 * f)), f, 0.0, 0.0);
        REQUIRE(b.size() == 2);
        CHECK(std::abs(b[0] - Complex(1.0, 0.0)) < 1e-12);
        CHECK(std::abs(b[1] - Complex(-1.0, 0.0)) < 1e-12);
    }
}

TEST_CASE("satellite to UE channel")
{
    const auto sc = build_scenario(testing::varied_config(3, 6), 5);
    for (std::size_t k = 0; k < sc.ue_count(); ++k)
        for (std::size_t j = 0; j < sc.sat_count(); ++j)
            for (Band b : both_bands)
            {
                const auto h = sat_ue_channel(sc, k, j, b);
                const double beta = path_loss(geometry_of(sc, k, j).distance, sc.bands.frequency(b));
                CHECK(squared_norm(h) == doctest::Approx(beta * 256.0).epsilon(1e-12));
            }

    auto nadir = two_ues(50.0);
    const auto h = sat_ue_channel(nadir, 0, 0, Band::first);
    const double amp = std::sqrt(path_loss(5e5, 2.4e9));
    for (const auto& x : h)
        CHECK(std::abs(x - Complex(amp, 0.0)) < 1e-12 * amp);

    nadir.ues[1].position = nadir.ues[0].position;
    for (Band b : both_bands)
    {
        const auto h0 = sat_ue_channel(nadir, 0, 0, b);
        const auto h1 = sat_ue_channel(nadir, 1, 0, b);
        CHECK(h0 == h1);
    }
}

TEST_CASE("UE to UE channel")
{
    const auto sc = two_ues(100.0);
    CHECK(ue_ue_channel(sc, 0, 1, Band::first) == doctest::Approx(9.947e-5).epsilon(1e-3));
    CHECK(ue_ue_channel(sc, 0, 1, Band::first) ==
          doctest::Approx(2.99792458e8 / (4.0 * std::numbers::pi * 100.0 * 2.4e9)).epsilon(1e-14));
    CHECK_THROWS_AS(ue_ue_channel(sc, 0, 0, Band::first), std::invalid_argument);

    const auto big = build_scenario(testing::paper_config(2), 9);
    const auto ch = synthesize_channels(big);
    double worst = 0.0;
    for (std::size_t k = 0; k < big.ue_count(); ++k)
        for (std::size_t k2 = 0; k2 < big.ue_count(); ++k2)
            for (Band b : both_bands)
                worst = std::max(worst, std::abs(ch.g(k, k2, b) - ch.g(k2, k, b)));
    CHECK(worst == 0.0);
}

TEST_CASE("MRT and MRC beamformers")
{
    std::vector<Complex> e(8, Complex(0.0, 0.0));
    e[0] = 1.0;
    const auto w0 = mrt_precoder(e);
    CHECK(w0 == e);

    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss;
    for (int t = 0; t < 20; ++t)
    {
        CVector h(64);
        for (auto& x : h)
            x = {gauss(rng), gauss(rng)};
        const auto w = mrt_precoder(h);
        CHECK(squared_norm(w) == doctest::Approx(1.0).epsilon(1e-14));
        const Complex hw = dot_t(h, w);
        CHECK(std::abs(hw.imag()) < 1e-12);
        CHECK(hw.real() == doctest::Approx(std::sqrt(squared_norm(h))).epsilon(1e-13));
        CHECK(mrc_combiner(h) == w);
        for (int r = 0; r < 50; ++r)
        {
            CVector u(64);
            for (auto& x : u)
                x = {gauss(rng), gauss(rng)};
            const double n = std::sqrt(squared_norm(u));
            for (auto& x : u)
                x /= n;
            CHECK(std::abs(dot_t(h, u)) <= std::abs(hw) * (1.0 + 1e-14));
        }
    }
    CHECK_THROWS_AS(mrt_precoder(CVector(4)), std::invalid_argument);
}

TEST_CASE("channel set storage and band swap")
{
    const auto sc = build_scenario(testing::varied_config(2, 3), 2);
    const auto ch = synthesize_channels(sc);
    CHECK(ch.antennas() == 256);
    const auto sw = ch.with_bands_swapped();
    for (std::size_t k = 0; k < 3; ++k)
    {
        for (std::size_t j = 0; j < 2; ++j)
            for (Band b : both_bands)
            {
                const auto a = ch.h(k, j, b);
                const auto c = sw.h(k, j, other_band(b));
                CHECK(std::equal(a.begin(), a.end(), c.begin()));
            }
        for (std::size_t k2 = 0; k2 < 3; ++k2)
            CHECK(ch.g(k, k2, Band::first) == sw.g(k, k2, Band::second));
    }
    CHECK_THROWS_AS(ch.h(3, 0, Band::first), std::out_of_range);
}

TEST_CASE("long-term scale multiplies beta")
{
    const auto sc = build_scenario(testing::varied_config(2, 2), 4);
    const auto base = synthesize_channels(sc);
    const auto scaled = synthesize_channels(sc, [](std::size_t k, std::size_t j, Band) { return 0.5 + k + j; });
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(squared_norm(scaled.h(k, j, Band::second)) ==
                  doctest::Approx((0.5 + k + j) * squared_norm(base.h(k, j, Band::second))).epsilon(1e-13));
}

TEST_CASE("channel dump is valid JSON")
{
    const auto sc = build_scenario(testing::varied_config(2, 3), 2);
    const auto j = nlohmann::json::parse(channel_dump_json(synthesize_channels(sc)));
    CHECK(j["sat_ue"].size() == 3 * 2 * 2);
    CHECK(j["ue_ue"].size() == 3 * 2);
}
