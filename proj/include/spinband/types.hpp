#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinband
{

inline constexpr double speed_of_light = 299792458.0;

struct Vec3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

// The two FDD bands. Values index per-band storage.
enum class Band : std::size_t
{
    first = 0,
    second = 1,
};

inline constexpr std::array<Band, 2> both_bands = {Band::first, Band::second};

inline Band other_band(Band b) { return b == Band::first ? Band::second : Band::first; }

// Row-major 2-D table indexed (ue, satellite).
template <typename T>
class Grid
{
  public:
    Grid() = default;
    Grid(std::size_t rows, std::size_t cols, T init = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, init)
    {
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const std::vector<T>& values() const { return data_; }
    std::vector<T>& values() { return data_; }

    friend bool operator==(const Grid&, const Grid&) = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

// Pairwise link table indexed (k, j, k', j') for K ues and J satellites.
template <typename T>
class LinkTable
{
  public:
    LinkTable() = default;
    LinkTable(std::size_t ues, std::size_t sats, T init = T{})
        : ues_(ues), sats_(sats), data_(ues * sats * ues * sats, init)
    {
    }

    std::size_t ues() const { return ues_; }
    std::size_t sats() const { return sats_; }

    T& operator()(std::size_t k, std::size_t j, std::size_t k2, std::size_t j2)
    {
        return data_[index(k, j, k2, j2)];
    }
    const T& operator()(std::size_t k, std::size_t j, std::size_t k2, std::size_t j2) const
    {
        return data_[index(k, j, k2, j2)];
    }

    const std::vector<T>& values() const { return data_; }

    friend bool operator==(const LinkTable&, const LinkTable&) = default;

  private:
    std::size_t index(std::size_t k, std::size_t j, std::size_t k2, std::size_t j2) const
    {
        return ((k * sats_ + j) * ues_ + k2) * sats_ + j2;
    }

    std::size_t ues_ = 0;
    std::size_t sats_ = 0;
    std::vector<T> data_;
};

// Band-role assignment per satellite. A set bit means band 1 carries the
// downlink and band 2 the uplink; a cleared bit swaps the roles.
class SpinVector
{
  public:
    SpinVector() = default;
    explicit SpinVector(std::size_t sats) : bits_(sats, 0) {}
    explicit SpinVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits))
    {
        for (auto b : bits_)
            if (b > 1)
                throw std::invalid_argument("spin entries must be 0 or 1");
    }

    // Enumeration order: bit j of `code` is the spin of satellite j.
    static SpinVector from_code(std::uint64_t code, std::size_t sats)
    {
        SpinVector s(sats);
        for (std::size_t j = 0; j < sats; ++j)
            s.bits_[j] = static_cast<std::uint8_t>((code >> j) & 1u);
        return s;
    }

    std::size_t size() const { return bits_.size(); }
    std::uint8_t operator[](std::size_t j) const { return bits_.at(j); }
    void set(std::size_t j, std::uint8_t v)
    {
        if (v > 1)
            throw std::invalid_argument("spin entries must be 0 or 1");
        bits_.at(j) = v;
    }

    // Band used for the downlink of a satellite with this spin.
    Band downlink_band(std::size_t j) const { return (*this)[j] ? Band::first : Band::second; }
    Band uplink_band(std::size_t j) const { return (*this)[j] ? Band::second : Band::first; }

    SpinVector flipped() const
    {
        SpinVector s = *this;
        for (auto& b : s.bits_)
            b ^= 1u;
        return s;
    }

    // "0110" with satellite 0 first.
    std::string bits_string() const
    {
        std::string out;
        for (auto b : bits_)
            out.push_back(b ? '1' : '0');
        return out;
    }

    const std::vector<std::uint8_t>& bits() const { return bits_; }

    friend bool operator==(const SpinVector&, const SpinVector&) = default;
    friend auto operator<=>(const SpinVector&, const SpinVector&) = default;

  private:
    std::vector<std::uint8_t> bits_;
};

} // namespace spinband
