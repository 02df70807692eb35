#pragma once

// Shared fixtures and test-only reference solvers.

#include "spinband/config.hpp"
#include "spinband/fp_solver.hpp"
#include "spinband/miqcqp.hpp"
#include "spinband/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace testing
{

using namespace spinband;

inline double uniform(std::mt19937_64& rng, double a, double b)
{
    return std::uniform_real_distribution<double>(a, b)(rng);
}

inline std::size_t pick(std::mt19937_64& rng, std::size_t n)
{
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// Equal elevations with evenly spread azimuths, the default arrangement.
inline ScenarioConfig paper_config(std::size_t sats, int ues = 10)
{
    ScenarioConfig c;
    for (std::size_t j = 0; j < sats; ++j)
        c.satellites.push_back({60.0, 360.0 * static_cast<double>(j) / static_cast<double>(sats)});
    c.ue_count = ues;
    return c;
}

// Distinct elevations so that per-satellite gains differ noticeably.
inline ScenarioConfig varied_config(std::size_t sats, int ues, double radius = 100.0)
{
    ScenarioConfig c;
    const double el[] = {80.0, 55.0, 40.0, 65.0};
    const double az[] = {0.0, 100.0, 220.0, 300.0};
    for (std::size_t j = 0; j < sats; ++j)
        c.satellites.push_back({el[j % 4], az[j % 4]});
    c.ue_count = ues;
    c.region_radius_m = radius;
    return c;
}

// spins("10") is satellite 0 up, satellite 1 down.
inline SpinVector spins(const std::string& bits)
{
    std::vector<std::uint8_t> v;
    for (char c : bits)
        v.push_back(c == '1' ? 1 : 0);
    return SpinVector(v);
}

inline SpinVector random_spin(std::mt19937_64& rng, std::size_t sats)
{
    return SpinVector::from_code(rng(), sats);
}

// Feasible allocation with random associations and powers.
inline Allocation random_feasible_alloc(const Scenario& sc, const SpinVector& spin, std::mt19937_64& rng)
{
    const std::size_t K = sc.ue_count();
    const std::size_t J = sc.sat_count();
    Allocation a(K, J);
    for (std::size_t k = 0; k < K; ++k)
    {
        const std::size_t ds = pick(rng, J + 1);
        if (ds < J)
        {
            a.d(k, ds) = 1;
            a.p_dl[k] = uniform(rng, 0.05, 1.0) * sc.p_sat_max;
        }
        std::vector<std::size_t> ok;
        for (std::size_t j = 0; j < J; ++j)
            if (ds == J || spin[j] == spin[ds])
                ok.push_back(j);
        const std::size_t us = pick(rng, ok.size() + 1);
        if (us < ok.size())
        {
            a.u(k, ok[us]) = 1;
            a.p_ul[k] = uniform(rng, 0.05, 1.0) * sc.p_ue_max;
        }
    }
    for (std::size_t j = 0; j < J; ++j)
    {
        double load = 0.0;
        for (std::size_t k = 0; k < K; ++k)
            load += a.d(k, j) * a.p_dl[k];
        if (load > sc.p_sat_max)
            for (std::size_t k = 0; k < K; ++k)
                if (a.d(k, j))
                    a.p_dl[k] *= sc.p_sat_max / load;
    }
    return a;
}

// Auxiliary variables from an every-link-active allocation, so every
// coefficient of the resulting subproblem is positive.
inline AuxState dense_aux(const GainTables& gains, const Scenario& sc, std::mt19937_64& rng)
{
    Allocation a(gains.ues(), gains.sats());
    for (std::size_t k = 0; k < gains.ues(); ++k)
    {
        for (std::size_t j = 0; j < gains.sats(); ++j)
            a.d(k, j) = a.u(k, j) = 1;
        a.p_dl[k] = uniform(rng, 0.01, 1.0) * sc.p_sat_max / static_cast<double>(gains.ues());
        a.p_ul[k] = uniform(rng, 0.01, 1.0) * sc.p_ue_max;
    }
    AuxState aux = update_chi(gains, a, sc.noise_variance);
    update_xi(gains, a, sc.noise_variance, aux);
    return aux;
}

// Synthetic subproblem with O(1) coefficients.
inline SubproblemP4 random_p4(std::size_t K, std::size_t J, std::mt19937_64& rng, double p_sat = 20.0,
                              double p_ue = 2.0)
{
    SubproblemP4 p;
    p.ues = K;
    p.sats = J;
    p.spin = random_spin(rng, J);
    p.p_sat_max = p_sat;
    p.ue_amp_max = std::sqrt(p_ue);
    p.big_m = std::ceil(std::max({std::sqrt(p_sat), std::sqrt(p_ue), 1.0}));
    p.lin_dl = Grid<double>(K, J);
    p.lin_ul = Grid<double>(K, J);
    p.quad_dl = Grid<double>(K, J);
    p.quad_ul = Grid<double>(K, J);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < J; ++j)
        {
            p.lin_dl(k, j) = uniform(rng, -0.2, 3.0);
            p.lin_ul(k, j) = uniform(rng, -0.2, 3.0);
            p.quad_dl(k, j) = uniform(rng, 0.0, 0.6);
            p.quad_ul(k, j) = uniform(rng, 0.0, 0.6);
        }
    p.constant = uniform(rng, -1.0, 1.0);
    return p;
}

// Continuous relaxation of the lifted formulation in (d, u, t, z) with every
// big-M row kept as printed, solved by a first-order splitting method.
struct LiftedRelaxation
{
    struct Half
    {
        std::vector<double> a;
        double b;
    };
    std::size_t n = 0;
    std::vector<double> lo, hi, lin, quad;
    std::vector<Half> halves;
    std::vector<std::vector<std::size_t>> balls;
    double radius_sq = 0.0;

    double objective(const std::vector<double>& x) const
    {
        double f = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            f += lin[i] * x[i] - quad[i] * x[i] * x[i];
        return f;
    }

    // Consensus ADMM: one copy of x per constraint set, each projected in
    // closed form, the x-update solved coordinate-wise.
    double solve(int iterations, double rho = 1.0) const
    {
        const std::size_t sets = 1 + halves.size() + balls.size();
        std::vector<double> x(n, 0.0);
        std::vector<std::vector<double>> y(sets, x), w(sets, x);
        auto project = [&](std::size_t s, std::vector<double>& v) {
            if (s == 0)
            {
                for (std::size_t i = 0; i < n; ++i)
                    v[i] = std::clamp(v[i], lo[i], hi[i]);
                return;
            }
            if (s <= halves.size())
            {
                const Half& h = halves[s - 1];
                double ax = 0.0, aa = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                {
                    ax += h.a[i] * v[i];
                    aa += h.a[i] * h.a[i];
                }
                if (ax > h.b)
                    for (std::size_t i = 0; i < n; ++i)
                        v[i] -= (ax - h.b) / aa * h.a[i];
                return;
            }
            const auto& b = balls[s - 1 - halves.size()];
            double s2 = 0.0;
            for (auto i : b)
                s2 += v[i] * v[i];
            if (s2 > radius_sq)
                for (auto i : b)
                    v[i] *= std::sqrt(radius_sq / s2);
        };
        for (int it = 0; it < iterations; ++it)
        {
            for (std::size_t i = 0; i < n; ++i)
            {
                double acc = 0.0;
                for (std::size_t s = 0; s < sets; ++s)
                    acc += y[s][i] - w[s][i];
                x[i] = (lin[i] + rho * acc) / (2.0 * quad[i] + rho * static_cast<double>(sets));
            }
            for (std::size_t s = 0; s < sets; ++s)
            {
                std::vector<double> v(n);
                for (std::size_t i = 0; i < n; ++i)
                    v[i] = x[i] + w[s][i];
                project(s, v);
                y[s] = v;
                for (std::size_t i = 0; i < n; ++i)
                    w[s][i] += x[i] - y[s][i];
            }
        }
        return objective(x);
    }
};

inline LiftedRelaxation lift(const SubproblemP4& p)
{
    const std::size_t K = p.ues, J = p.sats;
    const double M = p.big_m;
    LiftedRelaxation r;
    // layout: d, u, t_dl, t_ul, z_dl, z_ul
    const std::size_t D = 0, U = K * J, TD = 2 * K * J, TU = TD + K, ZD = TU + K, ZU = ZD + K * J;
    r.n = ZU + K * J;
    r.lo.assign(r.n, 0.0);
    r.hi.assign(r.n, 1.0);
    r.lin.assign(r.n, 0.0);
    r.quad.assign(r.n, 0.0);
    for (std::size_t k = 0; k < K; ++k)
    {
        r.hi[TD + k] = M;
        r.hi[TU + k] = p.ue_amp_max;
        for (std::size_t j = 0; j < J; ++j)
        {
            r.hi[ZD + k * J + j] = M;
            r.hi[ZU + k * J + j] = M;
            r.lin[ZD + k * J + j] = p.lin_dl(k, j);
            r.lin[ZU + k * J + j] = p.lin_ul(k, j);
            r.quad[ZD + k * J + j] = p.quad_dl(k, j);
            r.quad[ZU + k * J + j] = p.quad_ul(k, j);
        }
    }
    auto row = [&] { return LiftedRelaxation::Half{std::vector<double>(r.n, 0.0), 0.0}; };
    for (std::size_t k = 0; k < K; ++k)
    {
        for (int dir = 0; dir < 2; ++dir)
        {
            const std::size_t B = dir == 0 ? D : U, T = dir == 0 ? TD : TU, Z = dir == 0 ? ZD : ZU;
            auto sum = row();
            for (std::size_t j = 0; j < J; ++j)
            {
                const std::size_t b = B + k * J + j, z = Z + k * J + j;
                sum.a[b] = 1.0;
                auto h1 = row(); // z <= t
                h1.a[z] = 1.0;
                h1.a[T + k] = -1.0;
                auto h2 = row(); // t - M(1-b) <= z
                h2.a[T + k] = 1.0;
                h2.a[b] = M;
                h2.a[z] = -1.0;
                h2.b = M;
                auto h3 = row(); // z <= M b
                h3.a[z] = 1.0;
                h3.a[b] = -M;
                r.halves.push_back(h1);
                r.halves.push_back(h2);
                r.halves.push_back(h3);
            }
            sum.b = 1.0;
            r.halves.push_back(sum);
        }
        for (int sign : {1, -1})
        {
            auto h = row();
            for (std::size_t j = 0; j < J; ++j)
            {
                h.a[D + k * J + j] = sign * p.spin[j] + M;
                h.a[U + k * J + j] = -sign * p.spin[j] + M;
            }
            h.b = 2.0 * M;
            r.halves.push_back(h);
        }
    }
    for (std::size_t j = 0; j < J; ++j)
    {
        std::vector<std::size_t> b;
        for (std::size_t k = 0; k < K; ++k)
            b.push_back(ZD + k * J + j);
        r.balls.push_back(b);
    }
    r.radius_sq = p.p_sat_max;
    return r;
}

// Relative closeness with an absolute floor of 1 on the scale.
inline bool close_rel(double a, double b, double tol)
{
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace testing
