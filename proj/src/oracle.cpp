#include "spinband/oracle.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace spinband
{
namespace
{

// Maximise sum a_i z_i - q_i z_i^2 subject to z >= 0, z_i <= cap, sum z^2 <= budget.
double best_on_ball(const std::vector<double>& a, const std::vector<double>& q, double cap, double budget,
                    std::vector<double>& z)
{
    const std::size_t n = a.size();
    z.assign(n, 0.0);
    auto at = [&](double lam) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            const double denom = 2.0 * (q[i] + lam);
            double v = a[i] <= 0.0 ? 0.0 : (denom > 0.0 ? a[i] / denom : cap);
            v = std::min(v, cap);
            z[i] = v;
            s += v * v;
        }
        return s;
    };
    if (at(0.0) > budget)
    {
        double lo = 0.0, hi = 1.0;
        while (at(hi) > budget)
            hi *= 2.0;
        for (int it = 0; it < 200 && hi - lo > 1e-18 * hi; ++it)
        {
            const double mid = 0.5 * (lo + hi);
            (at(mid) > budget ? lo : hi) = mid;
        }
        at(hi);
    }
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        f += a[i] * z[i] - q[i] * z[i] * z[i];
    return f;
}

std::vector<Complex> conj_unit(std::span<const Complex> h)
{
    double n2 = 0.0;
    for (const auto& x : h)
        n2 += std::norm(x);
    const double n = std::sqrt(n2);
    std::vector<Complex> w(h.size());
    for (std::size_t i = 0; i < h.size(); ++i)
        w[i] = std::conj(h[i]) / n;
    return w;
}

double gain(std::span<const Complex> a, const std::vector<Complex>& b)
{
    Complex s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return std::norm(s);
}

Band dl_band(const SpinVector& r, std::size_t j) { return r[j] ? Band::first : Band::second; }
Band ul_band(const SpinVector& r, std::size_t j) { return r[j] ? Band::second : Band::first; }

Band ue_ue_band(const SpinVector& r, std::size_t j, std::size_t j2, UeUeBandConvention c)
{
    if (c == UeUeBandConvention::physical)
        return dl_band(r, j);
    return r[j2] ? Band::first : Band::second;
}

// One served direction of one UE.
struct Link
{
    bool dl;
    std::size_t k, j;
};

// Cross-gain from transmitting link b into receiving link a (0 when b cannot
// reach a); a == b gives the desired-signal gain.
double cross_gain(const ChannelSet& ch, const SpinVector& r, UeUeBandConvention conv, const Link& a,
                  const Link& b)
{
    const bool same_spin = r[a.j] == r[b.j];
    if (a.dl)
    {
        if (b.dl)
        {
            if (!same_spin || (b.k == a.k && b.j != a.j))
                return 0.0;
            const auto w = conj_unit(ch.h(b.k, b.j, dl_band(r, b.j)));
            return gain(ch.h(a.k, b.j, dl_band(r, b.j)), w);
        }
        if (same_spin || b.k == a.k || b.j == a.j)
            return 0.0;
        const double g = ch.g(b.k, a.k, ue_ue_band(r, a.j, b.j, conv));
        return g * g;
    }
    if (b.dl || !same_spin || (b.k == a.k && b.j != a.j))
        return 0.0;
    const auto v = conj_unit(ch.h(a.k, a.j, ul_band(r, a.j)));
    return gain(ch.h(b.k, a.j, ul_band(r, b.j)), v);
}

} // namespace

OracleP4Result oracle_p4(const SubproblemP4& p4)
{
    const std::size_t K = p4.ues;
    const std::size_t J = p4.sats;
    if (K > 3 || J > 2 || K == 0 || J == 0)
        throw OracleTooLarge("oracle_p4: needs 1 <= K <= 3 and 1 <= J <= 2");

    const std::size_t per_ue = (J + 1) * (J + 1);
    std::size_t total = 1;
    for (std::size_t k = 0; k < K; ++k)
        total *= per_ue;

    const double ul_cap = std::min(p4.big_m, p4.ue_amp_max);
    const double dl_cap = std::min(p4.big_m, std::sqrt(p4.p_sat_max));

    OracleP4Result best;
    best.objective = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> dsel(K), usel(K); // J means "none"
    for (std::size_t code = 0; code < total; ++code)
    {
        std::size_t c = code;
        bool ok = true;
        for (std::size_t k = 0; k < K; ++k)
        {
            dsel[k] = c % (J + 1);
            c /= J + 1;
            usel[k] = c % (J + 1);
            c /= J + 1;
            if (dsel[k] < J && usel[k] < J && p4.spin[dsel[k]] != p4.spin[usel[k]])
                ok = false;
        }
        if (!ok)
            continue;
        ++best.patterns;

        Grid<double> zd(K, J), zu(K, J);
        double f = p4.constant;
        for (std::size_t k = 0; k < K; ++k)
            if (usel[k] < J)
            {
                const double a = p4.lin_ul(k, usel[k]);
                const double q = p4.quad_ul(k, usel[k]);
                double z = a <= 0.0 ? 0.0 : (q > 0.0 ? std::min(a / (2.0 * q), ul_cap) : ul_cap);
                zu(k, usel[k]) = z;
                f += a * z - q * z * z;
            }
        for (std::size_t j = 0; j < J; ++j)
        {
            std::vector<double> a, q, z;
            std::vector<std::size_t> who;
            for (std::size_t k = 0; k < K; ++k)
                if (dsel[k] == j)
                {
                    a.push_back(p4.lin_dl(k, j));
                    q.push_back(p4.quad_dl(k, j));
                    who.push_back(k);
                }
            if (who.empty())
                continue;
            f += best_on_ball(a, q, dl_cap, p4.p_sat_max, z);
            for (std::size_t i = 0; i < who.size(); ++i)
                zd(who[i], j) = z[i];
        }
        if (f > best.objective)
        {
            best.objective = f;
            best.d = Grid<std::uint8_t>(K, J, 0);
            best.u = Grid<std::uint8_t>(K, J, 0);
            for (std::size_t k = 0; k < K; ++k)
            {
                if (dsel[k] < J)
                    best.d(k, dsel[k]) = 1;
                if (usel[k] < J)
                    best.u(k, usel[k]) = 1;
            }
            best.z_dl = zd;
            best.z_ul = zu;
        }
    }
    return best;
}

LinkSinrs oracle_sinr(const ChannelSet& ch, const SpinVector& r, const Allocation& alloc, double sigma2,
                      UeUeBandConvention conv)
{
    const std::size_t K = ch.ues();
    const std::size_t J = ch.sats();
    LinkSinrs out{Grid<double>(K, J), Grid<double>(K, J)};
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < J; ++j)
        {
            const Link dl{true, k, j};
            const Link ul{false, k, j};
            double sig_dl = alloc.d(k, j) * alloc.p_dl[k] * cross_gain(ch, r, conv, dl, dl);
            double sig_ul = alloc.u(k, j) * alloc.p_ul[k] * cross_gain(ch, r, conv, ul, ul);
            double i_dl = 0.0, i_ul = 0.0;
            for (std::size_t k2 = 0; k2 < K; ++k2)
            {
                if (k2 == k)
                    continue;
                for (std::size_t j2 = 0; j2 < J; ++j2)
                {
                    const Link odl{true, k2, j2};
                    const Link oul{false, k2, j2};
                    if (alloc.d(k2, j2))
                        i_dl += alloc.p_dl[k2] * cross_gain(ch, r, conv, dl, odl);
                    if (alloc.u(k2, j2))
                    {
                        i_dl += alloc.p_ul[k2] * cross_gain(ch, r, conv, dl, oul);
                        i_ul += alloc.p_ul[k2] * cross_gain(ch, r, conv, ul, oul);
                    }
                }
            }
            out.dl(k, j) = sig_dl / (sigma2 + i_dl);
            out.ul(k, j) = sig_ul / (sigma2 + i_ul);
        }
    return out;
}

GlobalBracket oracle_global_f0(const Scenario& scenario, const ChannelSet& ch, int levels)
{
    const std::size_t K = scenario.ue_count();
    const std::size_t J = scenario.sat_count();
    if (K > 2 || J > 2 || K == 0 || J == 0)
        throw OracleTooLarge("oracle_global_f0: needs K <= 2 and J <= 2");
    if (levels < 1)
        throw std::invalid_argument("oracle_global_f0: at least one power level");
    const double sigma2 = scenario.noise_variance;
    const auto conv = scenario.ue_ue_convention;

    GlobalBracket best;
    best.best_f0 = -1.0;
    const std::size_t per_ue = (J + 1) * (J + 1);
    const std::size_t patterns = K == 1 ? per_ue : per_ue * per_ue;

    for (std::uint64_t code = 0; code < (1u << J); ++code)
    {
        const SpinVector r = SpinVector::from_code(code, J);
        for (std::size_t pat = 0; pat < patterns; ++pat)
        {
            std::vector<Link> links;
            std::size_t c = pat;
            bool ok = true;
            for (std::size_t k = 0; k < K; ++k)
            {
                const std::size_t ds = c % (J + 1);
                c /= J + 1;
                const std::size_t us = c % (J + 1);
                c /= J + 1;
                if (ds < J && us < J && r[ds] != r[us])
                    ok = false;
                if (ds < J)
                    links.push_back({true, k, ds});
                if (us < J)
                    links.push_back({false, k, us});
            }
            if (!ok)
                continue;
            const std::size_t n = links.size();
            std::vector<double> G(n * n);
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b)
                    G[a * n + b] = (a != b && links[a].k == links[b].k) ? 0.0
                                                                        : cross_gain(ch, r, conv, links[a], links[b]);

            std::vector<double> p(n);
            std::vector<int> idx(n, 1);
            std::function<void(std::size_t)> rec = [&](std::size_t i) {
                if (i < n)
                {
                    const double pmax = links[i].dl ? scenario.p_sat_max : scenario.p_ue_max;
                    for (int l = 1; l <= levels; ++l)
                    {
                        idx[i] = l;
                        p[i] = pmax * l / levels;
                        rec(i + 1);
                    }
                    return;
                }
                for (std::size_t j = 0; j < J; ++j)
                {
                    double load = 0.0;
                    for (std::size_t a = 0; a < n; ++a)
                        if (links[a].dl && links[a].j == j)
                            load += p[a];
                    if (load > scenario.p_sat_max * (1.0 + 1e-12))
                        return;
                }
                double f = 0.0;
                for (std::size_t a = 0; a < n; ++a)
                {
                    double interf = sigma2;
                    for (std::size_t b = 0; b < n; ++b)
                        if (b != a)
                            interf += p[b] * G[a * n + b];
                    f += std::log2(1.0 + p[a] * G[a * n + a] / interf);
                }
                ++best.evaluated;
                if (f > best.best_f0)
                {
                    best.best_f0 = f;
                    best.spin = r;
                    best.alloc = Allocation(K, J);
                    for (std::size_t a = 0; a < n; ++a)
                    {
                        const auto& L = links[a];
                        if (L.dl)
                        {
                            best.alloc.d(L.k, L.j) = 1;
                            best.alloc.p_dl[L.k] = p[a];
                        }
                        else
                        {
                            best.alloc.u(L.k, L.j) = 1;
                            best.alloc.p_ul[L.k] = p[a];
                        }
                    }
                }
            };
            rec(0);
        }
    }
    return best;
}

} // namespace spinband
