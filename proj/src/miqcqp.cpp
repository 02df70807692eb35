#include "spinband/miqcqp.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace spinband
{
namespace
{

constexpr double inv_ln2 = 1.0 / std::numbers::ln2;
constexpr std::size_t none = std::numeric_limits<std::size_t>::max();

double dl_amp_bound(const SubproblemP4& p4) { return std::min(p4.big_m, std::sqrt(p4.p_sat_max)); }
double ul_amp_bound(const SubproblemP4& p4) { return std::min(p4.big_m, p4.ue_amp_max); }

// Index of the binary fixed to one in a row, `none` if there is none, and
// `infeasible` set when there are several.
std::size_t fixed_one(const Grid<BinaryFix>& fix, std::size_t k, bool& infeasible)
{
    std::size_t found = none;
    for (std::size_t j = 0; j < fix.cols(); ++j)
        if (fix(k, j) == BinaryFix::one)
        {
            if (found != none)
                infeasible = true;
            found = j;
        }
    return found;
}

// Left-hand sides of the two FDD linking rows minus their right-hand side.
std::pair<double, double> linking_excess(const SubproblemP4& p4, const Grid<double>& d, const Grid<double>& u,
                                         std::size_t k)
{
    double d1 = 0.0, dt = 0.0, u1 = 0.0, ut = 0.0;
    for (std::size_t j = 0; j < p4.sats; ++j)
    {
        d1 += d(k, j) * p4.spin[j];
        u1 += u(k, j) * p4.spin[j];
        dt += d(k, j);
        ut += u(k, j);
    }
    const double m = p4.big_m;
    const double slack = m * (2.0 - dt - ut);
    return {(d1 - u1) - slack, (u1 - d1) - slack};
}

struct Candidate
{
    SubproblemSolution sol;
    bool valid = false;
};

// Integral point from chosen associations and amplitudes. Amplitudes off the
// association are zeroed, the rest clipped to their bounds and scaled into
// the satellite budgets; t is read back from z so that z = t * b exactly.
SubproblemSolution assemble(const SubproblemP4& p4, const Grid<std::uint8_t>& d, const Grid<std::uint8_t>& u,
                            const Grid<double>& z_dl_in, const Grid<double>& z_ul_in)
{
    const std::size_t K = p4.ues;
    const std::size_t J = p4.sats;
    SubproblemSolution s;
    s.d = d;
    s.u = u;
    s.z_dl = Grid<double>(K, J);
    s.z_ul = Grid<double>(K, J);
    s.t_dl.assign(K, 0.0);
    s.t_ul.assign(K, 0.0);
    const double ub_dl = dl_amp_bound(p4);
    const double ub_ul = ul_amp_bound(p4);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < J; ++j)
        {
            if (d(k, j))
                s.z_dl(k, j) = std::clamp(z_dl_in(k, j), 0.0, ub_dl);
            if (u(k, j))
                s.z_ul(k, j) = std::clamp(z_ul_in(k, j), 0.0, ub_ul);
        }
    for (std::size_t j = 0; j < J; ++j)
    {
        double load = 0.0;
        for (std::size_t k = 0; k < K; ++k)
            load += s.z_dl(k, j) * s.z_dl(k, j);
        if (load > p4.p_sat_max)
        {
            // Scale slightly inside so the budget holds after rounding.
            const double f = std::sqrt(p4.p_sat_max / load) * (1.0 - 1e-15);
            for (std::size_t k = 0; k < K; ++k)
                s.z_dl(k, j) *= f;
        }
    }
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < J; ++j)
        {
            if (d(k, j))
                s.t_dl[k] = s.z_dl(k, j);
            if (u(k, j))
                s.t_ul[k] = s.z_ul(k, j);
        }
    s.objective = p4.objective(s.z_dl, s.z_ul);
    return s;
}

struct Node
{
    NodeFixings fix;
    double parent_bound = std::numeric_limits<double>::infinity();
    std::size_t id = 0;
};

struct NodeOrder
{
    bool operator()(const Node& a, const Node& b) const
    {
        if (a.parent_bound != b.parent_bound)
            return a.parent_bound < b.parent_bound;
        return a.id > b.id;
    }
};

} // namespace

double SubproblemP4::objective(const Grid<double>& z_dl, const Grid<double>& z_ul) const
{
    double f = constant;
    for (std::size_t k = 0; k < ues; ++k)
        for (std::size_t j = 0; j < sats; ++j)
        {
            const double a = z_dl(k, j);
            const double b = z_ul(k, j);
            f += lin_dl(k, j) * a - quad_dl(k, j) * a * a + lin_ul(k, j) * b - quad_ul(k, j) * b * b;
        }
    return f;
}

double big_m_value(const Scenario& scenario)
{
    return std::ceil(std::max({std::sqrt(scenario.p_sat_max), std::sqrt(scenario.p_ue_max), 1.0}));
}

SubproblemP4 build_p4(const GainTables& gains, const SpinVector& spin, const AuxState& aux,
                      const Scenario& scenario, double big_m)
{
    const std::size_t K = gains.ues();
    const std::size_t J = gains.sats();
    if (K != scenario.ue_count() || J != scenario.sat_count() || spin.size() != J)
        throw std::invalid_argument("build_p4: inconsistent dimensions");
    if (!(spin == gains.spin))
        throw std::invalid_argument("build_p4: gain tables were built for another spin vector");
    for (const auto* g : {&aux.chi_dl, &aux.chi_ul, &aux.xi_dl, &aux.xi_ul})
        if (g->rows() != K || g->cols() != J)
            throw std::invalid_argument("build_p4: auxiliary state dimensions do not match");
    if (big_m < big_m_value(scenario))
        throw std::invalid_argument("build_p4: big-M below the required value");

    const double sigma2 = scenario.noise_variance;
    SubproblemP4 p;
    p.ues = K;
    p.sats = J;
    p.spin = spin;
    p.big_m = big_m;
    p.p_sat_max = scenario.p_sat_max;
    p.ue_amp_max = std::sqrt(scenario.p_ue_max);
    p.lin_dl = Grid<double>(K, J);
    p.lin_ul = Grid<double>(K, J);
    p.quad_dl = Grid<double>(K, J);
    p.quad_ul = Grid<double>(K, J);

    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < J; ++j)
        {
            const double cd = aux.chi_dl(k, j);
            const double cu = aux.chi_ul(k, j);
            const double xd = aux.xi_dl(k, j);
            const double xu = aux.xi_ul(k, j);
            p.constant += std::log2(1.0 + cd) + std::log2(1.0 + cu) -
                          (cd + cu + (xd * xd + xu * xu) * sigma2) * inv_ln2;
            p.lin_dl(k, j) = 2.0 * xd * std::sqrt(1.0 + cd) * std::sqrt(gains.dl_sig(k, j)) * inv_ln2;
            p.lin_ul(k, j) = 2.0 * xu * std::sqrt(1.0 + cu) * std::sqrt(gains.ul_sig(k, j)) * inv_ln2;

            // Interference this link's power causes, weighted by the victims' xi^2.
            double qd = 0.0;
            double qu = 0.0;
            for (std::size_t k2 = 0; k2 < K; ++k2)
                for (std::size_t j2 = 0; j2 < J; ++j2)
                {
                    const double wd = aux.xi_dl(k2, j2) * aux.xi_dl(k2, j2);
                    const double wu = aux.xi_ul(k2, j2) * aux.xi_ul(k2, j2);
                    qd += wd * gains.dl_xint(k2, j2, k, j);
                    qu += wu * gains.ul_xint(k2, j2, k, j);
                    if (k2 != k && j2 != j)
                        qu += wd * gains.uu(k2, j2, k, j);
                }
            p.quad_dl(k, j) = qd * inv_ln2;
            p.quad_ul(k, j) = qu * inv_ln2;
            if (!(p.quad_dl(k, j) >= 0.0) || !(p.quad_ul(k, j) >= 0.0))
                throw std::logic_error("build_p4: negative quadratic penalty (gain tables corrupted)");
        }
    return p;
}

RelaxationSolution solve_relaxation(const SubproblemP4& p4, const RelaxationOptions& options)
{
    return solve_relaxation(p4, NodeFixings::root(p4.ues, p4.sats), options);
}

RelaxationSolution solve_relaxation(const SubproblemP4& p4, const NodeFixings& fix, const RelaxationOptions& options)
{
    const std::size_t K = p4.ues;
    const std::size_t J = p4.sats;
    const double M = p4.big_m;
    if (fix.d.rows() != K || fix.d.cols() != J || fix.u.rows() != K || fix.u.cols() != J)
        throw std::invalid_argument("solve_relaxation: fixings do not match the subproblem");

    RelaxationSolution out;
    out.d = Grid<double>(K, J);
    out.u = Grid<double>(K, J);
    out.z_dl = Grid<double>(K, J);
    out.z_ul = Grid<double>(K, J);
    out.t_dl.assign(K, 0.0);
    out.t_ul.assign(K, 0.0);

    std::vector<std::size_t> one_dl(K), one_ul(K);
    for (std::size_t k = 0; k < K; ++k)
    {
        bool bad = false;
        one_dl[k] = fixed_one(fix.d, k, bad);
        one_ul[k] = fixed_one(fix.u, k, bad);
        if (bad)
        {
            out.infeasible = true;
            return out;
        }
    }

    // A variable is kept only when it can improve the objective. Dropping
    // z <= 0 candidates is exact: every constraint is non-decreasing in z.
    const double ub_dl = dl_amp_bound(p4);
    const double ub_ul = ul_amp_bound(p4);
    Grid<std::size_t> var_dl(K, J, none), var_ul(K, J, none);
    SeparableQcqp qp;
    auto add_var = [&](double lin, double quad, double ub) {
        qp.linear.push_back(lin);
        qp.quadratic.push_back(quad);
        qp.lower.push_back(0.0);
        qp.upper.push_back(ub);
        return qp.linear.size() - 1;
    };
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < J; ++j)
        {
            const bool dl_allowed = one_dl[k] == none ? fix.d(k, j) != BinaryFix::zero : one_dl[k] == j;
            const bool ul_allowed = one_ul[k] == none ? fix.u(k, j) != BinaryFix::zero : one_ul[k] == j;
            if (dl_allowed && p4.lin_dl(k, j) > 0.0)
                var_dl(k, j) = add_var(p4.lin_dl(k, j), p4.quad_dl(k, j), ub_dl);
            if (ul_allowed && p4.lin_ul(k, j) > 0.0)
                var_ul(k, j) = add_var(p4.lin_ul(k, j), p4.quad_ul(k, j), ub_ul);
        }

    for (std::size_t k = 0; k < K; ++k)
    {
        // One association per row: with relaxed binaries this is sum z <= M.
        for (int dir = 0; dir < 2; ++dir)
        {
            const auto& vars = dir == 0 ? var_dl : var_ul;
            const std::size_t one = dir == 0 ? one_dl[k] : one_ul[k];
            const double ub = dir == 0 ? ub_dl : ub_ul;
            if (one != none)
                continue;
            SeparableQcqp::Row row;
            for (std::size_t j = 0; j < J; ++j)
                if (vars(k, j) != none)
                    row.terms.emplace_back(vars(k, j), 1.0);
            row.rhs = M;
            if (static_cast<double>(row.terms.size()) * ub > M)
                qp.rows.push_back(std::move(row));
        }

        // FDD linking with minimal relaxed masses b = z / M (or 1 when fixed).
        double d1 = 0.0, dt = 0.0, u1 = 0.0, ut = 0.0;
        if (one_dl[k] != none)
        {
            d1 += p4.spin[one_dl[k]];
            dt += 1.0;
        }
        if (one_ul[k] != none)
        {
            u1 += p4.spin[one_ul[k]];
            ut += 1.0;
        }
        for (int sign : {+1, -1})
        {
            const double rhs = 2.0 * M - (sign * (d1 - u1) + M * (dt + ut));
            if (rhs < -1e-12)
            {
                out.infeasible = true;
                return out;
            }
            SeparableQcqp::Row row;
            double reach = 0.0;
            for (std::size_t j = 0; j < J; ++j)
            {
                const double r = p4.spin[j];
                if (var_dl(k, j) != none && one_dl[k] == none)
                {
                    const double c = (sign * r + M) / M;
                    row.terms.emplace_back(var_dl(k, j), c);
                    reach += c * ub_dl;
                }
                if (var_ul(k, j) != none && one_ul[k] == none)
                {
                    const double c = (-sign * r + M) / M;
                    row.terms.emplace_back(var_ul(k, j), c);
                    reach += c * ub_ul;
                }
            }
            if (!row.terms.empty() && reach > rhs)
            {
                row.rhs = rhs;
                qp.rows.push_back(std::move(row));
            }
        }
    }

    for (std::size_t j = 0; j < J; ++j)
    {
        SeparableQcqp::Ball ball;
        for (std::size_t k = 0; k < K; ++k)
            if (var_dl(k, j) != none)
                ball.indices.push_back(var_dl(k, j));
        ball.radius_sq = p4.p_sat_max;
        if (static_cast<double>(ball.indices.size()) * ub_dl * ub_dl > p4.p_sat_max)
            qp.balls.push_back(std::move(ball));
    }

    QcqpOptions qo;
    qo.tolerance = options.tolerance;
    qo.max_iterations = options.max_iterations;
    const QcqpResult r = solve_qcqp(qp, qo);
    out.converged = r.converged;
    out.iterations = r.iterations;
    out.kkt_residual = r.kkt_residual;
    out.bound = p4.constant + r.dual_bound;

    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < J; ++j)
        {
            if (var_dl(k, j) != none)
                out.z_dl(k, j) = r.x[var_dl(k, j)];
            if (var_ul(k, j) != none)
                out.z_ul(k, j) = r.x[var_ul(k, j)];
        }
    out.objective = p4.objective(out.z_dl, out.z_ul);
    out.bound = std::max(out.bound, out.objective);

    // Relaxed binaries: integral where a single satellite carries amplitude,
    // otherwise the minimal masses z / M.
    const double eps = 1e-9;
    std::vector<bool> row_split(2 * K, false);
    auto recover = [&](std::size_t k, bool minimal) {
        for (int dir = 0; dir < 2; ++dir)
        {
            const auto& z = dir == 0 ? out.z_dl : out.z_ul;
            auto& b = dir == 0 ? out.d : out.u;
            auto& t = dir == 0 ? out.t_dl : out.t_ul;
            const std::size_t one = dir == 0 ? one_dl[k] : one_ul[k];
            for (std::size_t j = 0; j < J; ++j)
                b(k, j) = 0.0;
            if (one != none)
            {
                b(k, one) = 1.0;
                t[k] = z(k, one);
                continue;
            }
            std::size_t count = 0;
            std::size_t last = none;
            double zmax = 0.0;
            for (std::size_t j = 0; j < J; ++j)
                if (z(k, j) > eps)
                {
                    ++count;
                    last = j;
                    zmax = std::max(zmax, z(k, j));
                }
            t[k] = zmax;
            if (count == 1 && !minimal)
                b(k, last) = 1.0;
            else
                for (std::size_t j = 0; j < J; ++j)
                    if (z(k, j) > eps)
                        b(k, j) = z(k, j) / M;
        }
    };
    for (std::size_t k = 0; k < K; ++k)
    {
        recover(k, false);
        const auto [plus, minus] = linking_excess(p4, out.d, out.u, k);
        if (plus > 1e-12 || minus > 1e-12)
            recover(k, true);
    }
    return out;
}

std::string to_string(BnbStatus s)
{
    switch (s)
    {
    case BnbStatus::optimal:
        return "optimal";
    case BnbStatus::gap_limit:
        return "gap_limit";
    case BnbStatus::node_limit:
        return "node_limit";
    }
    return "unknown";
}

SubproblemSolution round_and_repair(const RelaxationSolution& relaxed, const SubproblemP4& p4)
{
    const std::size_t K = p4.ues;
    const std::size_t J = p4.sats;
    Grid<std::uint8_t> d(K, J, 0), u(K, J, 0);
    auto pick = [&](const Grid<double>& b, std::size_t k) {
        std::size_t best = none;
        double best_v = 0.5;
        for (std::size_t j = 0; j < J; ++j)
            if (b(k, j) >= best_v && (best == none || b(k, j) > b(k, best)))
            {
                best = j;
                best_v = b(k, j);
            }
        return best;
    };
    for (std::size_t k = 0; k < K; ++k)
    {
        const std::size_t jd = pick(relaxed.d, k);
        std::size_t ju = pick(relaxed.u, k);
        if (jd != none && ju != none && p4.spin[jd] != p4.spin[ju])
            ju = none;
        if (jd != none)
            d(k, jd) = 1;
        if (ju != none)
            u(k, ju) = 1;
    }
    return assemble(p4, d, u, relaxed.z_dl, relaxed.z_ul);
}

SubproblemSolution branch_and_bound(const SubproblemP4& p4, const BnbOptions& options)
{
    if (!(options.relative_gap_tol > 0.0))
        throw std::invalid_argument("branch_and_bound: gap tolerance must be positive");
    const std::size_t K = p4.ues;
    const std::size_t J = p4.sats;
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < J; ++j)
            if (p4.quad_dl(k, j) < 0.0 || p4.quad_ul(k, j) < 0.0)
                throw std::invalid_argument("branch_and_bound: non-concave objective");

    RelaxationOptions ro;
    ro.tolerance = options.relaxation_tol;

    const Grid<std::uint8_t> empty(K, J, 0);
    SubproblemSolution best = assemble(p4, empty, empty, Grid<double>(K, J), Grid<double>(K, J));
    auto tolerance = [&] {
        return std::max(options.absolute_gap_tol, options.relative_gap_tol * std::max(1.0, std::abs(best.objective)));
    };
    auto offer = [&](SubproblemSolution cand) {
        if (cand.objective > best.objective && p4_violation(p4, cand) <= 1e-9)
            best = std::move(cand);
    };

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    std::size_t next_id = 0;
    open.push({NodeFixings::root(K, J), std::numeric_limits<double>::infinity(), next_id++});

    std::size_t nodes = 0;
    std::size_t unconverged = 0;
    double unresolved_bound = -std::numeric_limits<double>::infinity();
    bool hit_limit = false;

    while (!open.empty())
    {
        Node node = open.top();
        open.pop();
        if (node.parent_bound <= best.objective + tolerance())
            continue;
        if (nodes >= options.node_limit)
        {
            open.push(std::move(node));
            hit_limit = true;
            break;
        }
        ++nodes;

        const RelaxationSolution rel = solve_relaxation(p4, node.fix, ro);
        if (rel.infeasible)
            continue;
        if (!rel.converged)
            ++unconverged;
        if (rel.bound <= best.objective + tolerance())
            continue;

        bool integral = true;
        for (std::size_t k = 0; k < K && integral; ++k)
            for (std::size_t j = 0; j < J; ++j)
            {
                const double a = rel.d(k, j);
                const double b = rel.u(k, j);
                if ((a != 0.0 && a != 1.0) || (b != 0.0 && b != 1.0))
                {
                    integral = false;
                    break;
                }
            }

        if (integral)
        {
            Grid<std::uint8_t> d(K, J, 0), u(K, J, 0);
            for (std::size_t k = 0; k < K; ++k)
                for (std::size_t j = 0; j < J; ++j)
                {
                    d(k, j) = rel.d(k, j) == 1.0;
                    u(k, j) = rel.u(k, j) == 1.0;
                }
            offer(assemble(p4, d, u, rel.z_dl, rel.z_ul));
            // The relaxed optimum is attained by an integral point: the
            // subtree is solved up to the relaxation accuracy.
            if (rel.bound > best.objective + tolerance())
                unresolved_bound = std::max(unresolved_bound, rel.bound);
            continue;
        }

        offer(round_and_repair(rel, p4));

        // Most fractional free binary; ties go to the lowest (k, j), d before u.
        std::size_t bk = none, bj = none;
        bool b_is_dl = true;
        double score = -1.0;
        for (std::size_t k = 0; k < K; ++k)
            for (std::size_t j = 0; j < J; ++j)
                for (int dir = 0; dir < 2; ++dir)
                {
                    const auto& fix = dir == 0 ? node.fix.d : node.fix.u;
                    if (fix(k, j) != BinaryFix::free)
                        continue;
                    const double v = dir == 0 ? rel.d(k, j) : rel.u(k, j);
                    const double s = std::min(v, 1.0 - v);
                    if (s > 1e-12 && s > score)
                    {
                        score = s;
                        bk = k;
                        bj = j;
                        b_is_dl = dir == 0;
                    }
                }
        if (bk == none)
        {
            unresolved_bound = std::max(unresolved_bound, rel.bound);
            continue;
        }

        Node one{node.fix, rel.bound, next_id++};
        Node zero{node.fix, rel.bound, next_id++};
        (b_is_dl ? one.fix.d : one.fix.u)(bk, bj) = BinaryFix::one;
        (b_is_dl ? zero.fix.d : zero.fix.u)(bk, bj) = BinaryFix::zero;
        open.push(std::move(one));
        open.push(std::move(zero));
    }

    double bound = best.objective;
    if (hit_limit)
        while (!open.empty())
        {
            bound = std::max(bound, open.top().parent_bound);
            open.pop();
        }
    bound = std::max(bound, unresolved_bound);

    best.nodes = nodes;
    best.unconverged_relaxations = unconverged;
    best.bound = bound;
    best.gap = bound - best.objective;
    if (hit_limit)
        best.status = BnbStatus::node_limit;
    else if (best.gap > tolerance())
        best.status = BnbStatus::gap_limit;
    else
        best.status = BnbStatus::optimal;
    return best;
}

double p4_violation(const SubproblemP4& p4, const SubproblemSolution& s)
{
    const std::size_t K = p4.ues;
    const std::size_t J = p4.sats;
    const double M = p4.big_m;
    double v = 0.0;
    Grid<double> d(K, J), u(K, J);
    for (std::size_t k = 0; k < K; ++k)
    {
        double nd = 0.0, nu = 0.0;
        v = std::max({v, -s.t_dl[k], -s.t_ul[k], s.t_ul[k] - p4.ue_amp_max});
        for (std::size_t j = 0; j < J; ++j)
        {
            d(k, j) = s.d(k, j);
            u(k, j) = s.u(k, j);
            if (s.d(k, j) > 1 || s.u(k, j) > 1)
                v = std::max(v, 1.0);
            nd += d(k, j);
            nu += u(k, j);
            const double zd = s.z_dl(k, j);
            const double zu = s.z_ul(k, j);
            v = std::max({v, -zd, zd - s.t_dl[k], -zu, zu - s.t_ul[k]});
            v = std::max({v, s.t_dl[k] - M * (1.0 - d(k, j)) - zd, zd - M * d(k, j)});
            v = std::max({v, s.t_ul[k] - M * (1.0 - u(k, j)) - zu, zu - M * u(k, j)});
        }
        v = std::max({v, nd - 1.0, nu - 1.0});
        const auto [plus, minus] = linking_excess(p4, d, u, k);
        v = std::max({v, plus, minus});
    }
    for (std::size_t j = 0; j < J; ++j)
    {
        double load = 0.0;
        for (std::size_t k = 0; k < K; ++k)
            load += s.z_dl(k, j) * s.z_dl(k, j);
        v = std::max(v, load - p4.p_sat_max);
    }
    return v;
}

Allocation allocation_of(const SubproblemSolution& sol)
{
    const std::size_t K = sol.d.rows();
    const std::size_t J = sol.d.cols();
    Allocation a(K, J);
    a.d = sol.d;
    a.u = sol.u;
    for (std::size_t k = 0; k < K; ++k)
    {
        bool dl = false, ul = false;
        for (std::size_t j = 0; j < J; ++j)
        {
            dl = dl || sol.d(k, j);
            ul = ul || sol.u(k, j);
        }
        a.p_dl[k] = dl ? sol.t_dl[k] * sol.t_dl[k] : 0.0;
        a.p_ul[k] = ul ? sol.t_ul[k] * sol.t_ul[k] : 0.0;
    }
    return a;
}

std::string p4_dump_json(const SubproblemP4& p4)
{
    nlohmann::ordered_json out;
    out["schema"] = "spinband.p4.v1";
    out["description"] =
        "maximize constant + sum(lin*z - quad*z^2) over binaries d,u and amplitudes t,z with big-M linking";
    out["ues"] = p4.ues;
    out["sats"] = p4.sats;
    out["spin"] = p4.spin.bits_string();
    out["big_m"] = p4.big_m;
    out["p_sat_max"] = p4.p_sat_max;
    out["ue_amp_max"] = p4.ue_amp_max;
    out["constant"] = p4.constant;
    auto grid = [&](const Grid<double>& g) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (std::size_t k = 0; k < g.rows(); ++k)
        {
            nlohmann::ordered_json r = nlohmann::ordered_json::array();
            for (std::size_t j = 0; j < g.cols(); ++j)
                r.push_back(g(k, j));
            rows.push_back(r);
        }
        return rows;
    };
    out["lin_dl"] = grid(p4.lin_dl);
    out["lin_ul"] = grid(p4.lin_ul);
    out["quad_dl"] = grid(p4.quad_dl);
    out["quad_ul"] = grid(p4.quad_ul);
    out["binaries"] = {{"d", "ues x sats"}, {"u", "ues x sats"}};
    return out.dump(2);
}

} // namespace spinband
