#include "spinband/qcqp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spinband
{
namespace
{

// In-place dense Cholesky (lower triangle). Tiny pivots are regularised;
// the matrices here are SPD up to round-off.
void cholesky(std::vector<double>& a, std::size_t n)
{
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        max_diag = std::max(max_diag, std::abs(a[i * n + i]));
    const double floor = std::max(max_diag, 1.0) * 1e-15;
    for (std::size_t j = 0; j < n; ++j)
    {
        double d = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k)
            d -= a[j * n + k] * a[j * n + k];
        d = std::sqrt(std::max(d, floor));
        a[j * n + j] = d;
        for (std::size_t i = j + 1; i < n; ++i)
        {
            double v = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k)
                v -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = v / d;
        }
    }
}

void cholesky_solve(const std::vector<double>& l, std::size_t n, std::vector<double>& b)
{
    for (std::size_t i = 0; i < n; ++i)
    {
        double v = b[i];
        for (std::size_t k = 0; k < i; ++k)
            v -= l[i * n + k] * b[k];
        b[i] = v / l[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;)
    {
        double v = b[i];
        for (std::size_t k = i + 1; k < n; ++k)
            v -= l[k * n + i] * b[k];
        b[i] = v / l[i * n + i];
    }
}

double max_step(const std::vector<double>& v, const std::vector<double>& dv)
{
    double a = 1.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (dv[i] < 0.0)
            a = std::min(a, -v[i] / dv[i]);
    return a;
}

// Constraint layout: rows, balls, lower bounds, upper bounds.
class Constraints
{
  public:
    explicit Constraints(const SeparableQcqp& p)
        : p_(p), n_(p.size()), nr_(p.rows.size()), nb_(p.balls.size())
    {
    }

    std::size_t count() const { return nr_ + nb_ + 2 * n_; }

    void values(const std::vector<double>& x, std::vector<double>& c) const
    {
        c.assign(count(), 0.0);
        for (std::size_t r = 0; r < nr_; ++r)
        {
            double v = -p_.rows[r].rhs;
            for (auto [i, a] : p_.rows[r].terms)
                v += a * x[i];
            c[r] = v;
        }
        for (std::size_t b = 0; b < nb_; ++b)
        {
            double v = -p_.balls[b].radius_sq;
            for (auto i : p_.balls[b].indices)
                v += x[i] * x[i];
            c[nr_ + b] = v;
        }
        for (std::size_t i = 0; i < n_; ++i)
        {
            c[nr_ + nb_ + i] = p_.lower[i] - x[i];
            c[nr_ + nb_ + n_ + i] = x[i] - p_.upper[i];
        }
    }

    // out += J^T y
    void add_jt(const std::vector<double>& x, const std::vector<double>& y, std::vector<double>& out) const
    {
        for (std::size_t r = 0; r < nr_; ++r)
            for (auto [i, a] : p_.rows[r].terms)
                out[i] += a * y[r];
        for (std::size_t b = 0; b < nb_; ++b)
            for (auto i : p_.balls[b].indices)
                out[i] += 2.0 * x[i] * y[nr_ + b];
        for (std::size_t i = 0; i < n_; ++i)
            out[i] += -y[nr_ + nb_ + i] + y[nr_ + nb_ + n_ + i];
    }

    // out = J dx
    void apply_j(const std::vector<double>& x, const std::vector<double>& dx, std::vector<double>& out) const
    {
        out.assign(count(), 0.0);
        for (std::size_t r = 0; r < nr_; ++r)
            for (auto [i, a] : p_.rows[r].terms)
                out[r] += a * dx[i];
        for (std::size_t b = 0; b < nb_; ++b)
            for (auto i : p_.balls[b].indices)
                out[nr_ + b] += 2.0 * x[i] * dx[i];
        for (std::size_t i = 0; i < n_; ++i)
        {
            out[nr_ + nb_ + i] = -dx[i];
            out[nr_ + nb_ + n_ + i] = dx[i];
        }
    }

    // H = diag(2q + 2 sum ball mult) + J^T diag(w) J
    void normal_matrix(const std::vector<double>& x, const std::vector<double>& lambda,
                       const std::vector<double>& w, std::vector<double>& h) const
    {
        h.assign(n_ * n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i)
            h[i * n_ + i] = 2.0 * p_.quadratic[i] + w[nr_ + nb_ + i] + w[nr_ + nb_ + n_ + i];
        for (std::size_t b = 0; b < nb_; ++b)
            for (auto i : p_.balls[b].indices)
                h[i * n_ + i] += 2.0 * lambda[nr_ + b];
        for (std::size_t r = 0; r < nr_; ++r)
            for (auto [i, a] : p_.rows[r].terms)
                for (auto [k, c] : p_.rows[r].terms)
                    h[i * n_ + k] += w[r] * a * c;
        for (std::size_t b = 0; b < nb_; ++b)
            for (auto i : p_.balls[b].indices)
                for (auto k : p_.balls[b].indices)
                    h[i * n_ + k] += w[nr_ + b] * 4.0 * x[i] * x[k];
    }

    std::size_t rows() const { return nr_; }
    std::size_t balls() const { return nb_; }

  private:
    const SeparableQcqp& p_;
    std::size_t n_;
    std::size_t nr_;
    std::size_t nb_;
};

double inf_norm(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

} // namespace

double SeparableQcqp::objective(const std::vector<double>& x) const
{
    double f = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
        f += linear[i] * x[i] - quadratic[i] * x[i] * x[i];
    return f;
}

double SeparableQcqp::violation(const std::vector<double>& x) const
{
    double v = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
        v = std::max({v, lower[i] - x[i], x[i] - upper[i]});
    for (const auto& r : rows)
    {
        double s = -r.rhs;
        for (auto [i, a] : r.terms)
            s += a * x[i];
        v = std::max(v, s);
    }
    for (const auto& b : balls)
    {
        double s = -b.radius_sq;
        for (auto i : b.indices)
            s += x[i] * x[i];
        v = std::max(v, s);
    }
    return v;
}

double lagrangian_bound(const SeparableQcqp& p, const std::vector<double>& row_mult,
                        const std::vector<double>& ball_mult)
{
    const std::size_t n = p.size();
    std::vector<double> c = p.linear;
    std::vector<double> q = p.quadratic;
    double bound = 0.0;
    for (std::size_t r = 0; r < p.rows.size(); ++r)
    {
        const double m = std::max(0.0, row_mult[r]);
        for (auto [i, a] : p.rows[r].terms)
            c[i] -= m * a;
        bound += m * p.rows[r].rhs;
    }
    for (std::size_t b = 0; b < p.balls.size(); ++b)
    {
        const double m = std::max(0.0, ball_mult[b]);
        for (auto i : p.balls[b].indices)
            q[i] += m;
        bound += m * p.balls[b].radius_sq;
    }
    for (std::size_t i = 0; i < n; ++i)
    {
        double x;
        if (q[i] > 0.0)
            x = std::clamp(c[i] / (2.0 * q[i]), p.lower[i], p.upper[i]);
        else
            x = c[i] > 0.0 ? p.upper[i] : p.lower[i];
        bound += c[i] * x - q[i] * x * x;
    }
    return bound;
}

QcqpResult solve_qcqp(const SeparableQcqp& p, const QcqpOptions& options)
{
    const std::size_t n = p.size();
    if (p.quadratic.size() != n || p.lower.size() != n || p.upper.size() != n)
        throw std::invalid_argument("solve_qcqp: inconsistent problem dimensions");
    for (std::size_t i = 0; i < n; ++i)
    {
        if (p.quadratic[i] < 0.0)
            throw std::invalid_argument("solve_qcqp: negative quadratic coefficient (non-concave objective)");
        if (!(p.lower[i] < p.upper[i]) || !std::isfinite(p.lower[i]) || !std::isfinite(p.upper[i]))
            throw std::invalid_argument("solve_qcqp: every variable needs a finite box with lower < upper");
    }

    QcqpResult res;
    res.row_mult.assign(p.rows.size(), 0.0);
    res.ball_mult.assign(p.balls.size(), 0.0);
    if (n == 0)
    {
        res.converged = true;
        return res;
    }

    const Constraints con(p);
    const std::size_t m = con.count();

    double primal_scale = 1.0;
    for (const auto& r : p.rows)
        primal_scale = std::max(primal_scale, std::abs(r.rhs));
    for (const auto& b : p.balls)
        primal_scale = std::max(primal_scale, b.radius_sq);
    for (std::size_t i = 0; i < n; ++i)
        primal_scale = std::max({primal_scale, std::abs(p.lower[i]), std::abs(p.upper[i])});
    const double dual_scale = 1.0 + inf_norm(p.linear);

    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = p.lower[i] + 0.1 * (p.upper[i] - p.lower[i]);
    std::vector<double> c;
    con.values(x, c);
    std::vector<double> s(m), lambda(m, 1.0);
    for (std::size_t i = 0; i < m; ++i)
        s[i] = std::max(-c[i], 1e-2 * primal_scale);

    std::vector<double> rd(n), rp(m), rc(m), w(m), h, rhs(n), dx(n), ds(m), dl(m), jdx;
    std::vector<double> dx_aff, ds_aff(m), dl_aff(m);

    auto direction = [&](const std::vector<double>& comp, std::vector<double>& dxo, std::vector<double>& dso,
                         std::vector<double>& dlo) {
        std::vector<double> y(m);
        for (std::size_t i = 0; i < m; ++i)
            y[i] = (lambda[i] * rp[i] - comp[i]) / s[i];
        rhs.assign(n, 0.0);
        con.add_jt(x, y, rhs);
        for (std::size_t i = 0; i < n; ++i)
            rhs[i] = -rd[i] - rhs[i];
        cholesky_solve(h, n, rhs);
        dxo = rhs;
        con.apply_j(x, dxo, jdx);
        for (std::size_t i = 0; i < m; ++i)
        {
            dso[i] = -rp[i] - jdx[i];
            dlo[i] = -(comp[i] + lambda[i] * dso[i]) / s[i];
        }
    };

    for (int it = 0; it < options.max_iterations; ++it)
    {
        con.values(x, c);
        for (std::size_t i = 0; i < n; ++i)
            rd[i] = 2.0 * p.quadratic[i] * x[i] - p.linear[i];
        con.add_jt(x, lambda, rd);
        double gap = 0.0;
        for (std::size_t i = 0; i < m; ++i)
        {
            rp[i] = c[i] + s[i];
            gap += s[i] * lambda[i];
        }
        const double mu = gap / static_cast<double>(m);
        const double fval = p.objective(x);
        res.kkt_residual = std::max({inf_norm(rd) / dual_scale, inf_norm(rp) / primal_scale,
                                     gap / (1.0 + std::abs(fval))});
        res.iterations = it;
        if (res.kkt_residual <= options.tolerance)
        {
            res.converged = true;
            break;
        }

        for (std::size_t i = 0; i < m; ++i)
            w[i] = lambda[i] / s[i];
        con.normal_matrix(x, lambda, w, h);
        cholesky(h, n);

        // Predictor.
        for (std::size_t i = 0; i < m; ++i)
            rc[i] = s[i] * lambda[i];
        direction(rc, dx_aff, ds_aff, dl_aff);
        const double ap = max_step(s, ds_aff);
        const double ad = max_step(lambda, dl_aff);
        double gap_aff = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            gap_aff += (s[i] + ap * ds_aff[i]) * (lambda[i] + ad * dl_aff[i]);
        const double sigma = std::pow(std::clamp(gap_aff / gap, 0.0, 1.0), 3.0);

        // Corrector.
        for (std::size_t i = 0; i < m; ++i)
            rc[i] = s[i] * lambda[i] + ds_aff[i] * dl_aff[i] - sigma * mu;
        direction(rc, dx, ds, dl);

        const double step_p = std::min(1.0, 0.995 * max_step(s, ds));
        const double step_d = std::min(1.0, 0.995 * max_step(lambda, dl));
        for (std::size_t i = 0; i < n; ++i)
            x[i] += step_p * dx[i];
        for (std::size_t i = 0; i < m; ++i)
        {
            s[i] = std::max(s[i] + step_p * ds[i], 1e-300);
            lambda[i] = std::max(lambda[i] + step_d * dl[i], 1e-300);
        }
        res.iterations = it + 1;
    }

    for (std::size_t i = 0; i < n; ++i)
        x[i] = std::clamp(x[i], p.lower[i], p.upper[i]);
    for (std::size_t r = 0; r < con.rows(); ++r)
        res.row_mult[r] = lambda[r];
    for (std::size_t b = 0; b < con.balls(); ++b)
        res.ball_mult[b] = lambda[con.rows() + b];
    res.primal_value = p.objective(x);
    res.dual_bound = lagrangian_bound(p, res.row_mult, res.ball_mult);
    res.x = std::move(x);
    return res;
}

} // namespace spinband
