#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace spinband
{

// maximize   sum_i linear_i x_i - quadratic_i x_i^2
// subject to lower <= x <= upper
//            sum_t coef_t x_{idx_t} <= rhs       (rows)
//            sum_{i in ball} x_i^2 <= radius_sq  (balls)
// with quadratic_i >= 0, so the problem is convex.
struct SeparableQcqp
{
    struct Row
    {
        std::vector<std::pair<std::size_t, double>> terms;
        double rhs = 0.0;
    };
    struct Ball
    {
        std::vector<std::size_t> indices;
        double radius_sq = 0.0;
    };

    std::vector<double> linear;
    std::vector<double> quadratic;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<Row> rows;
    std::vector<Ball> balls;

    std::size_t size() const { return linear.size(); }
    double objective(const std::vector<double>& x) const;
    // Largest constraint violation at x (0 when feasible).
    double violation(const std::vector<double>& x) const;
};

struct QcqpOptions
{
    double tolerance = 1e-10;
    int max_iterations = 150;
};

struct QcqpResult
{
    std::vector<double> x;          // clipped to the box
    std::vector<double> row_mult;   // >= 0
    std::vector<double> ball_mult;  // >= 0
    double primal_value = 0.0;      // objective at x
    double dual_bound = 0.0;        // certified upper bound on the optimum
    double kkt_residual = 0.0;      // scaled max of stationarity, feasibility, complementarity
    int iterations = 0;
    bool converged = false;
};

// Weak-duality bound: for any non-negative multipliers, the box-constrained
// maximum of the Lagrangian upper-bounds the optimum.
double lagrangian_bound(const SeparableQcqp& p, const std::vector<double>& row_mult,
                        const std::vector<double>& ball_mult);

QcqpResult solve_qcqp(const SeparableQcqp& p, const QcqpOptions& options = {});

} // namespace spinband
