#pragma once

#include <utility>
#include <vector>

namespace cdslab {

struct LinearConstraint {
    enum class Sense { le, ge, eq };
    std::vector<std::pair<int, double>> terms;
    Sense sense = Sense::le;
    double rhs = 0.0;
};

/// minimize objective . x subject to the constraints and x >= 0.
struct LinearProgram {
    int num_vars = 0;
    std::vector<double> objective;
    std::vector<LinearConstraint> constraints;
};

struct LpSolution {
    enum class Status { optimal, infeasible, unbounded };
    Status status = Status::optimal;
    double value = 0.0;
    std::vector<double> x;
    int iterations = 0;
};

/// Dense two-phase simplex (Dantzig pricing, Bland's rule once progress
/// stalls). Throws BudgetError when the tableau would exceed 2^24 entries.
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace cdslab
