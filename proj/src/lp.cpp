#include "cdslab/lp.hpp"

#include <cmath>
#include <limits>

#include "cdslab/error.hpp"

namespace cdslab {

namespace {

constexpr double kEps = 1e-11;

class Tableau {
public:
    Tableau(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows + 1) * cols, 0.0) {}

    double& at(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
    double at(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }

    void pivot(int pr, int pc) {
        const double inv = 1.0 / at(pr, pc);
        for (int c = 0; c < cols_; ++c) at(pr, c) *= inv;
        at(pr, pc) = 1.0;
        for (int r = 0; r <= rows_; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (int c = 0; c < cols_; ++c) at(r, c) -= f * at(pr, c);
            at(r, pc) = 0.0;
        }
    }

private:
    int rows_;
    int cols_;
    std::vector<double> a_;
};

// Row `rows` is the objective row holding reduced costs; the last column is
// the right-hand side. Columns >= `allowed` may not enter the basis.
LpSolution::Status run_simplex(Tableau& t, std::vector<int>& basis, int allowed, int& iterations) {
    const int rhs = t.cols() - 1;
    const int obj = t.rows();
    int stall = 0;
    double last = t.at(obj, rhs);
    while (true) {
        const bool bland = stall > 50;
        int pc = -1;
        double best = -kEps;
        for (int c = 0; c < allowed; ++c) {
            const double rc = t.at(obj, c);
            if (rc < best) {
                pc = c;
                if (bland) break;
                best = rc;
            }
        }
        if (pc < 0) return LpSolution::Status::optimal;
        int pr = -1;
        double ratio = std::numeric_limits<double>::infinity();
        for (int r = 0; r < t.rows(); ++r) {
            const double v = t.at(r, pc);
            if (v <= kEps) continue;
            const double q = t.at(r, rhs) / v;
            if (q < ratio - kEps || (q < ratio + kEps && pr >= 0 && basis[static_cast<std::size_t>(r)] < basis[static_cast<std::size_t>(pr)])) {
                ratio = q;
                pr = r;
            }
        }
        if (pr < 0) return LpSolution::Status::unbounded;
        t.pivot(pr, pc);
        basis[static_cast<std::size_t>(pr)] = pc;
        ++iterations;
        const double now = t.at(obj, rhs);
        stall = std::abs(now - last) < kEps ? stall + 1 : 0;
        last = now;
        if (iterations > 1000000) throw Error("simplex iteration limit reached");
    }
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
    const int n = lp.num_vars;
    const int m = static_cast<int>(lp.constraints.size());
    if (static_cast<int>(lp.objective.size()) != n) throw DomainError("objective length differs from variable count");
    int slacks = 0, artificials = 0;
    std::vector<LinearConstraint::Sense> sense(static_cast<std::size_t>(m));
    std::vector<double> sign(static_cast<std::size_t>(m), 1.0);
    for (int i = 0; i < m; ++i) {
        const auto& c = lp.constraints[static_cast<std::size_t>(i)];
        auto s = c.sense;
        if (c.rhs < 0) {
            sign[static_cast<std::size_t>(i)] = -1.0;
            if (s == LinearConstraint::Sense::le) s = LinearConstraint::Sense::ge;
            else if (s == LinearConstraint::Sense::ge) s = LinearConstraint::Sense::le;
        }
        sense[static_cast<std::size_t>(i)] = s;
        if (s != LinearConstraint::Sense::eq) ++slacks;
        if (s != LinearConstraint::Sense::le) ++artificials;
    }
    const int cols = n + slacks + artificials + 1;
    if (static_cast<double>(m + 1) * cols > static_cast<double>(1 << 24)) {
        throw BudgetError("linear program too large for the dense simplex");
    }
    Tableau t(m, cols);
    std::vector<int> basis(static_cast<std::size_t>(m));
    const int rhs = cols - 1;
    int next_slack = n, next_art = n + slacks;
    for (int i = 0; i < m; ++i) {
        const auto& c = lp.constraints[static_cast<std::size_t>(i)];
        const double sg = sign[static_cast<std::size_t>(i)];
        for (const auto& [v, coef] : c.terms) {
            if (v < 0 || v >= n) throw DomainError("constraint refers to an unknown variable");
            t.at(i, v) += sg * coef;
        }
        t.at(i, rhs) = sg * c.rhs;
        switch (sense[static_cast<std::size_t>(i)]) {
            case LinearConstraint::Sense::le:
                t.at(i, next_slack) = 1.0;
                basis[static_cast<std::size_t>(i)] = next_slack++;
                break;
            case LinearConstraint::Sense::ge:
                t.at(i, next_slack++) = -1.0;
                t.at(i, next_art) = 1.0;
                basis[static_cast<std::size_t>(i)] = next_art++;
                break;
            case LinearConstraint::Sense::eq:
                t.at(i, next_art) = 1.0;
                basis[static_cast<std::size_t>(i)] = next_art++;
                break;
        }
    }
    LpSolution sol;
    const int first_art = n + slacks;
    if (artificials > 0) {
        // Phase 1: minimize the sum of artificials, priced out of the basis.
        for (int i = 0; i < m; ++i) {
            if (basis[static_cast<std::size_t>(i)] < first_art) continue;
            for (int c = 0; c < cols; ++c)
                if (c < first_art || c == rhs) t.at(m, c) -= t.at(i, c);
        }
        run_simplex(t, basis, first_art, sol.iterations);
        if (-t.at(m, rhs) > 1e-9) {
            sol.status = LpSolution::Status::infeasible;
            return sol;
        }
        for (int i = 0; i < m; ++i) {
            if (basis[static_cast<std::size_t>(i)] < first_art) continue;
            for (int c = 0; c < first_art; ++c) {
                if (std::abs(t.at(i, c)) > 1e-9) {
                    t.pivot(i, c);
                    basis[static_cast<std::size_t>(i)] = c;
                    break;
                }
            }
        }
    }
    for (int c = 0; c < cols; ++c) t.at(m, c) = 0.0;
    for (int v = 0; v < n; ++v) t.at(m, v) = lp.objective[static_cast<std::size_t>(v)];
    for (int i = 0; i < m; ++i) {
        const int b = basis[static_cast<std::size_t>(i)];
        const double cb = b < n ? lp.objective[static_cast<std::size_t>(b)] : 0.0;
        if (cb == 0.0) continue;
        for (int c = 0; c < cols; ++c) t.at(m, c) -= cb * t.at(i, c);
    }
    sol.status = run_simplex(t, basis, first_art, sol.iterations);
    if (sol.status != LpSolution::Status::optimal) return sol;
    sol.x.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < m; ++i) {
        const int b = basis[static_cast<std::size_t>(i)];
        if (b < n) sol.x[static_cast<std::size_t>(b)] = t.at(i, rhs);
    }
    sol.value = 0.0;
    for (int v = 0; v < n; ++v) sol.value += lp.objective[static_cast<std::size_t>(v)] * sol.x[static_cast<std::size_t>(v)];
    return sol;
}

}  // namespace cdslab
