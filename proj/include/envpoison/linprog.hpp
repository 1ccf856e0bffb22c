#pragma once

#include <Eigen/Dense>

namespace envpoison {

// Feasible region { x : a_eq x = b_eq, a_in x <= b_in, lower <= x <= upper }.
// Empty matrices mean "no constraints of that kind"; bounds may be +-inf.
struct Polyhedron {
    Eigen::MatrixXd a_eq;
    Eigen::VectorXd b_eq;
    Eigen::MatrixXd a_in;
    Eigen::VectorXd b_in;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    int dim() const { return int(lower.size()); }
    static Polyhedron free_region(int n);

    // Worst violation of any constraint or bound at x.
    double violation(const Eigen::VectorXd& x) const;
};

// minimize c . x over a Polyhedron.
struct LinearProgram {
    Eigen::VectorXd c;
    Polyhedron region;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, NoConvergence };

const char* to_string(SolveStatus s);

struct SolveReport {
    SolveStatus status = SolveStatus::NoConvergence;
    Eigen::VectorXd x;
    double objective = 0.0;
    double max_violation = 0.0;
    // Complementarity-and-feasibility residual; filled by the projection
    // path, zero for the simplex paths.
    double kkt_residual = 0.0;
    long iterations = 0;
};

// Dense two-phase primal simplex.  Optimal solutions are feasible within
// 1e-7 and dual feasible within 1e-7; infeasibility is declared when the
// phase-1 optimum exceeds 1e-9.  Falls back to Bland's rule after a
// degenerate stretch; gives up with NoConvergence after 1e5 pivots.
SolveReport solve_lp(const LinearProgram& lp);

// minimize || x - base ||_p over the region, for p in {1, 2, inf}.
// p = 1 and p = inf reduce to linear programs; p = 2 runs cyclic Dykstra
// projections (tolerance 1e-8, cap 2e5 cycles) after an LP feasibility
// check, and reports its KKT residual.
SolveReport min_lp_norm_to_point(const Eigen::VectorXd& base, double p,
                                 const Polyhedron& region);

// Euclidean projection of `base` onto the region by cyclic corrected
// projections.  The region must be nonempty; an empty one ends in
// NoConvergence after the cycle cap rather than a certificate.
SolveReport project_dykstra(const Eigen::VectorXd& base, const Polyhedron& region);

// || v ||_p for p in {1, 2, inf}.
double lp_norm(const Eigen::VectorXd& v, double p);

}  // namespace envpoison
