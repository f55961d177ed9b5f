#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace secrecy::solver {

struct AffineTerm {
    std::size_t index;
    double coeff;
};

/// sum_j coeff_j * z[index_j] + constant
struct AffineExpr {
    std::vector<AffineTerm> terms;
    double constant = 0.0;

    double eval(std::span<const double> z) const;
};

/// g(z) = sum_k squares[k](z)^2 + linear(z) <= 0. Convex by construction;
/// a constraint without squares is linear.
struct Constraint {
    std::vector<AffineExpr> squares;
    AffineExpr linear;

    double eval(std::span<const double> z) const;
};

/// Contributes -weight * ln(1 + c / z[index]) to the maximized objective.
/// Requires c >= 0 and weight >= 0; the domain is z[index] > 0.
struct LogTerm {
    std::size_t index;
    double c;
    double weight = 1.0;
};

/// maximize  linear_objective . z - sum_k log_terms[k]
/// subject to constraints[i](z) <= 0.
struct ConvexProblem {
    std::size_t num_vars = 0;
    std::vector<double> linear_objective;
    std::vector<LogTerm> log_terms;
    std::vector<Constraint> constraints;
    std::vector<double> start;  // must be strictly feasible

    double objective(std::span<const double> z) const;
    double max_violation(std::span<const double> z) const;
};

struct SolverOptions {
    double tol = 1e-8;          // duality gap bound m/kappa
    double kappa0 = 10.0;
    double kappa_factor = 10.0;
    int max_stages = 12;
    int max_newton = 50;        // per stage
    double armijo = 0.25;
    double backtrack = 0.5;
    double boundary_fraction = 0.99;
    double newton_tol = 1e-10;  // half squared Newton decrement
};

enum class SolveStatus { converged, failed };

struct SolverReport {
    std::vector<double> solution;
    std::vector<double> multipliers;  // one per constraint
    double objective = 0.0;
    double kkt_residual = 0.0;
    double max_violation = 0.0;
    double gap_bound = 0.0;
    int barrier_stages = 0;
    int newton_iterations = 0;
    SolveStatus status = SolveStatus::failed;
    std::string message;
};

/// Primal log-barrier method with damped Newton steps. Throws
/// std::invalid_argument if the start point is not strictly feasible or the
/// problem is malformed.
SolverReport solve(const ConvexProblem& prob, const SolverOptions& opts = {});

/// Infinity norm of the Lagrangian gradient (for the minimization of the
/// negated objective) plus the largest |multiplier * constraint| product.
double kkt_residual(const ConvexProblem& prob, std::span<const double> point,
                    std::span<const double> multipliers);

}  // namespace secrecy::solver
