#pragma once

#include "opcor/correction.hpp"
#include "opcor/dense.hpp"

#include <optional>
#include <string>
#include <vector>

namespace opcor {

enum class StepRule { classic, backtracking_line_search };

enum class Termination { gap_converged, max_iterations, stationary_zero_gradient };

inline std::string to_string(Termination t) {
    switch (t) {
        case Termination::gap_converged: return "gap_converged";
        case Termination::max_iterations: return "max_iterations";
        case Termination::stationary_zero_gradient: return "stationary_zero_gradient";
    }
    return "unknown";
}

struct SolverConfig {
    int max_iterations = 500;
    // Relative to the duality gap at the starting point: the solver stops
    // once gap_k <= gap_tolerance * gap_0. The objective is nonconvex
    // through (M+C)^{-1}, so the gap certifies stationarity, not global
    // optimality.
    double gap_tolerance = 1e-6;
    StepRule step_rule = StepRule::backtracking_line_search;
    SingularMethod lmo_method = SingularMethod::full_svd;
    double lmo_tolerance = 1e-10;
    double backtracking_shrink = 0.5;
    double backtracking_sufficient_decrease = 1e-4;
};

inline void validate(const SolverConfig& c) {
    require(c.max_iterations >= 1, "SolverConfig: max_iterations must be >= 1");
    require(c.gap_tolerance >= 0.0, "SolverConfig: gap_tolerance must be non-negative");
    require(c.lmo_tolerance > 0.0, "SolverConfig: lmo_tolerance must be positive");
    require(c.backtracking_shrink > 0.0 && c.backtracking_shrink < 1.0,
            "SolverConfig: backtracking_shrink must lie in (0,1)");
    require(c.backtracking_sufficient_decrease > 0.0 && c.backtracking_sufficient_decrease < 1.0,
            "SolverConfig: backtracking_sufficient_decrease must lie in (0,1)");
}

// Solver trace. Histories carry one entry per visited iterate C_0..C_K
// (objective, nuclear norm) and one per gradient evaluation (gap).
struct SolveResult {
    Matrix correction;
    std::vector<double> objective_history;
    std::vector<double> gap_history;
    std::vector<double> nuclear_norm_history;
    int iterations_run = 0;
    Termination termination = Termination::max_iterations;
};

// Vertex of the nuclear-norm ball minimizing <X, G>: S = -delta u1 v1^T with
// (sigma1, u1, v1) the top singular triplet of G, so <S, G> = -delta sigma1.
// A zero gradient has no descent vertex; nullopt signals stationarity.
inline std::optional<Matrix> lmo_nuclear_ball(const Matrix& g, double delta,
                                              SingularMethod method = SingularMethod::full_svd,
                                              double tol = 1e-10) {
    require(delta > 0.0, "lmo_nuclear_ball: delta must be positive");
    const auto triplet = top_singular_triplet(g, method, tol);
    if (!triplet) return std::nullopt;
    return Matrix(-delta * (triplet->left * triplet->right.transpose()));
}

// Frank-Wolfe stationarity certificate <C - S, G>; non-negative whenever S is
// an exact LMO answer and C is feasible.
inline double duality_gap(const Matrix& c, const Matrix& g, const Matrix& s) {
    return frobenius_inner(c - s, g);
}

namespace detail {

// Armijo backtracking over gamma in {1, shrink, shrink^2, ...}; singular
// probes count as +infinity. Returns 0 after exhausting 60 shrinks.
inline double backtracking_step(const std::function<double(double)>& trial_value,
                                double value_at_current, double directional_slope,
                                const SolverConfig& config) {
    if (directional_slope >= 0.0) return 0.0;
    double gamma = 1.0;
    for (int attempt = 0; attempt <= 60; ++attempt) {
        try {
            const double trial = trial_value(gamma);
            if (trial <= value_at_current +
                             config.backtracking_sufficient_decrease * gamma * directional_slope)
                return gamma;
        } catch (const SingularOperator&) {
            // treat as infinite objective; keep shrinking
        }
        gamma *= config.backtracking_shrink;
    }
    return 0.0;
}

}  // namespace detail

// Step length for the update C + gamma * direction, direction = S - C.
inline double step_size(int iteration, StepRule rule, const CorrectionProblem& problem,
                        const Matrix& current, const Matrix& direction, double value_at_current,
                        double directional_slope, const SolverConfig& config) {
    if (rule == StepRule::classic) return 2.0 / (iteration + 2.0);
    return detail::backtracking_step(
        [&](double gamma) { return objective(problem, current + gamma * direction); },
        value_at_current, directional_slope, config);
}

// Frank-Wolfe over the nuclear-norm ball {|C|_* <= delta}, starting from
// C_0 = 0. Every iterate is a convex combination of feasible points, so
// feasibility holds by construction and is asserted each iteration.
// Deterministic given (problem, config).
inline SolveResult solve(const CorrectionProblem& problem, const SolverConfig& config) {
    validate(config);
    const int n = problem.dim();
    const double feasibility_budget = problem.delta * (1.0 + 1e-8);

    SolveResult result;
    Matrix current = Matrix::Zero(n, n);
    Evaluation ev = evaluate(problem, current);
    double initial_gap = -1.0;
    int steps = 0;
    bool terminated = false;

    for (int k = 0; k < config.max_iterations && !terminated; ++k) {
        const double ball_load = nuclear_norm(current);
        if (ball_load > feasibility_budget)
            throw std::logic_error("frank_wolfe: iterate escaped the nuclear-norm ball");
        result.objective_history.push_back(ev.value);
        result.nuclear_norm_history.push_back(ball_load);

        const auto vertex =
            lmo_nuclear_ball(ev.gradient, problem.delta, config.lmo_method, config.lmo_tolerance);
        if (!vertex) {
            // zero gradient: gap vanishes for every vertex
            result.gap_history.push_back(0.0);
            result.termination = Termination::gap_converged;
            terminated = true;
            break;
        }
        const double gap = duality_gap(current, ev.gradient, *vertex);
        result.gap_history.push_back(gap);
        if (initial_gap < 0.0) initial_gap = std::max(gap, 0.0);
        if (gap <= config.gap_tolerance * initial_gap) {
            result.termination = Termination::gap_converged;
            terminated = true;
            break;
        }

        const Matrix direction = *vertex - current;
        const double slope = frobenius_inner(direction, ev.gradient);
        const double gamma = step_size(k, config.step_rule, problem, current, direction, ev.value,
                                       slope, config);
        if (gamma == 0.0) {
            result.termination = Termination::stationary_zero_gradient;
            terminated = true;
            break;
        }
        current += gamma * direction;
        ev = evaluate(problem, current);
        ++steps;
    }

    if (!terminated) {
        // max_iterations: record the last iterate reached
        const double ball_load = nuclear_norm(current);
        if (ball_load > feasibility_budget)
            throw std::logic_error("frank_wolfe: iterate escaped the nuclear-norm ball");
        result.objective_history.push_back(ev.value);
        result.nuclear_norm_history.push_back(ball_load);
        result.termination = Termination::max_iterations;
    }
    result.correction = std::move(current);
    result.iterations_run = steps;
    return result;
}

}  // namespace opcor
