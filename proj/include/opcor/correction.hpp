#pragma once

#include "opcor/dense.hpp"

#include <functional>
#include <numeric>
#include <utility>
#include <vector>

namespace opcor {

// Row-sampling observation operator: keeps the listed state entries, in the
// listed order.
struct ObservationSelector {
    int state_dim = 0;
    std::vector<int> indices;

    ObservationSelector(int state_dim_, std::vector<int> indices_)
        : state_dim(state_dim_), indices(std::move(indices_)) {
        require(state_dim >= 1, "ObservationSelector: state_dim must be positive");
        require(!indices.empty(), "ObservationSelector: index set must be non-empty");
        std::vector<char> seen(static_cast<size_t>(state_dim), 0);
        for (int idx : indices) {
            require(idx >= 0 && idx < state_dim, "ObservationSelector: index out of range");
            require(!seen[static_cast<size_t>(idx)], "ObservationSelector: duplicate index");
            seen[static_cast<size_t>(idx)] = 1;
        }
    }

    static ObservationSelector full(int n) {
        std::vector<int> idx(static_cast<size_t>(n));
        std::iota(idx.begin(), idx.end(), 0);
        return ObservationSelector(n, std::move(idx));
    }

    int observed_dim() const { return static_cast<int>(indices.size()); }
};

// Row restriction of `states` to the selector's indices, order preserved.
inline Matrix observe(const ObservationSelector& selector, const Matrix& states) {
    require(states.rows() == selector.state_dim, "observe: state dimension mismatch");
    Matrix out(selector.observed_dim(), states.cols());
    for (int k = 0; k < selector.observed_dim(); ++k)
        out.row(k) = states.row(selector.indices[static_cast<size_t>(k)]);
    return out;
}

// Adjoint of observe: writes observed rows back at their state indices and
// zeros elsewhere, so that <observe(X), Y> = <X, scatter(Y)>.
inline Matrix scatter(const ObservationSelector& selector, const Matrix& observed) {
    require(observed.rows() == selector.observed_dim(), "scatter: observed dimension mismatch");
    Matrix out = Matrix::Zero(selector.state_dim, observed.cols());
    for (int k = 0; k < selector.observed_dim(); ++k)
        out.row(selector.indices[static_cast<size_t>(k)]) = observed.row(k);
    return out;
}

// Paired control / observation realizations, one per column.
struct TrainingSet {
    Matrix controls;      // n x N
    Matrix observations;  // n_obs x N

    int size() const { return static_cast<int>(controls.cols()); }
};

// One full correction-problem instance: misspecified operator, observation
// selector, training data, regularization weight and nuclear-norm budget.
struct CorrectionProblem {
    Matrix model;  // square, invertible
    ObservationSelector selector;
    TrainingSet data;
    double lambda = 0.0;
    double delta = 1.0;

    CorrectionProblem(Matrix model_, ObservationSelector selector_, TrainingSet data_,
                      double lambda_, double delta_)
        : model(std::move(model_)),
          selector(std::move(selector_)),
          data(std::move(data_)),
          lambda(lambda_),
          delta(delta_) {
        require(model.rows() == model.cols() && model.rows() > 0,
                "CorrectionProblem: model must be square");
        require(selector.state_dim == model.rows(),
                "CorrectionProblem: selector dimension must match the model");
        require(data.controls.rows() == model.rows(),
                "CorrectionProblem: control rows must match the model dimension");
        require(data.observations.rows() == selector.observed_dim(),
                "CorrectionProblem: observation rows must match the selector");
        require(data.controls.cols() == data.observations.cols() && data.controls.cols() >= 1,
                "CorrectionProblem: controls and observations need matching, non-zero columns");
        require(data.controls.allFinite() && data.observations.allFinite(),
                "CorrectionProblem: training data has non-finite entries");
        require(lambda >= 0.0, "CorrectionProblem: lambda must be non-negative");
        require(delta > 0.0, "CorrectionProblem: delta must be positive");
        LuFactorization probe(model);  // rejects a singular model up front
    }

    int dim() const { return static_cast<int>(model.rows()); }
};

namespace detail {

inline void check_correction_shape(const CorrectionProblem& p, const Matrix& c) {
    require(c.rows() == p.model.rows() && c.cols() == p.model.cols(),
            "correction must match the model's shape");
}

}  // namespace detail

// Fidelity term |observe((M+C)^{-1} Q) - D|_F^2.
inline double inverse_error(const CorrectionProblem& p, const Matrix& correction) {
    detail::check_correction_shape(p, correction);
    LuFactorization lu(p.model + correction);
    const Matrix states = lu.solve(p.data.controls);
    return (observe(p.selector, states) - p.data.observations).squaredNorm();
}

// Condition-number proxy |(M+C)^{-1}|_F^2.
inline double virtue_proxy(const CorrectionProblem& p, const Matrix& correction) {
    detail::check_correction_shape(p, correction);
    return inv_frobenius_sq(p.model + correction);
}

// Objective value and closed-form gradient computed off one shared
// factorization of A = M + C.
struct Evaluation {
    double value = 0.0;
    double fidelity = 0.0;
    double proxy = 0.0;
    Matrix gradient;
};

inline Evaluation evaluate(const CorrectionProblem& p, const Matrix& correction) {
    detail::check_correction_shape(p, correction);
    const Matrix a = p.model + correction;
    LuFactorization lu(a);

    Evaluation ev;
    const Matrix states = lu.solve(p.data.controls);                       // A^{-1} Q
    const Matrix residual = observe(p.selector, states) - p.data.observations;
    ev.fidelity = residual.squaredNorm();
    // d/dC |observe(A^{-1}Q) - D|_F^2 = -2 A^{-T} scatter(R) Q^T A^{-T}
    const Matrix back = lu.solve_transposed(scatter(p.selector, residual));
    ev.gradient = -2.0 * back * states.transpose();

    if (p.lambda > 0.0) {
        const Matrix inv = lu.solve(Matrix::Identity(a.rows(), a.cols()));  // A^{-1}
        ev.proxy = inv.squaredNorm();
        // d/dC |A^{-1}|_F^2 = -2 A^{-T} A^{-1} A^{-T}
        ev.gradient += p.lambda * (-2.0 * lu.solve_transposed(inv * inv.transpose()));
    }
    ev.value = ev.fidelity + p.lambda * ev.proxy;
    return ev;
}

// inverse_error + lambda * virtue_proxy, one factorization for both terms.
inline double objective(const CorrectionProblem& p, const Matrix& correction) {
    detail::check_correction_shape(p, correction);
    LuFactorization lu(p.model + correction);
    const Matrix states = lu.solve(p.data.controls);
    double value = (observe(p.selector, states) - p.data.observations).squaredNorm();
    if (p.lambda > 0.0) {
        const int n = p.dim();
        value += p.lambda * lu.solve(Matrix::Identity(n, n)).squaredNorm();
    }
    return value;
}

inline Matrix gradient(const CorrectionProblem& p, const Matrix& correction) {
    return evaluate(p, correction).gradient;
}

// Central-difference gradient of an arbitrary scalar field; the oracle seam
// used to cross-check the closed-form gradient.
inline Matrix fd_gradient(const std::function<double(const Matrix&)>& f, const Matrix& at,
                          double step) {
    require(step > 0.0, "fd_gradient: step must be positive");
    Matrix g(at.rows(), at.cols());
    Matrix probe = at;
    for (Eigen::Index i = 0; i < at.rows(); ++i) {
        for (Eigen::Index j = 0; j < at.cols(); ++j) {
            probe(i, j) = at(i, j) + step;
            const double fp = f(probe);
            probe(i, j) = at(i, j) - step;
            const double fm = f(probe);
            probe(i, j) = at(i, j);
            g(i, j) = (fp - fm) / (2.0 * step);
        }
    }
    return g;
}

inline Matrix fd_gradient(const CorrectionProblem& p, const Matrix& correction, double step) {
    detail::check_correction_shape(p, correction);
    require(step > 0.0, "fd_gradient: step must be positive");
    Matrix g(correction.rows(), correction.cols());
    Matrix probe = correction;
    for (Eigen::Index i = 0; i < correction.rows(); ++i) {
        for (Eigen::Index j = 0; j < correction.cols(); ++j) {
            try {
                probe(i, j) = correction(i, j) + step;
                const double fp = objective(p, probe);
                probe(i, j) = correction(i, j) - step;
                const double fm = objective(p, probe);
                g(i, j) = (fp - fm) / (2.0 * step);
            } catch (const SingularOperator&) {
                throw SingularOperator("fd_gradient: singular probe at entry (" +
                                       std::to_string(i) + ", " + std::to_string(j) + ")");
            }
            probe(i, j) = correction(i, j);
        }
    }
    return g;
}

}  // namespace opcor
