#pragma once

#include "opcor/correction.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>

namespace opcor {

// Seeded random correction problem plus an evaluation point, small enough
// for finite-difference cross-checks (n^2 objective evaluations).
struct RandomProblem {
    CorrectionProblem problem;
    Matrix eval_point;
};

inline RandomProblem make_random_problem(int n, int realizations, double lambda,
                                         std::uint64_t seed) {
    require(n >= 2 && n <= 20, "make_random_problem: n must lie in [2, 20]");
    require(realizations >= 1, "make_random_problem: need at least one realization");
    require(lambda >= 0.0, "make_random_problem: lambda must be non-negative");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto random_matrix = [&](int rows, int cols) {
        Matrix m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = unit(rng);
        return m;
    };

    // shifted to keep the model and its perturbed probes comfortably invertible
    const Matrix model = 2.0 * Matrix::Identity(n, n) + 0.5 * random_matrix(n, n);

    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const int observed = std::max(1, n / 2);
    std::vector<int> indices(order.begin(), order.begin() + observed);
    std::sort(indices.begin(), indices.end());

    TrainingSet data;
    data.controls = random_matrix(n, realizations);
    data.observations = random_matrix(observed, realizations);

    RandomProblem rp{CorrectionProblem(model, ObservationSelector(n, indices), data, lambda, 1.0),
                     0.05 * random_matrix(n, n)};
    return rp;
}

}  // namespace opcor
