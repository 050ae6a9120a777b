#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace opcor {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Thrown when a factorization or spectral routine meets a numerically
// singular operator. Callers that probe speculative operators (line
// searches) catch this and treat the probe as an infinite objective.
struct SingularOperator : std::runtime_error {
    explicit SingularOperator(const std::string& what) : std::runtime_error(what) {}
};

struct GeometryDegenerate : std::runtime_error {
    explicit GeometryDegenerate(const std::string& what) : std::runtime_error(what) {}
};

// Scale-aware pivot threshold: a factorization is declared singular when
// some pivot falls below this fraction of the largest entry magnitude.
inline constexpr double kSingularPivotTol = 1e-14;

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// Pivoted LU of a square operator, reusable across many right-hand sides
// and across transposed solves. Construction runs the singularity gate.
class LuFactorization {
  public:
    explicit LuFactorization(const Matrix& a) {
        require(a.rows() == a.cols() && a.rows() > 0,
                "LuFactorization: operator must be square and non-empty");
        require(a.allFinite(), "LuFactorization: operator has non-finite entries");
        lu_.compute(a);
        const double scale = a.cwiseAbs().maxCoeff();
        const double min_pivot = lu_.matrixLU().diagonal().cwiseAbs().minCoeff();
        if (scale == 0.0 || min_pivot < kSingularPivotTol * scale)
            throw SingularOperator("LuFactorization: operator is numerically singular");
    }

    Eigen::Index dim() const { return lu_.rows(); }

    // Solves A X = rhs.
    Matrix solve(const Matrix& rhs) const {
        require(rhs.rows() == dim(), "LuFactorization::solve: dimension mismatch");
        return lu_.solve(rhs);
    }

    // Solves A^T X = rhs with the same factorization.
    Matrix solve_transposed(const Matrix& rhs) const {
        require(rhs.rows() == dim(), "LuFactorization::solve_transposed: dimension mismatch");
        return lu_.transpose().solve(rhs);
    }

  private:
    Eigen::PartialPivLU<Matrix> lu_;
};

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.rows(), "matmul: inner dimensions disagree");
    return a * b;
}

inline Matrix solve(const Matrix& a, const Matrix& rhs) {
    LuFactorization lu(a);
    return lu.solve(rhs);
}

inline double frobenius_inner(const Matrix& a, const Matrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "frobenius_inner: shape mismatch");
    return a.cwiseProduct(b).sum();
}

inline Vector singular_values(const Matrix& a) {
    require(a.size() > 0, "singular_values: empty matrix");
    return Eigen::BDCSVD<Matrix>(a).singularValues();
}

// kappa(a) = sigma_max / sigma_min.
inline double condition_number(const Matrix& a) {
    require(a.rows() == a.cols(), "condition_number: operator must be square");
    const Vector sv = singular_values(a);
    const double smin = sv(sv.size() - 1);
    if (smin == 0.0) throw SingularOperator("condition_number: smallest singular value is zero");
    return sv(0) / smin;
}

// |a^{-1}|_F^2 via solves against the identity; no explicit inverse matrix
// object is kept around.
inline double inv_frobenius_sq(const Matrix& a) {
    LuFactorization lu(a);
    return lu.solve(Matrix::Identity(a.rows(), a.cols())).squaredNorm();
}

inline double nuclear_norm(const Matrix& a) {
    return singular_values(a).sum();
}

// Number of singular values above rel_tol * sigma_1; the zero matrix has rank 0.
inline int numerical_rank(const Matrix& a, double rel_tol) {
    require(rel_tol > 0.0 && rel_tol < 1.0, "numerical_rank: rel_tol must lie in (0,1)");
    const Vector sv = singular_values(a);
    const double s1 = sv(0);
    if (s1 == 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > rel_tol * s1) ++rank;
    return rank;
}

struct SingularTriplet {
    double sigma = 0.0;
    Vector left;   // unit vector, length rows
    Vector right;  // unit vector, length cols
};

enum class SingularMethod { full_svd, power_iteration };

namespace detail {

inline std::optional<SingularTriplet> top_triplet_full_svd(const Matrix& a) {
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double sigma = svd.singularValues()(0);
    if (sigma == 0.0) return std::nullopt;
    SingularTriplet t;
    t.sigma = sigma;
    t.left = svd.matrixU().col(0);
    t.right = svd.matrixV().col(0);
    return t;
}

}  // namespace detail

// Dominant singular triplet (sigma_1, u_1, v_1) with |a v_1 - sigma_1 u_1| <= tol * sigma_1.
// power_iteration runs on a^T a from a deterministic all-ones start and falls
// back to the full SVD if it stagnates; the zero matrix yields nullopt, which
// callers treat as a stationary (zero-gradient) signal.
inline std::optional<SingularTriplet> top_singular_triplet(const Matrix& a,
                                                           SingularMethod method = SingularMethod::full_svd,
                                                           double tol = 1e-10,
                                                           int max_iter = 1000) {
    require(a.size() > 0, "top_singular_triplet: empty matrix");
    require(tol > 0.0, "top_singular_triplet: tol must be positive");
    require(max_iter >= 1, "top_singular_triplet: max_iter must be >= 1");
    if (a.isZero(0.0)) return std::nullopt;

    if (method == SingularMethod::power_iteration) {
        Vector v = Vector::Ones(a.cols());
        v.normalize();
        double sigma_prev = -1.0;
        bool converged = false;
        for (int it = 0; it < max_iter; ++it) {
            Vector w = a * v;
            const double wn = w.norm();
            if (wn == 0.0) break;  // start vector hit the null space
            Vector z = a.transpose() * (w / wn);
            const double sigma = z.norm();
            if (sigma == 0.0) break;
            v = z / sigma;
            if (sigma_prev >= 0.0 && std::abs(sigma - sigma_prev) <= 0.5 * tol * sigma) {
                converged = true;
                break;
            }
            sigma_prev = sigma;
        }
        if (converged) {
            SingularTriplet t;
            Vector w = a * v;
            t.sigma = w.norm();
            if (t.sigma > 0.0) {
                t.left = w / t.sigma;
                t.right = v;
                return t;
            }
        }
        // stagnation: never fail silently
        return detail::top_triplet_full_svd(a);
    }
    return detail::top_triplet_full_svd(a);
}

}  // namespace opcor
