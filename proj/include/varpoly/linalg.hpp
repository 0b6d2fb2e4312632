#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace varpoly {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline Mat columns(const std::vector<Vec>& vs, int dim) {
    Mat M(dim, static_cast<int>(vs.size()));
    for (int j = 0; j < M.cols(); ++j) M.col(j) = vs[static_cast<size_t>(j)];
    return M;
}

inline int rank_of(const Mat& M, double tol) {
    if (M.rows() == 0 || M.cols() == 0) return 0;
    Eigen::ColPivHouseholderQR<Mat> qr(M);
    qr.setThreshold(tol);
    return static_cast<int>(qr.rank());
}

// Orthonormal basis of the column span.  Empty input spans {0} -> dim x 0.
inline Mat orthonormal_span(const Mat& M, double tol) {
    if (M.cols() == 0) return Mat(M.rows(), 0);
    Eigen::ColPivHouseholderQR<Mat> qr(M);
    qr.setThreshold(tol);
    int r = static_cast<int>(qr.rank());
    Mat Q = qr.householderQ() * Mat::Identity(M.rows(), r);
    return Q;
}

inline Mat orthonormal_span(const std::vector<Vec>& vs, int dim, double tol) {
    return orthonormal_span(columns(vs, dim), tol);
}

// Orthonormal basis of ker(A) (A acts by rows: x with A x = 0).
inline Mat nullspace(const Mat& A, double tol) {
    if (A.rows() == 0) return Mat::Identity(A.cols(), A.cols());
    Eigen::FullPivLU<Mat> lu(A);
    lu.setThreshold(tol);
    Mat K = lu.kernel();
    if (lu.dimensionOfKernel() == 0) return Mat(A.cols(), 0);
    return orthonormal_span(K, tol);
}

// Orthonormal basis of the orthogonal complement of span(B) in R^dim.
inline Mat orthogonal_complement(const Mat& B, double tol) {
    if (B.cols() == 0) return Mat::Identity(B.rows(), B.rows());
    return nullspace(B.transpose(), tol);
}

// span(U) and span(V) intersect nontrivially iff rank([U V]) < rank U + rank V.
// Returns a nonzero vector of the intersection if one exists.
inline std::optional<Vec> subspace_intersection_witness(const Mat& U, const Mat& V, double tol) {
    if (U.cols() == 0 || V.cols() == 0) return std::nullopt;
    Mat UV(U.rows(), U.cols() + V.cols());
    UV << U, V;
    Mat K = nullspace(UV, tol);
    for (int j = 0; j < K.cols(); ++j) {
        Vec c = K.col(j);
        Vec w = U * c.head(U.cols());
        if (w.norm() > tol) return w;
    }
    return std::nullopt;
}

// Deterministic uniform sampling independent of the standard library's
// distribution implementations (reports must be byte-identical for a seed).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    Vec ball(int dim, double radius) {
        // rejection-free: direction from uniform cube normalized, radius by
        // the usual r^(1/dim) rule; adequate for probe sampling
        Vec d(dim);
        double n2 = 0;
        do {
            for (int i = 0; i < dim; ++i) d[i] = uniform(-1.0, 1.0);
            n2 = d.squaredNorm();
        } while (n2 < 1e-12);
        double r = radius * std::pow(uniform01(), 1.0 / dim);
        return d * (r / std::sqrt(n2));
    }
    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

}  // namespace varpoly
