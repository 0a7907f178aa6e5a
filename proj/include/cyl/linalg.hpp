#pragma once

#include <complex>
#include <vector>

namespace cyl {

using Cplx = std::complex<double>;

// Small dense complex matrix, row-major. Group factors are d <= ~8, so
// everything here is written for small fixed cost, not asymptotics.
class Mat {
  public:
    Mat() = default;
    explicit Mat(int dim) : dim_(dim), a_(static_cast<size_t>(dim) * dim) {}

    static Mat identity(int dim) {
        Mat m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    int dim() const { return dim_; }
    Cplx& operator()(int r, int c) { return a_[static_cast<size_t>(r) * dim_ + c]; }
    const Cplx& operator()(int r, int c) const { return a_[static_cast<size_t>(r) * dim_ + c]; }

    Mat operator*(const Mat& o) const;
    Mat transpose() const;
    Mat conj_transpose() const;

    double frobenius() const;
    double max_abs() const;
    bool finite() const;

  private:
    int dim_ = 0;
    std::vector<Cplx> a_;
};

Mat inverse(const Mat& m);                        // Gauss-Jordan with partial pivoting
Cplx determinant(const Mat& m);
std::vector<Cplx> solve(const Mat& m, std::vector<Cplx> rhs);

// Singular values, descending. One-sided Jacobi (column orthogonalization),
// so small singular values keep relative accuracy even at large condition
// numbers; no Gram matrix is formed.
std::vector<double> singular_values(const Mat& m);

// Singular values of a 2x2 via the characteristic polynomial of A^H A.
// Squares the condition number; kept as an independent cross-check route.
std::vector<double> singular_values_2x2_gram(const Mat& m);

// Eigenvalues, sorted by descending modulus. d <= 4: characteristic
// polynomial (Faddeev-LeVerrier) + Durand-Kerner with Newton polish;
// d > 4: complex Hessenberg reduction + shifted QR.
std::vector<Cplx> eigenvalues(const Mat& m);

std::vector<Cplx> eigenvalues_qr(const Mat& m);   // QR route exposed for cross-checks

// Unit eigenvector for a (separated) eigenvalue; first nonzero coordinate
// made positive real. Throws NumericError if the residual ||Av - lambda v||
// stays above tol * ||A||.
std::vector<Cplx> eigenvector(const Mat& m, Cplx lambda, double tol = 1e-8);

// --- small real symmetric helpers (used by the cone module) ---

// Eigenvalues of a symmetric matrix via cyclic Jacobi, ascending.
std::vector<double> sym_eigenvalues(std::vector<std::vector<double>> s);
double sym_determinant(const std::vector<std::vector<double>>& s);
// Cholesky factor L (lower) with A = L L^T; throws NumericError if not SPD.
std::vector<std::vector<double>> cholesky(std::vector<std::vector<double>> a);
std::vector<std::vector<double>> mat_inverse_spd(const std::vector<std::vector<double>>& a);

}  // namespace cyl
