// linalg.hpp — small dense complex linear algebra for per-bin spatial math.
//
// Channel counts are tiny (M <= 8), so everything here is a straightforward
// dense implementation: cyclic Jacobi for Hermitian eigenproblems and
// Cholesky whitening for the generalized problem. No external solver.
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace mcse {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

class CMatrix {
  public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    static CMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cplx& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

    CMatrix herm() const;   // conjugate transpose
    cplx trace() const;
    double frobenius() const;

    CMatrix& operator+=(const CMatrix& other);
    CMatrix& operator*=(double s);

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cplx> a_;
};

CMatrix operator*(const CMatrix& a, const CMatrix& b);
CVector matvec(const CMatrix& a, const CVector& x);

// x y^H outer product
CMatrix outer(const CVector& x, const CVector& y);

// x^H y (conjugates the first argument)
cplx vdot(const CVector& x, const CVector& y);

double norm2(const CVector& x);
CVector normalized(const CVector& x);

// m + delta * tr(m)/n * I  (standard diagonal loading)
CMatrix diag_load(const CMatrix& m, double delta);

// Hermitian eigendecomposition, eigenvalues ascending, eigenvectors in
// matching columns of `vectors`.
struct Evd {
    std::vector<double> eigenvalues;
    CMatrix vectors;
};
Evd jacobi_evd(const CMatrix& hermitian);

// Lower-triangular L with A = L L^H; throws if A is not positive definite.
CMatrix cholesky(const CMatrix& a);

// Solves A x = b given L = cholesky(A).
CVector solve_cholesky(const CMatrix& l, const CVector& b);

// Generalized problem A x = lambda B x for Hermitian A, positive definite B.
// Solved by whitening with the Cholesky factor of B. Eigenvalues ascending;
// eigenvector columns are normalized to unit Euclidean norm.
struct Gevd {
    std::vector<double> eigenvalues;
    CMatrix vectors;
};
Gevd gevd(const CMatrix& a, const CMatrix& b);

}  // namespace mcse
