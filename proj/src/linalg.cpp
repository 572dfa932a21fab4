// linalg.cpp
#include "mcse/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mcse {

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::herm() const {
    CMatrix m(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
    return m;
}

cplx CMatrix::trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

double CMatrix::frobenius() const {
    double s = 0.0;
    for (const cplx& v : a_) s += std::norm(v);
    return std::sqrt(s);
}

CMatrix& CMatrix::operator+=(const CMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw std::invalid_argument("matrix shape mismatch");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += other.a_[i];
    return *this;
}

CMatrix& CMatrix::operator*=(double s) {
    for (cplx& v : a_) v *= s;
    return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix shape mismatch");
    CMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            cplx aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

CVector matvec(const CMatrix& a, const CVector& x) {
    if (a.cols() != x.size()) throw std::invalid_argument("matvec shape mismatch");
    CVector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

CMatrix outer(const CVector& x, const CVector& y) {
    CMatrix m(x.size(), y.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) m(i, j) = x[i] * std::conj(y[j]);
    return m;
}

cplx vdot(const CVector& x, const CVector& y) {
    if (x.size() != y.size()) throw std::invalid_argument("vdot shape mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return s;
}

double norm2(const CVector& x) {
    double s = 0.0;
    for (const cplx& v : x) s += std::norm(v);
    return std::sqrt(s);
}

CVector normalized(const CVector& x) {
    double n = norm2(x);
    if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
    CVector y(x);
    for (cplx& v : y) v /= n;
    return y;
}

CMatrix diag_load(const CMatrix& m, double delta) {
    CMatrix out = m;
    double load = delta * std::real(m.trace()) / static_cast<double>(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) out(i, i) += load;
    return out;
}

Evd jacobi_evd(const CMatrix& hermitian) {
    const std::size_t n = hermitian.rows();
    if (n == 0 || hermitian.cols() != n) throw std::invalid_argument("evd needs a square matrix");
    CMatrix a = hermitian;
    CMatrix v = CMatrix::identity(n);

    const double tol = 1e-15 * std::max(1.0, a.frobenius());
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        if (std::sqrt(off) <= tol) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                cplx apq = a(p, q);
                double r = std::abs(apq);
                if (r <= tol * 1e-2) continue;
                double app = std::real(a(p, p));
                double aqq = std::real(a(q, q));
                cplx phase = apq / r;  // e^{i phi}

                // rotation zeroing a(p,q): theta from the real Jacobi formula
                double theta = (aqq - app) / (2.0 * r);
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;

                // columns: col_p' = c*col_p - s*conj(phase)*col_q ; col_q' = s*phase*col_p + c*col_q
                for (std::size_t i = 0; i < n; ++i) {
                    cplx aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * std::conj(phase) * aiq;
                    a(i, q) = s * phase * aip + c * aiq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    cplx apj = a(p, j), aqj = a(q, j);
                    a(p, j) = c * apj - s * phase * aqj;
                    a(q, j) = s * std::conj(phase) * apj + c * aqj;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    cplx vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * std::conj(phase) * viq;
                    v(i, q) = s * phase * vip + c * viq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = std::real(a(i, i));
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return diag[x] < diag[y]; });

    Evd out;
    out.eigenvalues.resize(n);
    out.vectors = CMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.eigenvalues[j] = diag[order[j]];
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

CMatrix cholesky(const CMatrix& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("cholesky needs a square matrix");
    CMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = std::real(a(j, j));
        for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
        if (!(d > 0.0)) throw std::runtime_error("matrix not positive definite");
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            cplx s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

namespace {

// L y = b
CVector forward_sub(const CMatrix& l, const CVector& b) {
    const std::size_t n = l.rows();
    CVector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        cplx s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    return y;
}

// L^H x = y
CVector backward_sub_herm(const CMatrix& l, const CVector& y) {
    const std::size_t n = l.rows();
    CVector x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        cplx s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= std::conj(l(k, ii)) * x[k];
        x[ii] = s / std::conj(l(ii, ii));
    }
    return x;
}

}  // namespace

CVector solve_cholesky(const CMatrix& l, const CVector& b) {
    return backward_sub_herm(l, forward_sub(l, b));
}

Gevd gevd(const CMatrix& a, const CMatrix& b) {
    const std::size_t n = a.rows();
    CMatrix l = cholesky(b);

    // C = L^{-1} A L^{-H}, built column by column
    CMatrix m1(n, n);  // L^{-1} A
    for (std::size_t j = 0; j < n; ++j) {
        CVector col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = a(i, j);
        CVector y = forward_sub(l, col);
        for (std::size_t i = 0; i < n; ++i) m1(i, j) = y[i];
    }
    CMatrix m1h = m1.herm();
    CMatrix c(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        CVector col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = m1h(i, j);
        CVector y = forward_sub(l, col);
        for (std::size_t i = 0; i < n; ++i) c(i, j) = y[i];
    }
    c = c.herm();
    // symmetrize against round-off
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            cplx avg = 0.5 * (c(i, j) + std::conj(c(j, i)));
            c(i, j) = avg;
            c(j, i) = std::conj(avg);
        }

    Evd e = jacobi_evd(c);
    Gevd out;
    out.eigenvalues = e.eigenvalues;
    out.vectors = CMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        CVector y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = e.vectors(i, j);
        CVector x = backward_sub_herm(l, y);
        double nx = norm2(x);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = x[i] / nx;
    }
    return out;
}

}  // namespace mcse
