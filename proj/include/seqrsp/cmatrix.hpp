#pragma once

// Dense complex matrix kernel for 2x2 and 4x4 Hermitian operators: products,
// tensor products, partial trace, Hermitian eigendecomposition and PSD square
// root. Everything is fixed-size, value-semantic and allocation-free.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace seqrsp {

using cplx = std::complex<double>;

// Hermiticity is enforced entrywise to this absolute tolerance.
inline constexpr double kHermitianTol = 1e-12;
// Sharp measurement operators carry exact zero eigenvalues; this floor
// absorbs the rounding they pick up.
inline constexpr double kPsdTol = -1e-10;

template <int N>
class CMatrix {
    static_assert(N == 2 || N == 4, "kernel supports 2x2 and 4x4 operators only");

public:
    constexpr CMatrix() : a_{} {}

    static CMatrix identity() {
        CMatrix m;
        for (int i = 0; i < N; ++i) m(i, i) = 1.0;
        return m;
    }

    static constexpr int dim() { return N; }

    cplx& operator()(int r, int c) { return a_[r * N + c]; }
    const cplx& operator()(int r, int c) const { return a_[r * N + c]; }

    CMatrix& operator+=(const CMatrix& o) {
        for (int i = 0; i < N * N; ++i) a_[i] += o.a_[i];
        return *this;
    }
    CMatrix& operator-=(const CMatrix& o) {
        for (int i = 0; i < N * N; ++i) a_[i] -= o.a_[i];
        return *this;
    }
    CMatrix& operator*=(const cplx& s) {
        for (auto& x : a_) x *= s;
        return *this;
    }

    friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
    friend CMatrix operator*(CMatrix a, const cplx& s) { return a *= s; }
    friend CMatrix operator*(const cplx& s, CMatrix a) { return a *= s; }

    friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
        CMatrix r;
        for (int i = 0; i < N; ++i)
            for (int k = 0; k < N; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx{}) continue;
                for (int j = 0; j < N; ++j) r(i, j) += aik * b(k, j);
            }
        return r;
    }

    CMatrix adjoint() const {
        CMatrix r;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) r(i, j) = std::conj((*this)(j, i));
        return r;
    }

    CMatrix conjugate() const {
        CMatrix r;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) r(i, j) = std::conj((*this)(i, j));
        return r;
    }

    cplx trace() const {
        cplx t{};
        for (int i = 0; i < N; ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs_diff(const CMatrix& o) const {
        double m = 0.0;
        for (int i = 0; i < N * N; ++i) m = std::max(m, std::abs(a_[i] - o.a_[i]));
        return m;
    }

    bool is_hermitian(double tol = kHermitianTol) const {
        for (int i = 0; i < N; ++i)
            for (int j = i; j < N; ++j)
                if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
        return true;
    }

private:
    std::array<cplx, N * N> a_;
};

using CMat2 = CMatrix<2>;
using CMat4 = CMatrix<4>;

template <int N>
using CVector = std::array<cplx, N>;

using CVec2 = CVector<2>;
using CVec4 = CVector<4>;

// --- vector helpers ------------------------------------------------------

template <int N>
cplx inner(const CVector<N>& u, const CVector<N>& v) {
    cplx s{};
    for (int i = 0; i < N; ++i) s += std::conj(u[i]) * v[i];
    return s;
}

template <int N>
double norm(const CVector<N>& u) {
    return std::sqrt(std::real(inner(u, u)));
}

// |u><u|
template <int N>
CMatrix<N> outer(const CVector<N>& u) {
    CMatrix<N> r;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) r(i, j) = u[i] * std::conj(u[j]);
    return r;
}

template <int N>
CVector<N> matvec(const CMatrix<N>& m, const CVector<N>& v) {
    CVector<N> r{};
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) r[i] += m(i, j) * v[j];
    return r;
}

// <v|M|v>, real part (exact for Hermitian M)
template <int N>
double expectation(const CMatrix<N>& m, const CVector<N>& v) {
    return std::real(inner(v, matvec(m, v)));
}

inline CVec4 kron_vec(const CVec2& a, const CVec2& b) {
    return {a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]};
}

// --- Pauli operators ------------------------------------------------------

inline CMat2 pauli_x() {
    CMat2 m;
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return m;
}

inline CMat2 pauli_y() {
    CMat2 m;
    m(0, 1) = cplx(0.0, -1.0);
    m(1, 0) = cplx(0.0, 1.0);
    return m;
}

inline CMat2 pauli_z() {
    CMat2 m;
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

// --- tensor structure -----------------------------------------------------

// Tensor product with basis order |00>,|01>,|10>,|11>: row index = 2*i_a + i_b.
inline CMat4 kron(const CMat2& a, const CMat2& b) {
    CMat4 r;
    for (int ia = 0; ia < 2; ++ia)
        for (int ja = 0; ja < 2; ++ja)
            for (int ib = 0; ib < 2; ++ib)
                for (int jb = 0; jb < 2; ++jb)
                    r(2 * ia + ib, 2 * ja + jb) = a(ia, ja) * b(ib, jb);
    return r;
}

// Trace out the second tensor factor.
inline CMat2 partial_trace_second(const CMat4& rho) {
    CMat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r(i, j) = rho(2 * i, 2 * j) + rho(2 * i + 1, 2 * j + 1);
    return r;
}

// (1 (x) B) rho (1 (x) B^dagger), computed blockwise.
inline CMat4 sandwich_second(const CMat4& rho, const CMat2& b) {
    const CMat2 bd = b.adjoint();
    CMat4 r;
    for (int ia = 0; ia < 2; ++ia)
        for (int ja = 0; ja < 2; ++ja) {
            CMat2 blk;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) blk(i, j) = rho(2 * ia + i, 2 * ja + j);
            const CMat2 t = b * blk * bd;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) r(2 * ia + i, 2 * ja + j) = t(i, j);
        }
    return r;
}

// --- Hermitian eigendecomposition ----------------------------------------

template <int N>
struct EigResult {
    std::array<double, N> values;  // ascending
    CMatrix<N> vectors;            // columns; A = V diag(values) V^dagger
};

// Cyclic Jacobi with complex plane rotations. Dimensions here are tiny, so a
// fixed sweep cap with an off-diagonal norm target of 1e-13 is plenty.
template <int N>
EigResult<N> eigh(const CMatrix<N>& m) {
    if (!m.is_hermitian())
        throw std::invalid_argument("eigh: matrix is not Hermitian");

    CMatrix<N> a = m;
    CMatrix<N> v = CMatrix<N>::identity();

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < N; ++p)
            for (int q = p + 1; q < N; ++q) off += std::norm(a(p, q));
        if (std::sqrt(off) < 1e-13) break;

        for (int p = 0; p < N; ++p) {
            for (int q = p + 1; q < N; ++q) {
                const double mag = std::abs(a(p, q));
                if (mag < 1e-60) continue;
                const cplx phase = a(p, q) / mag;  // a_pq = mag * phase

                // Rotation angle that annihilates the phased 2x2 pivot: the
                // smaller-magnitude root of t^2 - 2*tau*t - 1 = 0.
                const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
                const double t = (tau >= 0.0 ? -1.0 : 1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                // J mixes columns p,q:  col_p' = c*col_p + s*conj(phase)*col_q,
                //                       col_q' = -s*col_p + c*conj(phase)*col_q.
                const cplx sp = s * std::conj(phase);
                const cplx cp = c * std::conj(phase);

                for (int k = 0; k < N; ++k) {  // rows: J^dagger A
                    const cplx akp = a(p, k), akq = a(q, k);
                    a(p, k) = c * akp + s * phase * akq;
                    a(q, k) = -s * akp + c * phase * akq;
                }
                for (int k = 0; k < N; ++k) {  // columns: A J
                    const cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp + sp * akq;
                    a(k, q) = -s * akp + cp * akq;
                }
                for (int k = 0; k < N; ++k) {  // accumulate V J
                    const cplx vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp + sp * vkq;
                    v(k, q) = -s * vkp + cp * vkq;
                }
            }
        }
    }

    EigResult<N> r;
    std::array<int, N> order{};
    for (int i = 0; i < N; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });
    for (int i = 0; i < N; ++i) {
        r.values[i] = a(order[i], order[i]).real();
        for (int k = 0; k < N; ++k) r.vectors(k, i) = v(k, order[i]);
    }
    return r;
}

template <int N>
std::array<double, N> eigvals_hermitian(const CMatrix<N>& m) {
    return eigh(m).values;
}

// Principal square root of a Hermitian PSD matrix.
template <int N>
CMatrix<N> sqrt_psd(const CMatrix<N>& m) {
    const auto eig = eigh(m);
    for (double w : eig.values)
        if (w < kPsdTol)
            throw std::domain_error("sqrt_psd: matrix has a negative eigenvalue (" +
                                    std::to_string(w) + ")");
    CMatrix<N> r;
    for (int i = 0; i < N; ++i) {
        const double w = std::sqrt(std::max(eig.values[i], 0.0));
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k)
                r(j, k) += w * eig.vectors(j, i) * std::conj(eig.vectors(k, i));
    }
    return r;
}

template <int N>
bool is_psd(const CMatrix<N>& m, double tol = kPsdTol) {
    const auto vals = eigvals_hermitian(m);
    return vals[0] >= tol;
}

}  // namespace seqrsp
