#include "emcert/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace emcert {

namespace {

constexpr double kJacobiOffdiagTol = 1e-13;  // Frobenius norm of off-diagonal part
constexpr int kJacobiMaxSweeps = 100;
constexpr double kSqrtClampTol = 1e-10;

double offdiag_norm(const ComplexMatrix& m) {
    double s = 0;
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j < m.dim(); ++j)
            if (i != j) s += std::norm(m(i, j));
    return std::sqrt(s);
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t dim, std::vector<Complex> entries)
    : dim_(dim), a_(std::move(entries)) {
    if (a_.size() != dim_ * dim_)
        throw WrongDimensionError("ComplexMatrix: entries length must equal dim^2");
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1;
    return m;
}

ComplexMatrix ComplexMatrix::outer(const std::vector<Complex>& v) {
    ComplexMatrix m(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * std::conj(v[j]);
    return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
    if (rhs.dim_ != dim_) throw WrongDimensionError("matrix add: dimension mismatch");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += rhs.a_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
    if (rhs.dim_ != dim_) throw WrongDimensionError("matrix sub: dimension mismatch");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= rhs.a_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
    for (auto& z : a_) z *= s;
    return *this;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix m(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

Complex ComplexMatrix::trace() const {
    Complex t = 0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0;
    for (const auto& z : a_) s += std::norm(z);
    return std::sqrt(s);
}

double ComplexMatrix::hermiticity_defect() const {
    double d = 0;
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = i; j < dim_; ++j)
            d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return d;
}

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }

ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
    if (lhs.dim() != rhs.dim()) throw WrongDimensionError("matrix mul: dimension mismatch");
    const std::size_t n = lhs.dim();
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const Complex lik = lhs(i, k);
            if (lik == Complex(0, 0)) continue;
            for (std::size_t j = 0; j < n; ++j) m(i, j) += lik * rhs(k, j);
        }
    return m;
}

ComplexMatrix operator*(Complex s, ComplexMatrix m) { return m *= s; }
ComplexMatrix operator*(double s, ComplexMatrix m) { return m *= Complex(s, 0); }

Complex inner(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw WrongDimensionError("inner: dimension mismatch");
    Complex s = 0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) s += std::conj(a(i, j)) * b(i, j);
    return s;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t na = a.dim(), nb = b.dim();
    ComplexMatrix m(na * nb);
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j) {
            const Complex aij = a(i, j);
            if (aij == Complex(0, 0)) continue;
            for (std::size_t k = 0; k < nb; ++k)
                for (std::size_t l = 0; l < nb; ++l)
                    m(i * nb + k, j * nb + l) = aij * b(k, l);
        }
    return m;
}

EigenSystem eig_hermitian(const ComplexMatrix& a, double herm_tol) {
    if (!a.is_hermitian(herm_tol))
        throw NotHermitianError("eig_hermitian: hermiticity defect above tolerance");
    const std::size_t n = a.dim();

    // Symmetrize to absorb floating-point drift from repeated products.
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));

    ComplexMatrix v = ComplexMatrix::identity(n);

    int sweep = 0;
    while (offdiag_norm(m) > kJacobiOffdiagTol && sweep < kJacobiMaxSweeps) {
        ++sweep;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = m(p, q);
                const double mag = std::abs(apq);
                if (mag == 0.0) continue;
                // 2x2 Hermitian sub-block: conjugate by diag(1, e^{-i phi}) to make
                // the pivot real, then apply the classic real Jacobi rotation.
                const Complex phase = apq / mag;
                const double app = m(p, p).real();
                const double aqq = m(q, q).real();
                const double theta = (aqq - app) / (2.0 * mag);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                // Column rotation U: e_p -> c e_p - s conj(phase) e_q,
                //                    e_q -> s phase e_p + c e_q.
                const Complex up = s * phase;
                for (std::size_t i = 0; i < n; ++i) {
                    const Complex mip = m(i, p), miq = m(i, q);
                    m(i, p) = c * mip - std::conj(up) * miq;
                    m(i, q) = up * mip + c * miq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const Complex mpj = m(p, j), mqj = m(q, j);
                    m(p, j) = c * mpj - up * mqj;
                    m(q, j) = std::conj(up) * mpj + c * mqj;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const Complex vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - std::conj(up) * viq;
                    v(i, q) = up * vip + c * viq;
                }
                m(p, q) = 0;
                m(q, p) = 0;
            }
        }
    }

    // Stable descending order keeps the Jacobi output order among ties.
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&m](std::size_t i, std::size_t j) {
        return m(i, i).real() > m(j, j).real();
    });

    EigenSystem out;
    out.values.resize(n);
    out.vectors = ComplexMatrix(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = m(idx[k], idx[k]).real();
        // phase fix: first component with modulus > 1e-12 made real positive
        Complex ph(1, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const Complex vi = v(i, idx[k]);
            if (std::abs(vi) > 1e-12) {
                ph = std::conj(vi) / std::abs(vi);
                break;
            }
        }
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = ph * v(i, idx[k]);
    }
    return out;
}

double min_eigenvalue(const ComplexMatrix& a) {
    return eig_hermitian(a).values.back();
}

double max_eigenvalue(const ComplexMatrix& a) {
    return eig_hermitian(a).values.front();
}

ComplexMatrix partial_transpose(const ComplexMatrix& a) {
    if (a.dim() != 4) throw WrongDimensionError("partial_transpose: expects a 4x4 operator");
    ComplexMatrix m(4);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k)
                for (std::size_t l = 0; l < 2; ++l)
                    m(2 * i + l, 2 * k + j) = a(2 * i + j, 2 * k + l);
    return m;
}

ComplexMatrix partial_trace_b(const ComplexMatrix& a) {
    if (a.dim() != 4) throw WrongDimensionError("partial_trace_b: expects a 4x4 operator");
    ComplexMatrix m(2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t k = 0; k < 2; ++k)
            for (std::size_t b = 0; b < 2; ++b) m(i, k) += a(2 * i + b, 2 * k + b);
    return m;
}

ComplexMatrix partial_trace_a(const ComplexMatrix& a) {
    if (a.dim() != 4) throw WrongDimensionError("partial_trace_a: expects a 4x4 operator");
    ComplexMatrix m(2);
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t l = 0; l < 2; ++l)
            for (std::size_t c = 0; c < 2; ++c) m(j, l) += a(2 * c + j, 2 * c + l);
    return m;
}

bool is_psd(const ComplexMatrix& a, double tol) {
    return min_eigenvalue(a) >= -tol;
}

ComplexMatrix psd_sqrt(const ComplexMatrix& a) {
    const EigenSystem es = eig_hermitian(a, 1e-10);
    const std::size_t n = a.dim();
    ComplexMatrix m(n);
    for (std::size_t k = 0; k < n; ++k) {
        double lam = es.values[k];
        if (lam < -kSqrtClampTol)
            throw NotPsdError("psd_sqrt: eigenvalue below clamp threshold");
        if (lam < 0) lam = 0;
        const double r = std::sqrt(lam);
        if (r == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                m(i, j) += r * es.vectors(i, k) * std::conj(es.vectors(j, k));
    }
    return m;
}

ComplexMatrix psd_inv_sqrt(const ComplexMatrix& a, double tol) {
    EigenSystem es = eig_hermitian(a, 1e-10);
    const std::size_t n = a.dim();
    if (es.values.back() < tol) {
        // rank-deficient normalizer: regularize before inverting
        ComplexMatrix reg = a;
        for (std::size_t i = 0; i < n; ++i) reg(i, i) += tol;
        es = eig_hermitian(reg, 1e-10);
    }
    ComplexMatrix m(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lam = es.values[k];
        if (lam <= tol) continue;
        const double r = 1.0 / std::sqrt(lam);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                m(i, j) += r * es.vectors(i, k) * std::conj(es.vectors(j, k));
    }
    return m;
}

}  // namespace emcert
