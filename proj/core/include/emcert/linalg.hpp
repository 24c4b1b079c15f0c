#ifndef EMCERT_LINALG_HPP
#define EMCERT_LINALG_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include "emcert/errors.hpp"

namespace emcert {

using Complex = std::complex<double>;

/// Dense square complex matrix, row-major. The workhorse for qubit states
/// (2x2) and two-qubit effects (4x4); nothing here assumes dim <= 4 but the
/// eigensolver is only tuned for small matrices.
class ComplexMatrix {
public:
    ComplexMatrix() : dim_(0) {}
    explicit ComplexMatrix(std::size_t dim) : dim_(dim), a_(dim * dim, Complex(0, 0)) {}
    ComplexMatrix(std::size_t dim, std::vector<Complex> entries);

    static ComplexMatrix identity(std::size_t dim);
    static ComplexMatrix zero(std::size_t dim) { return ComplexMatrix(dim); }
    /// Rank-1 projector |v><v| from a (not necessarily normalized) vector.
    static ComplexMatrix outer(const std::vector<Complex>& v);

    std::size_t dim() const { return dim_; }
    Complex& operator()(std::size_t i, std::size_t j) { return a_[i * dim_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }
    const std::vector<Complex>& entries() const { return a_; }

    ComplexMatrix& operator+=(const ComplexMatrix& rhs);
    ComplexMatrix& operator-=(const ComplexMatrix& rhs);
    ComplexMatrix& operator*=(Complex s);

    ComplexMatrix adjoint() const;
    Complex trace() const;
    double frobenius_norm() const;
    /// max_ij |A_ij - conj(A_ji)|
    double hermiticity_defect() const;
    bool is_hermitian(double tol = 1e-12) const { return hermiticity_defect() <= tol; }

private:
    std::size_t dim_;
    std::vector<Complex> a_;
};

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs);
ComplexMatrix operator*(Complex s, ComplexMatrix m);
ComplexMatrix operator*(double s, ComplexMatrix m);

/// Frobenius inner product Tr(A^dagger B); real for Hermitian arguments.
Complex inner(const ComplexMatrix& a, const ComplexMatrix& b);

/// Kronecker product; the (i,j) block of the result is a(i,j)*b.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

struct EigenSystem {
    std::vector<double> values;  // descending
    ComplexMatrix vectors;       // orthonormal columns, vectors(:,k) <-> values[k]
};

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
/// The input is symmetrized (A + A^dagger)/2 first; throws NotHermitianError
/// if the defect exceeds `herm_tol`. Eigenvalues sorted descending; column
/// phases fixed so the first component above 1e-12 is real positive.
EigenSystem eig_hermitian(const ComplexMatrix& a, double herm_tol = 1e-12);

double min_eigenvalue(const ComplexMatrix& a);
double max_eigenvalue(const ComplexMatrix& a);

/// Partial transpose of the second qubit of a 4x4 two-qubit operator.
ComplexMatrix partial_transpose(const ComplexMatrix& a);

/// Trace out the second qubit: 4x4 -> 2x2.
ComplexMatrix partial_trace_b(const ComplexMatrix& a);
/// Trace out the first qubit: 4x4 -> 2x2.
ComplexMatrix partial_trace_a(const ComplexMatrix& a);

/// min eigenvalue >= -tol.
bool is_psd(const ComplexMatrix& a, double tol);

/// Principal square root of a PSD matrix. Eigenvalues in [-1e-10, 0) are
/// clamped to zero; anything below that throws NotPsdError.
ComplexMatrix psd_sqrt(const ComplexMatrix& a);

/// Pseudo-inverse square root: eigenvalues <= tol contribute nothing.
/// If the matrix is rank-deficient at `tol`, it is regularized as A + tol*I
/// before inversion so downstream congruences stay bounded.
ComplexMatrix psd_inv_sqrt(const ComplexMatrix& a, double tol = 1e-12);

}  // namespace emcert

#endif
