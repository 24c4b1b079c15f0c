#ifndef EMCERT_TESTS_HELPERS_HPP
#define EMCERT_TESTS_HELPERS_HPP

#include <cmath>
#include <random>

#include "emcert/linalg.hpp"

// Test-only generators and oracles, independent of the library internals they
// are used to check.
namespace emcert::testing {

inline ComplexMatrix random_hermitian(std::mt19937_64& rng, std::size_t dim,
                                      double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        m(i, i) = gauss(rng);
        for (std::size_t j = i + 1; j < dim; ++j) {
            m(i, j) = Complex(gauss(rng), gauss(rng));
            m(j, i) = std::conj(m(i, j));
        }
    }
    return m;
}

inline ComplexMatrix random_psd(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix x(dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) x(i, j) = Complex(gauss(rng), gauss(rng));
    return x * x.adjoint();
}

inline std::vector<Complex> random_unit_vector(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Complex> v(dim);
    double n2 = 0.0;
    for (auto& z : v) {
        z = Complex(gauss(rng), gauss(rng));
        n2 += std::norm(z);
    }
    const double s = 1.0 / std::sqrt(n2);
    for (auto& z : v) z *= s;
    return v;
}

/// Random unitary via Gram-Schmidt on Gaussian columns.
inline ComplexMatrix random_unitary(std::mt19937_64& rng, std::size_t dim) {
    ComplexMatrix u(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        std::vector<Complex> v = random_unit_vector(rng, dim);
        for (std::size_t prev = 0; prev < k; ++prev) {
            Complex overlap = 0;
            for (std::size_t i = 0; i < dim; ++i) overlap += std::conj(u(i, prev)) * v[i];
            for (std::size_t i = 0; i < dim; ++i) v[i] -= overlap * u(i, prev);
        }
        double n2 = 0;
        for (const auto& z : v) n2 += std::norm(z);
        const double s = 1.0 / std::sqrt(n2);
        for (std::size_t i = 0; i < dim; ++i) u(i, k) = v[i] * s;
    }
    return u;
}

/// Independent extreme-eigenvalue oracle: power iteration on (shift*I - A)
/// finds the minimum eigenvalue of a Hermitian A without touching the Jacobi
/// code path.
inline double power_iteration_min_eig(const ComplexMatrix& a, int iters = 2000) {
    // shift beyond the spectral radius so shift*I - A is PSD with its largest
    // eigenvalue at shift - min_eig(A)
    double bound = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < a.dim(); ++j) row += std::abs(a(i, j));
        bound = std::max(bound, row);
    }
    ComplexMatrix shifted(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j)
            shifted(i, j) = (i == j ? Complex(bound, 0) : Complex(0, 0)) - a(i, j);

    std::mt19937_64 rng(12345);
    std::vector<Complex> v = random_unit_vector(rng, a.dim());
    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        std::vector<Complex> w(a.dim(), Complex(0, 0));
        for (std::size_t i = 0; i < a.dim(); ++i)
            for (std::size_t j = 0; j < a.dim(); ++j) w[i] += shifted(i, j) * v[j];
        double n2 = 0;
        for (const auto& z : w) n2 += std::norm(z);
        const double n = std::sqrt(n2);
        if (n == 0.0) return bound;  // A = bound*I
        lambda = 0.0;
        for (std::size_t i = 0; i < a.dim(); ++i)
            lambda += std::real(std::conj(v[i]) * w[i]);
        for (std::size_t i = 0; i < a.dim(); ++i) v[i] = w[i] / n;
    }
    return bound - lambda;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
    return d;
}

}  // namespace emcert::testing

#endif
