#include <doctest.h>

#include <random>

#include "emcert/linalg.hpp"
#include "helpers.hpp"

using namespace emcert;
using namespace emcert::testing;

namespace {

const ComplexMatrix kSigmaX(2, {0, 1, 1, 0});
const ComplexMatrix kSigmaZ(2, {1, 0, 0, -1});

ComplexMatrix phi_plus_projector() {
    const double r = 1.0 / std::sqrt(2.0);
    return ComplexMatrix::outer({r, 0, 0, r});
}

}  // namespace

TEST_CASE("kron on closed-form inputs") {
    const ComplexMatrix zz = kron(kSigmaZ, kSigmaZ);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const double expected = i == j ? (i == 0 || i == 3 ? 1.0 : -1.0) : 0.0;
            CHECK(std::abs(zz(i, j) - Complex(expected, 0)) == 0.0);
        }

    CHECK(max_abs_diff(kron(ComplexMatrix::identity(2), ComplexMatrix::identity(2)),
                       ComplexMatrix::identity(4)) == 0.0);

    const ComplexMatrix p0 = ComplexMatrix::outer({1, 0});
    const ComplexMatrix p00 = kron(p0, p0);
    CHECK(p00(0, 0) == Complex(1, 0));
    CHECK(p00.trace() == Complex(1, 0));
}

TEST_CASE("kron block structure on random inputs") {
    std::mt19937_64 rng(11);
    const ComplexMatrix a = random_hermitian(rng, 2);
    const ComplexMatrix b = random_hermitian(rng, 3);
    const ComplexMatrix k = kron(a, b);
    REQUIRE(k.dim() == 6);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int p = 0; p < 3; ++p)
                for (int q = 0; q < 3; ++q)
                    CHECK(std::abs(k(3 * i + p, 3 * j + q) - a(i, j) * b(p, q)) < 1e-15);
}

TEST_CASE("eig_hermitian diagonal and Pauli spectra") {
    const EigenSystem d = eig_hermitian(ComplexMatrix(2, {1, 0, 0, 2}));
    CHECK(d.values[0] == doctest::Approx(2).epsilon(1e-14));
    CHECK(d.values[1] == doctest::Approx(1).epsilon(1e-14));

    const EigenSystem x = eig_hermitian(kSigmaX);
    CHECK(x.values[0] == doctest::Approx(1).epsilon(1e-13));
    CHECK(x.values[1] == doctest::Approx(-1).epsilon(1e-13));
}

TEST_CASE("partial transpose of the Bell projector, with independent oracles") {
    const ComplexMatrix phi = phi_plus_projector();
    const ComplexMatrix pt = partial_transpose(phi);

    // elementwise index-bookkeeping oracle
    ComplexMatrix expected(4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    expected(2 * i + l, 2 * k + j) = phi(2 * i + j, 2 * k + l);
    CHECK(max_abs_diff(pt, expected) == 0.0);

    // SWAP/2: one half at (0,0),(3,3),(1,2),(2,1)
    CHECK(std::abs(pt(0, 0) - Complex(0.5, 0)) < 1e-15);
    CHECK(std::abs(pt(3, 3) - Complex(0.5, 0)) < 1e-15);
    CHECK(std::abs(pt(1, 2) - Complex(0.5, 0)) < 1e-15);
    CHECK(std::abs(pt(2, 1) - Complex(0.5, 0)) < 1e-15);
    CHECK(pt(0, 3) == Complex(0, 0));

    // min eigenvalue -1/2, checked against the power-iteration oracle
    const double oracle = power_iteration_min_eig(pt);
    CHECK(oracle == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(min_eigenvalue(pt) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(std::abs(min_eigenvalue(pt) - oracle) < 1e-8);
}

TEST_CASE("partial transpose basics") {
    CHECK(max_abs_diff(partial_transpose(ComplexMatrix::identity(4)),
                       ComplexMatrix::identity(4)) == 0.0);

    std::mt19937_64 rng(3);
    const ComplexMatrix a = random_hermitian(rng, 2);
    const ComplexMatrix b = random_hermitian(rng, 2);
    ComplexMatrix bt(2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) bt(i, j) = b(j, i);
    CHECK(max_abs_diff(partial_transpose(kron(a, b)), kron(a, bt)) < 1e-15);

    CHECK_THROWS_AS(partial_transpose(ComplexMatrix::identity(2)), WrongDimensionError);
}

TEST_CASE("partial traces") {
    std::mt19937_64 rng(5);
    const ComplexMatrix a = random_hermitian(rng, 2);
    const ComplexMatrix b = random_hermitian(rng, 2);
    const Complex trb = b.trace();
    CHECK(max_abs_diff(partial_trace_b(kron(a, b)), trb * a) < 1e-14);
    const Complex tra = a.trace();
    CHECK(max_abs_diff(partial_trace_a(kron(a, b)), tra * b) < 1e-14);

    // |phi+><phi+| -> I/2 by direct index sum
    const ComplexMatrix phi = phi_plus_projector();
    ComplexMatrix direct(2);
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            for (int bb = 0; bb < 2; ++bb) direct(i, k) += phi(2 * i + bb, 2 * k + bb);
    CHECK(max_abs_diff(partial_trace_b(phi), direct) == 0.0);
    CHECK(max_abs_diff(direct, 0.5 * ComplexMatrix::identity(2)) < 1e-15);

    CHECK(max_abs_diff(partial_trace_b(ComplexMatrix::identity(4)),
                       2.0 * ComplexMatrix::identity(2)) == 0.0);

    // trace preservation
    const ComplexMatrix h = random_hermitian(rng, 4);
    CHECK(std::abs(partial_trace_b(h).trace() - h.trace()) < 1e-12);

    CHECK_THROWS_AS(partial_trace_b(ComplexMatrix::identity(2)), WrongDimensionError);
}

TEST_CASE("is_psd") {
    CHECK(is_psd(ComplexMatrix::identity(4), 1e-10));
    CHECK_FALSE(is_psd(Complex(-1, 0) * ComplexMatrix::identity(2), 1e-10));
    CHECK(is_psd(phi_plus_projector(), 1e-10));
}

TEST_CASE("psd_sqrt closed forms") {
    CHECK(max_abs_diff(psd_sqrt(ComplexMatrix::identity(4)), ComplexMatrix::identity(4)) <
          1e-12);
    CHECK(max_abs_diff(psd_sqrt(ComplexMatrix(2, {4, 0, 0, 1})),
                       ComplexMatrix(2, {2, 0, 0, 1})) < 1e-12);

    // rank-1 spectral oracle: sqrt(4 P) = 2 P for a projector P
    const ComplexMatrix phi = phi_plus_projector();
    CHECK(max_abs_diff(psd_sqrt(4.0 * phi), 2.0 * phi) < 1e-10);

    CHECK_THROWS_AS(psd_sqrt(Complex(-1, 0) * ComplexMatrix::identity(2)), NotPsdError);
}

TEST_CASE("eig rejects genuinely non-Hermitian input but accepts drift") {
    ComplexMatrix bad = ComplexMatrix::identity(2);
    bad(0, 1) = Complex(0.5, 0);
    CHECK_THROWS_AS(eig_hermitian(bad), NotHermitianError);

    std::mt19937_64 rng(17);
    ComplexMatrix drift = random_hermitian(rng, 4);
    drift(0, 1) += Complex(1e-13, 1e-13);
    const EigenSystem es = eig_hermitian(drift);  // symmetrized internally
    CHECK(es.values.size() == 4);
}

TEST_CASE("eigendecomposition property suite: 1000 random Hermitian 4x4") {
    std::mt19937_64 rng(2024);
    double worst_residual = 0.0, worst_ortho = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const ComplexMatrix a = random_hermitian(rng, 4);
        const EigenSystem es = eig_hermitian(a);

        ComplexMatrix recon(4);
        for (int k = 0; k < 4; ++k)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    recon(i, j) += es.values[k] * es.vectors(i, k) * std::conj(es.vectors(j, k));
        worst_residual = std::max(worst_residual, max_abs_diff(recon, a));

        const ComplexMatrix gram = es.vectors.adjoint() * es.vectors;
        worst_ortho = std::max(worst_ortho, max_abs_diff(gram, ComplexMatrix::identity(4)));

        for (int k = 0; k + 1 < 4; ++k) CHECK(es.values[k] >= es.values[k + 1]);
    }
    CHECK(worst_residual <= 1e-10);
    CHECK(worst_ortho <= 1e-10);
}

TEST_CASE("partial transpose is an involution on random operators") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const ComplexMatrix a = random_hermitian(rng, 4);
        CHECK(max_abs_diff(partial_transpose(partial_transpose(a)), a) == 0.0);
    }
}

TEST_CASE("psd_sqrt squares back on random PSD matrices") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const ComplexMatrix x = random_psd(rng, 4);
        const ComplexMatrix r = psd_sqrt(x);
        CHECK(max_abs_diff(r * r, x) <= 1e-8);
        CHECK(r.hermiticity_defect() < 1e-12);
    }
}

TEST_CASE("psd_inv_sqrt inverts on the support") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const ComplexMatrix x = random_psd(rng, 4);
        const ComplexMatrix t = psd_inv_sqrt(x);
        // t x t should be the identity when x is full rank (generic case)
        CHECK(max_abs_diff(t * x * t, ComplexMatrix::identity(4)) < 1e-8);
    }

    // rank-deficient input: regularized, finite output
    const ComplexMatrix rank1 = ComplexMatrix::outer({1, 0, 0, 0});
    const ComplexMatrix t = psd_inv_sqrt(rank1);
    CHECK(t.frobenius_norm() < 2e6);  // bounded by the 1e-12 regularization
}

TEST_CASE("deterministic eigenvector phase and tie-breaking") {
    const ComplexMatrix zero(4);
    const EigenSystem es = eig_hermitian(zero);
    // identity eigenvectors in stable order
    CHECK(max_abs_diff(es.vectors, ComplexMatrix::identity(4)) == 0.0);

    std::mt19937_64 rng(31);
    const ComplexMatrix a = random_hermitian(rng, 4);
    const EigenSystem e1 = eig_hermitian(a);
    const EigenSystem e2 = eig_hermitian(a);
    CHECK(max_abs_diff(e1.vectors, e2.vectors) == 0.0);
    // phase fix: first sizable component of each column is real positive
    for (int k = 0; k < 4; ++k) {
        for (int i = 0; i < 4; ++i) {
            if (std::abs(e1.vectors(i, k)) > 1e-12) {
                CHECK(e1.vectors(i, k).imag() == doctest::Approx(0.0).epsilon(1e-14));
                CHECK(e1.vectors(i, k).real() > 0);
                break;
            }
        }
    }
}
