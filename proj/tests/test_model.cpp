#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "emcert/model.hpp"
#include "helpers.hpp"

using namespace emcert;
using namespace emcert::testing;

namespace {

double bra_ket(const std::vector<Complex>& v, const ComplexMatrix& rho) {
    Complex s = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) s += std::conj(v[i]) * rho(i, j) * v[j];
    return s.real();
}

}  // namespace

TEST_CASE("trigonal preparations") {
    const PreparationFamily f = trigonal_preparations();
    REQUIRE(f.size() == 3);

    // theta = 0 is |0><0|
    CHECK(std::abs(f.states[0].density(0, 0) - Complex(1, 0)) < 1e-15);

    // <0|rho_1|0> = 1/4 (appendix characterization)
    CHECK(f.states[1].density(0, 0).real() == doctest::Approx(0.25).epsilon(1e-12));

    // index 2: <0|rho|0> = cos^2(theta/2) = 1/4 and <+|rho|+> = (1+sin theta)/2
    const double theta2 = 4.0 * std::numbers::pi / 3.0;
    CHECK(f.states[2].density(0, 0).real() == doctest::Approx(0.25).epsilon(1e-12));
    const double r = 1.0 / std::numbers::sqrt2;
    const double plus = bra_ket({r, r}, f.states[2].density);
    CHECK(plus == doctest::Approx((1.0 + std::sin(theta2)) / 2.0).epsilon(1e-12));
    CHECK(plus == doctest::Approx((1.0 - std::sqrt(3.0) / 2.0) / 2.0).epsilon(1e-12));

    for (const auto& s : f.states) {
        CHECK(std::abs(s.density.trace() - Complex(1, 0)) < 1e-12);
        CHECK(min_eigenvalue(s.density) > -1e-12);
        const ComplexMatrix sq = s.density * s.density;
        CHECK(std::abs(sq.trace() - Complex(1, 0)) < 1e-12);  // purity
    }
}

TEST_CASE("ideal partial BSM") {
    const MeasurementAssembly bsm = partial_bsm_ideal();
    REQUIRE(bsm.n_settings() == 1);
    REQUIRE(bsm.n_outcomes() == 3);
    bsm.validate();

    // <00|M1|00> = 1/2
    CHECK(bsm.settings()[0][0](0, 0).real() == doctest::Approx(0.5).epsilon(1e-14));

    // M3 has rank 2
    const EigenSystem es = eig_hermitian(bsm.settings()[0][2]);
    int rank = 0;
    for (double v : es.values)
        if (v > 1e-9) ++rank;
    CHECK(rank == 2);

    CHECK(classify_effect(bsm.settings()[0][0]) == EffectClass::EntangledEffect);
    CHECK(classify_effect(bsm.settings()[0][1]) == EffectClass::EntangledEffect);
    CHECK(classify_effect(bsm.settings()[0][2]) == EffectClass::SeparableEffect);
}

TEST_CASE("noisy partial BSM") {
    SUBCASE("V=1 reproduces the ideal measurement") {
        const MeasurementAssembly noisy = partial_bsm_noisy(VisibilityModel{1.0});
        const MeasurementAssembly ideal = partial_bsm_ideal();
        for (int c = 0; c < 3; ++c)
            CHECK(max_abs_diff(noisy.settings()[0][c], ideal.settings()[0][c]) < 1e-14);
    }

    SUBCASE("valid assembly across the visibility range") {
        for (double v : {0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0})
            partial_bsm_noisy(VisibilityModel{v}).validate();
    }

    SUBCASE("V=0 effects are separable") {
        const MeasurementAssembly m = partial_bsm_noisy(VisibilityModel{0.0});
        CHECK(classify_effect(m.settings()[0][0]) == EffectClass::SeparableEffect);
        CHECK(classify_effect(m.settings()[0][1]) == EffectClass::SeparableEffect);
        CHECK(classify_effect(m.settings()[0][2]) == EffectClass::SeparableEffect);
    }

    SUBCASE("Bell-mixture decomposition of the first effect") {
        // M1(V) = V |phi+><phi+| + (1-V)/2 (|phi-><phi-| + |psi+><psi+|)
        const double v = 0.37;
        const MeasurementAssembly m = partial_bsm_noisy(VisibilityModel{v});
        const ComplexMatrix mix =
            v * ComplexMatrix::outer(bell_phi_plus()) +
            (0.5 * (1.0 - v)) *
                (ComplexMatrix::outer(bell_phi_minus()) + ComplexMatrix::outer(bell_psi_plus()));
        CHECK(max_abs_diff(m.settings()[0][0], mix) < 1e-14);
    }

    SUBCASE("probabilities follow the damped interference closed form") {
        const PreparationFamily a = trigonal_preparations(Party::A);
        const PreparationFamily b = trigonal_preparations(Party::B);
        for (double v : {0.0, 0.4, 0.85, 1.0}) {
            const ProbabilityTable t = born_table(a, b, partial_bsm_noisy(VisibilityModel{v}));
            for (int x = 0; x < 3; ++x)
                for (int y = 0; y < 3; ++y) {
                    const double alpha = 2.0 * std::numbers::pi * x / 3.0;
                    const double beta = 2.0 * std::numbers::pi * y / 3.0;
                    CHECK(t.at(0, x, y, 0) ==
                          doctest::Approx((1.0 + v * std::cos(alpha - beta)) / 4.0)
                              .epsilon(1e-12));
                    CHECK(t.at(1, x, y, 0) ==
                          doctest::Approx((1.0 + v * std::cos(alpha + beta)) / 4.0)
                              .epsilon(1e-12));
                }
        }
    }

    SUBCASE("visibility out of range") {
        CHECK_THROWS_AS(partial_bsm_noisy(VisibilityModel{1.2}), VisibilityOutOfRangeError);
        CHECK_THROWS_AS(partial_bsm_noisy(VisibilityModel{-0.1}), VisibilityOutOfRangeError);
    }
}

TEST_CASE("unentangled POVM pair") {
    const MeasurementAssembly m = unentangled_povm_pair();
    REQUIRE(m.n_settings() == 2);
    REQUIRE(m.n_outcomes() == 2);
    m.validate();

    CHECK(m.settings()[0][0](0, 0).real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m.settings()[1][0].trace().real() == doctest::Approx(2.0).epsilon(1e-14));

    for (int z = 0; z < 2; ++z)
        for (int c = 0; c < 2; ++c)
            CHECK(classify_effect(m.settings()[z][c]) == EffectClass::SeparableEffect);
}

TEST_CASE("born_table") {
    const PreparationFamily a = trigonal_preparations(Party::A);
    const PreparationFamily b = trigonal_preparations(Party::B);
    const ProbabilityTable t = born_table(a, b, partial_bsm_ideal());

    // (x,y) = (0,0): p1 = p2 = 1/2, p3 = 0
    CHECK(t.at(0, 0, 0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(t.at(1, 0, 0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(t.at(2, 0, 0, 0) == doctest::Approx(0.0).epsilon(1e-12));

    // (x,y) = (0,1): p1 = (1+cos(2pi/3))/4 = 1/8
    CHECK(t.at(0, 0, 1, 0) == doctest::Approx(0.125).epsilon(1e-12));

    CHECK(t.normalization_defect() < 1e-10);

    // closed form at every cell for c = 1,2
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y) {
            const double alpha = 2.0 * std::numbers::pi * x / 3.0;
            const double beta = 2.0 * std::numbers::pi * y / 3.0;
            CHECK(std::abs(t.at(0, x, y, 0) - (1.0 + std::cos(alpha - beta)) / 4.0) <= 1e-12);
            CHECK(std::abs(t.at(1, x, y, 0) - (1.0 + std::cos(alpha + beta)) / 4.0) <= 1e-12);
        }

    // trivial single-outcome assembly: p = 1
    const MeasurementAssembly trivial({{ComplexMatrix::identity(4)}});
    const ProbabilityTable ones = born_table(a, b, trivial);
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y)
            CHECK(ones.at(0, x, y, 0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("classify_effect") {
    CHECK(classify_effect(ComplexMatrix::outer(bell_phi_plus())) ==
          EffectClass::EntangledEffect);
    CHECK(classify_effect(ComplexMatrix::outer(bell_phi_minus())) ==
          EffectClass::EntangledEffect);

    const ComplexMatrix p0 = ComplexMatrix::outer({1, 0});
    CHECK(classify_effect(kron(p0, p0)) == EffectClass::SeparableEffect);

    SUBCASE("noisy-BSM crossing at V = 1/2") {
        auto first_effect = [](double v) {
            return partial_bsm_noisy(VisibilityModel{v}).settings()[0][0];
        };
        CHECK(classify_effect(first_effect(0.4)) == EffectClass::SeparableEffect);
        CHECK(classify_effect(first_effect(0.5)) == EffectClass::SeparableEffect);
        CHECK(classify_effect(first_effect(0.5 + 1e-8)) == EffectClass::EntangledEffect);
        CHECK(classify_effect(first_effect(0.6)) == EffectClass::EntangledEffect);
    }

    SUBCASE("invariance under positive scaling and local unitaries") {
        std::mt19937_64 rng(55);
        for (int trial = 0; trial < 50; ++trial) {
            const ComplexMatrix base = trial % 2 == 0
                                           ? ComplexMatrix::outer(bell_phi_plus())
                                           : kron(random_psd(rng, 2), random_psd(rng, 2));
            const EffectClass expected = classify_effect(base);
            CHECK(classify_effect(3.7 * base) == expected);

            const ComplexMatrix local = kron(random_unitary(rng, 2), random_unitary(rng, 2));
            const ComplexMatrix rotated = local * base * local.adjoint();
            CHECK(classify_effect(rotated) == expected);
        }
    }

    SUBCASE("error paths") {
        CHECK_THROWS_AS(classify_effect(ComplexMatrix(4)), ZeroEffectError);
        CHECK_THROWS_AS(classify_effect(Complex(-1, 0) * ComplexMatrix::identity(4)),
                        NotPsdError);
        CHECK_THROWS_AS(classify_effect(ComplexMatrix::identity(2)), WrongDimensionError);
    }
}

TEST_CASE("assembly validation catches broken inputs") {
    // effects not summing to the identity
    const ComplexMatrix half = Complex(0.5, 0) * ComplexMatrix::identity(4);
    CHECK_THROWS_AS(MeasurementAssembly({{half}}).validate(), InvalidAssemblyError);

    // non-PSD effect
    ComplexMatrix neg = ComplexMatrix::identity(4);
    neg(0, 0) = Complex(-0.5, 0);
    ComplexMatrix rest = ComplexMatrix::identity(4) - neg;
    CHECK_THROWS_AS(MeasurementAssembly({{neg, rest}}).validate(), InvalidAssemblyError);
}
