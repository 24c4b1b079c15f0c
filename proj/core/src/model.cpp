#include "emcert/model.hpp"

#include <cmath>
#include <numbers>

namespace emcert {

namespace {

constexpr double kPptThreshold = -1e-9;

const ComplexMatrix& pauli_x() {
    static const ComplexMatrix m(2, {0, 1, 1, 0});
    return m;
}

const ComplexMatrix& pauli_y() {
    static const ComplexMatrix m(2, {0, Complex(0, -1), Complex(0, 1), 0});
    return m;
}

const ComplexMatrix& pauli_z() {
    static const ComplexMatrix m(2, {1, 0, 0, -1});
    return m;
}

ComplexMatrix bell_mix(double xx, double yy, double zz) {
    ComplexMatrix m = ComplexMatrix::identity(4);
    m += Complex(xx, 0) * kron(pauli_x(), pauli_x());
    m += Complex(yy, 0) * kron(pauli_y(), pauli_y());
    m += Complex(zz, 0) * kron(pauli_z(), pauli_z());
    m *= Complex(0.25, 0);
    return m;
}

}  // namespace

QubitPreparation QubitPreparation::from_angle(double theta) {
    QubitPreparation p;
    p.angle = theta;
    p.density = ComplexMatrix::outer({std::cos(theta / 2), std::sin(theta / 2)});
    return p;
}

QubitPreparation QubitPreparation::from_state_vector(const std::vector<Complex>& psi) {
    if (psi.size() != 2) throw WrongDimensionError("qubit state vector must have length 2");
    double n2 = std::norm(psi[0]) + std::norm(psi[1]);
    if (n2 <= 0) throw WrongDimensionError("qubit state vector must be nonzero");
    const double s = 1.0 / std::sqrt(n2);
    QubitPreparation p;
    p.density = ComplexMatrix::outer({psi[0] * s, psi[1] * s});
    return p;
}

double MeasurementAssembly::completeness_defect() const {
    double worst = 0.0;
    for (const auto& effects : settings_) {
        if (effects.empty()) continue;
        ComplexMatrix sum(effects[0].dim());
        for (const auto& e : effects) sum += e;
        sum -= ComplexMatrix::identity(sum.dim());
        worst = std::max(worst, sum.frobenius_norm());
    }
    return worst;
}

double MeasurementAssembly::psd_defect() const {
    double worst = 0.0;
    for (const auto& effects : settings_)
        for (const auto& e : effects) worst = std::min(worst, min_eigenvalue(e));
    return std::min(worst, 0.0);
}

void MeasurementAssembly::validate(double psd_tol, double completeness_tol) const {
    if (settings_.empty()) throw InvalidAssemblyError("assembly has no settings");
    const std::size_t nc = settings_[0].size();
    for (const auto& effects : settings_)
        if (effects.size() != nc)
            throw InvalidAssemblyError("assembly settings disagree on outcome count");
    if (psd_defect() < -psd_tol)
        throw InvalidAssemblyError("assembly effect is not PSD within tolerance");
    if (completeness_defect() > completeness_tol)
        throw InvalidAssemblyError("assembly effects do not sum to identity");
}

PreparationFamily trigonal_preparations(Party party) {
    PreparationFamily f;
    f.party = party;
    for (int j = 0; j < 3; ++j)
        f.states.push_back(QubitPreparation::from_angle(2.0 * std::numbers::pi * j / 3.0));
    return f;
}

PreparationFamily trigonal_preparations_relabelled(Party party) {
    // sigma_x |psi(theta)> = |psi(pi - theta)> up to global phase
    PreparationFamily f;
    f.party = party;
    for (int j = 0; j < 3; ++j)
        f.states.push_back(
            QubitPreparation::from_angle(std::numbers::pi - 2.0 * std::numbers::pi * j / 3.0));
    return f;
}

std::vector<Complex> bell_phi_plus() {
    const double r = 1.0 / std::numbers::sqrt2;
    return {r, 0, 0, r};
}

std::vector<Complex> bell_phi_minus() {
    const double r = 1.0 / std::numbers::sqrt2;
    return {r, 0, 0, -r};
}

std::vector<Complex> bell_psi_plus() {
    const double r = 1.0 / std::numbers::sqrt2;
    return {0, r, r, 0};
}

std::vector<Complex> bell_psi_minus() {
    const double r = 1.0 / std::numbers::sqrt2;
    return {0, r, -r, 0};
}

MeasurementAssembly partial_bsm_ideal() {
    ComplexMatrix m1 = ComplexMatrix::outer(bell_phi_plus());
    ComplexMatrix m2 = ComplexMatrix::outer(bell_phi_minus());
    ComplexMatrix m3 = ComplexMatrix::identity(4) - m1 - m2;
    return MeasurementAssembly({{m1, m2, m3}});
}

MeasurementAssembly partial_bsm_noisy(const VisibilityModel& model) {
    const double V = model.V;
    if (!(V >= 0.0 && V <= 1.0))
        throw VisibilityOutOfRangeError("visibility must lie in [0,1]");
    ComplexMatrix m1 = bell_mix(V, 1.0 - 2.0 * V, V);
    ComplexMatrix m2 = bell_mix(-V, 2.0 * V - 1.0, V);
    ComplexMatrix m3 = ComplexMatrix::identity(4) - m1 - m2;
    return MeasurementAssembly({{m1, m2, m3}});
}

MeasurementAssembly unentangled_povm_pair() {
    const ComplexMatrix p0 = ComplexMatrix::outer({1, 0});
    const double r = 1.0 / std::numbers::sqrt2;
    const ComplexMatrix pp = ComplexMatrix::outer({r, r});
    const ComplexMatrix pm = ComplexMatrix::outer({r, -r});

    ComplexMatrix m10 = kron(p0, p0);
    ComplexMatrix m11 = kron(pp, pp) + kron(pm, pm);
    const ComplexMatrix id = ComplexMatrix::identity(4);
    return MeasurementAssembly({{m10, id - m10}, {m11, id - m11}});
}

ProbabilityTable born_table(const PreparationFamily& a, const PreparationFamily& b,
                            const MeasurementAssembly& m) {
    for (const auto& s : a.states)
        if (s.density.dim() != 2) throw InvalidAssemblyError("preparation is not a qubit");
    for (const auto& s : b.states)
        if (s.density.dim() != 2) throw InvalidAssemblyError("preparation is not a qubit");
    if (m.n_settings() == 0 || m.n_outcomes() == 0)
        throw InvalidAssemblyError("empty assembly");

    TableDims dims{a.size(), b.size(), m.n_settings(), m.n_outcomes()};
    ProbabilityTable table(dims);
    for (int x = 0; x < dims.nx; ++x)
        for (int y = 0; y < dims.ny; ++y) {
            const ComplexMatrix joint = kron(a.states[x].density, b.states[y].density);
            for (int z = 0; z < dims.nz; ++z)
                for (int c = 0; c < dims.nc; ++c)
                    table.at(c, x, y, z) = inner(joint, m.settings()[z][c]).real();
        }
    return table;
}

EffectClass classify_effect(const ComplexMatrix& m) {
    if (m.dim() != 4) throw WrongDimensionError("classify_effect: expects a 4x4 effect");
    const double tr = m.trace().real();
    if (std::abs(tr) < 1e-14) throw ZeroEffectError("classify_effect: zero effect");
    if (min_eigenvalue(m) < -1e-10) throw NotPsdError("classify_effect: effect is not PSD");
    ComplexMatrix normalized = (1.0 / tr) * m;
    const double min_pt = min_eigenvalue(partial_transpose(normalized));
    return min_pt < kPptThreshold ? EffectClass::EntangledEffect : EffectClass::SeparableEffect;
}

}  // namespace emcert
