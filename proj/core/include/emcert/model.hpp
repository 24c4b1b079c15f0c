#ifndef EMCERT_MODEL_HPP
#define EMCERT_MODEL_HPP

#include <optional>
#include <vector>

#include "emcert/linalg.hpp"
#include "emcert/table.hpp"

namespace emcert {

enum class Party { A, B };

/// A pure qubit preparation. Angle-based instances live in the x-z plane of
/// the Bloch sphere: |psi(theta)> = cos(theta/2)|0> + sin(theta/2)|1>.
/// Matrix-based instances (see-saw iterates) carry no angle.
struct QubitPreparation {
    std::optional<double> angle;
    ComplexMatrix density;  // 2x2, trace 1, PSD

    static QubitPreparation from_angle(double theta);
    static QubitPreparation from_state_vector(const std::vector<Complex>& psi);
};

struct PreparationFamily {
    Party party = Party::A;
    std::vector<QubitPreparation> states;

    int size() const { return static_cast<int>(states.size()); }
};

/// Charlie's device: for each setting z a list of POVM effects on two qubits.
class MeasurementAssembly {
public:
    MeasurementAssembly() = default;
    explicit MeasurementAssembly(std::vector<std::vector<ComplexMatrix>> settings)
        : settings_(std::move(settings)) {}

    const std::vector<std::vector<ComplexMatrix>>& settings() const { return settings_; }
    std::vector<std::vector<ComplexMatrix>>& settings() { return settings_; }
    int n_settings() const { return static_cast<int>(settings_.size()); }
    int n_outcomes() const { return settings_.empty() ? 0 : static_cast<int>(settings_[0].size()); }

    /// max over settings of ||sum_c M_c - I||_F
    double completeness_defect() const;
    /// most negative effect eigenvalue across all settings (0 if none negative)
    double psd_defect() const;
    /// Throws InvalidAssemblyError if effects are not PSD within psd_tol or do
    /// not sum to the identity within completeness_tol.
    void validate(double psd_tol = 1e-10, double completeness_tol = 1e-10) const;

private:
    std::vector<std::vector<ComplexMatrix>> settings_;
};

enum class EffectClass { SeparableEffect, EntangledEffect };

struct VisibilityModel {
    double V = 1.0;  // HOM interference visibility in [0,1]
};

// --- preparations ---------------------------------------------------------

/// Three preparations at theta_j = 2*pi*j/3, shared by both witnesses.
PreparationFamily trigonal_preparations(Party party = Party::A);

/// The trigonal family conjugated by sigma_x, i.e. the polarization states the
/// second source actually emits when the device resolves the other Bell pair.
PreparationFamily trigonal_preparations_relabelled(Party party = Party::B);

// --- measurements ----------------------------------------------------------

/// Partial Bell state measurement: {|phi+><phi+|, |phi-><phi-|, rest}.
MeasurementAssembly partial_bsm_ideal();

/// Partial BSM degraded by finite HOM visibility. Bell-diagonal family
///   M_1(V) = (I + V XX + (1-2V) YY + V ZZ)/4,
///   M_2(V) = (I - V XX + (2V-1) YY + V ZZ)/4,
///   M_3(V) = (I - V ZZ)/2,
/// chosen so the outcome probabilities on x-z plane preparations scale as
/// (1 + V cos(.))/4 and the first two effects lose their entanglement exactly
/// at V = 1/2. V = 1 reproduces partial_bsm_ideal.
MeasurementAssembly partial_bsm_noisy(const VisibilityModel& model);

/// The two dichotomic product measurements: z=0 tests |00>, z=1 tests
/// parity in the +/- basis. All four effects are separable.
MeasurementAssembly unentangled_povm_pair();

// --- probabilities and classification --------------------------------------

/// Born rule: p(c|x,y,z) = Tr((rho^A_x (x) rho^B_y) M_{c|z}).
ProbabilityTable born_table(const PreparationFamily& a, const PreparationFamily& b,
                            const MeasurementAssembly& m);

/// PPT classification of a single two-qubit effect. The effect is normalized
/// by its trace; EntangledEffect iff the partial transpose has an eigenvalue
/// below -1e-9. For two qubits this is exact, not just a witness.
EffectClass classify_effect(const ComplexMatrix& m);

// Bell-basis vectors and common projectors, handy in tests and tools.
std::vector<Complex> bell_phi_plus();
std::vector<Complex> bell_phi_minus();
std::vector<Complex> bell_psi_plus();
std::vector<Complex> bell_psi_minus();

}  // namespace emcert

#endif
