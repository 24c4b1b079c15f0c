#ifndef EMCERT_OPTIMIZE_HPP
#define EMCERT_OPTIMIZE_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "emcert/model.hpp"
#include "emcert/witness.hpp"

namespace emcert {

enum class SeesawMode { General, Locc, Separable };

std::string to_string(SeesawMode mode);
SeesawMode seesaw_mode_from_string(const std::string& name);

struct SeesawConfig {
    int restarts = 100;
    int max_iters = 500;       // sweeps per restart (shared across penalty levels)
    double conv_tol = 1e-9;    // objective delta
    std::uint64_t seed = 0;
    SeesawMode mode = SeesawMode::General;
    int separable_rank = 4;    // K product terms per effect
    int threads = 0;           // 0 = hardware concurrency
    bool record_sweeps = false;
};

struct OptResult {
    double best_value = 0.0;
    int best_restart = -1;
    PreparationFamily best_alice;
    PreparationFamily best_bob;
    MeasurementAssembly best_assembly;
    std::optional<double> certificate_gap;  // general mode only
    std::vector<double> trace;              // final value per restart
    bool converged = false;                 // best restart hit conv_tol
    // per-sweep objectives, one vector per see-saw trajectory (kicked general
    // restarts and separable penalty levels contribute several trajectories
    // per restart); filled when config.record_sweeps
    std::vector<std::vector<double>> sweep_objectives;
};

struct StateUpdateResult {
    QubitPreparation state;
    bool degenerate = false;  // top eigen-gap of the local objective < 1e-12
};

/// Optimal pure-state replacement for one preparation with everything else
/// fixed: the top eigenvector of
///   G = sum_{c,z,other} coeff * Tr_other((I (x) rho_other) M_{c|z}).
/// Ties broken by the deterministic eigensolver order.
StateUpdateResult state_update(const WitnessSpec& spec, const PreparationFamily& other_party,
                               const MeasurementAssembly& assembly, Party party, int index);

struct PovmUpdateResult {
    std::vector<ComplexMatrix> povm;
    double objective = 0.0;  // sum_c Tr(M_c F_c) of the returned POVM
};

/// Maximize sum_c Tr(M_c F_c) over POVMs by the shifted fixed-point iteration
///   M_c <- R^{-1/2} F~_c M_c F~_c R^{-1/2},  R = sum_c F~_c M_c F~_c,
/// with F~_c = F_c + lambda I, lambda = max(0, -min_c mineig(F_c)). The shift
/// adds the constant 4*lambda, leaving the argmax unchanged. The returned
/// objective never drops below that of the input POVM.
PovmUpdateResult povm_update(const std::vector<ComplexMatrix>& objectives,
                             std::vector<ComplexMatrix> povm, double conv_tol = 1e-9,
                             int max_iters = 200);

/// Dual certificate for the POVM subproblem: Y = sum_c sym(F_c M_c), returns
/// gap = max(0, max_c maxeig(F_c - Y)). gap <= eps certifies that the POVM is
/// eps-optimal for its subproblem.
double certify_povm_optimality(const std::vector<ComplexMatrix>& objectives,
                               const std::vector<ComplexMatrix>& povm);

struct StartPoint {
    PreparationFamily alice;
    PreparationFamily bob;
    MeasurementAssembly assembly;
};

/// Random restart initialization: uniformly random pure qubit preparations and
/// a random full-rank POVM per setting (general mode) or random 2x2 building
/// blocks assembled into a structured POVM (locc / separable modes).
StartPoint start_point(std::mt19937_64& rng, SeesawMode mode, const TableDims& dims,
                       int separable_rank = 4);

/// Alternating optimization over all preparations and the measurement, best
/// over restarts (per-restart seed = config.seed ^ restart index; ties between
/// equal maxima go to the lower restart index).
OptResult seesaw(const WitnessSpec& spec, const SeesawConfig& config);

/// OptResult serialization: strategy matrices as {re,im} arrays, per-restart
/// trace, certificate gap, config echo.
std::string opt_result_to_json(const OptResult& result, const SeesawConfig& config);

}  // namespace emcert

#endif
