#include "emcert/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include <json.hpp>

namespace emcert {

namespace {

constexpr double kDegenerateGap = 1e-12;
constexpr double kPinvTol = 1e-12;

// penalty ladder for the separable ansatz: x10 per outer loop starting at 1;
// nominally 6 loops, extended until the completeness residual is small enough
// for the assembly to survive the downstream normalization checks
constexpr double kPenaltyStart = 1.0;
constexpr double kPenaltyFactor = 10.0;
constexpr int kPenaltyLoopsNominal = 6;
constexpr int kPenaltyLoopsMax = 12;
constexpr double kPenaltyResidualTarget = 1e-9;

// --- plain-value helpers (no normalization validation) ----------------------

double raw_value(const WitnessSpec& spec, const PreparationFamily& alice,
                 const PreparationFamily& bob, const MeasurementAssembly& assembly) {
    const TableDims& d = spec.dims();
    double v = 0.0;
    for (int x = 0; x < d.nx; ++x)
        for (int y = 0; y < d.ny; ++y) {
            const ComplexMatrix joint =
                kron(alice.states[x].density, bob.states[y].density);
            for (int z = 0; z < d.nz; ++z)
                for (int c = 0; c < d.nc; ++c) {
                    const double w = spec.coeff(c, x, y, z);
                    if (w == 0.0) continue;
                    v += w * inner(joint, assembly.settings()[z][c]).real();
                }
        }
    return v;
}

// effect-space objectives F_{c|z} = sum_xy coeff(c,x,y,z) rho_x (x) rho_y
std::vector<std::vector<ComplexMatrix>> effect_objectives(const WitnessSpec& spec,
                                                          const PreparationFamily& alice,
                                                          const PreparationFamily& bob) {
    const TableDims& d = spec.dims();
    std::vector<std::vector<ComplexMatrix>> f(
        d.nz, std::vector<ComplexMatrix>(d.nc, ComplexMatrix(4)));
    for (int x = 0; x < d.nx; ++x)
        for (int y = 0; y < d.ny; ++y) {
            const ComplexMatrix joint =
                kron(alice.states[x].density, bob.states[y].density);
            for (int z = 0; z < d.nz; ++z)
                for (int c = 0; c < d.nc; ++c) {
                    const double w = spec.coeff(c, x, y, z);
                    if (w == 0.0) continue;
                    f[z][c] += w * joint;
                }
        }
    return f;
}

// --- randomness --------------------------------------------------------------

std::vector<Complex> random_state_vector(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Complex> v(dim);
    double n2 = 0.0;
    do {
        n2 = 0.0;
        for (auto& z : v) {
            z = Complex(gauss(rng), gauss(rng));
            n2 += std::norm(z);
        }
    } while (n2 < 1e-12);
    const double s = 1.0 / std::sqrt(n2);
    for (auto& z : v) z *= s;
    return v;
}

ComplexMatrix random_psd(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix x(dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) x(i, j) = Complex(gauss(rng), gauss(rng));
    return x * x.adjoint();
}

std::vector<ComplexMatrix> random_povm(std::mt19937_64& rng, std::size_t dim, int outcomes) {
    std::vector<ComplexMatrix> g;
    g.reserve(outcomes);
    ComplexMatrix sum(dim);
    for (int c = 0; c < outcomes; ++c) {
        g.push_back(random_psd(rng, dim));
        sum += g.back();
    }
    const ComplexMatrix t = psd_inv_sqrt(sum, kPinvTol);
    for (auto& m : g) m = t * m * t;
    return g;
}

PreparationFamily random_family(std::mt19937_64& rng, Party party, int n) {
    PreparationFamily f;
    f.party = party;
    for (int i = 0; i < n; ++i)
        f.states.push_back(QubitPreparation::from_state_vector(random_state_vector(rng, 2)));
    return f;
}

// --- LOCC parametrization ----------------------------------------------------
// One-way A -> B: a 2-outcome qubit POVM on wire A, an a-dependent 2-outcome
// qubit POVM on wire B, and a postprocessing (a,b) -> c per setting.

struct LoccSetting {
    std::vector<ComplexMatrix> a_povm;                // [a], 2x2
    std::vector<std::vector<ComplexMatrix>> b_povm;   // [a][b], 2x2
    std::vector<int> post;                            // [2a+b] -> c
};

std::vector<ComplexMatrix> assemble_locc(const LoccSetting& s, int nc) {
    std::vector<ComplexMatrix> effects(nc, ComplexMatrix(4));
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            effects[s.post[2 * a + b]] += kron(s.a_povm[a], s.b_povm[a][b]);
    return effects;
}

LoccSetting random_locc_setting(std::mt19937_64& rng, int nc) {
    LoccSetting s;
    s.a_povm = random_povm(rng, 2, 2);
    s.b_povm = {random_povm(rng, 2, 2), random_povm(rng, 2, 2)};
    std::uniform_int_distribution<int> out(0, nc - 1);
    for (int k = 0; k < 4; ++k) s.post.push_back(out(rng));
    return s;
}

// --- separable parametrization -------------------------------------------------
// M_{c|z} = sum_{k<K} A_{c,k} (x) B_{c,k} with PSD 2x2 factors, driven to
// completeness by a quadratic penalty.

struct SepSetting {
    // factors[c][k] = {A, B}
    std::vector<std::vector<std::pair<ComplexMatrix, ComplexMatrix>>> factors;
};

std::vector<ComplexMatrix> assemble_sep(const SepSetting& s) {
    std::vector<ComplexMatrix> effects(s.factors.size(), ComplexMatrix(4));
    for (std::size_t c = 0; c < s.factors.size(); ++c)
        for (const auto& [a, b] : s.factors[c]) effects[c] += kron(a, b);
    return effects;
}

SepSetting random_sep_setting(std::mt19937_64& rng, int nc, int rank) {
    SepSetting s;
    s.factors.resize(nc);
    // random PSD factors scaled so the assembled sum starts near the identity
    const double scale = std::sqrt(4.0 / (static_cast<double>(nc) * rank * 64.0));
    for (int c = 0; c < nc; ++c)
        for (int k = 0; k < rank; ++k)
            s.factors[c].emplace_back(scale * random_psd(rng, 2), scale * random_psd(rng, 2));
    return s;
}

ComplexMatrix symmetrized(const ComplexMatrix& m) {
    ComplexMatrix sym(m.dim());
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j < m.dim(); ++j)
            sym(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
    return sym;
}

// spectral projection onto the PSD cone (f(lam) = max(lam, 0)) or its square
// root; sanitizers for optimizer iterates that are PSD up to roundoff
ComplexMatrix psd_clamp(const ComplexMatrix& m, bool take_sqrt = false) {
    const EigenSystem es = eig_hermitian(symmetrized(m));
    ComplexMatrix out(m.dim());
    for (std::size_t k = 0; k < m.dim(); ++k) {
        double lam = std::max(es.values[k], 0.0);
        if (take_sqrt) lam = std::sqrt(lam);
        if (lam == 0.0) continue;
        for (std::size_t i = 0; i < m.dim(); ++i)
            for (std::size_t j = 0; j < m.dim(); ++j)
                out(i, j) += lam * es.vectors(i, k) * std::conj(es.vectors(j, k));
    }
    return out;
}

// max over PSD A of Tr(A C) - kappa ||A||_F^2: clamp the spectrum of C/(2 kappa).
// C is Hermitian analytically but arrives with mu-scaled roundoff, so it is
// symmetrized outright instead of gated on an absolute tolerance.
ComplexMatrix clamped_quadratic_argmax(const ComplexMatrix& c, double kappa) {
    const EigenSystem es = eig_hermitian(symmetrized(c));
    ComplexMatrix a(c.dim());
    for (std::size_t k = 0; k < c.dim(); ++k) {
        const double lam = es.values[k];
        if (lam <= 0) continue;
        const double w = lam / (2.0 * kappa);
        for (std::size_t i = 0; i < c.dim(); ++i)
            for (std::size_t j = 0; j < c.dim(); ++j)
                a(i, j) += w * es.vectors(i, k) * std::conj(es.vectors(j, k));
    }
    return a;
}

// --- per-restart state shared by all three modes -----------------------------

struct RestartData {
    double value = -std::numeric_limits<double>::infinity();
    bool converged = false;
    PreparationFamily alice, bob;
    MeasurementAssembly assembly;
    std::vector<std::vector<double>> sweeps;  // one monotone trajectory per phase
};

void update_states(const WitnessSpec& spec, PreparationFamily& alice, PreparationFamily& bob,
                   const MeasurementAssembly& assembly) {
    for (int x = 0; x < alice.size(); ++x)
        alice.states[x] = state_update(spec, bob, assembly, Party::A, x).state;
    for (int y = 0; y < bob.size(); ++y)
        bob.states[y] = state_update(spec, alice, assembly, Party::B, y).state;
}

// number of see-saw phases per restart; phases after the first re-sweep from
// the best point with the measurement blended toward a fresh random POVM,
// which breaks out of the diagonal (classical) stationary manifold that plain
// alternating updates cannot leave
constexpr int kGeneralPhases = 3;
constexpr double kPovmKick = 0.3;

RestartData run_general(const WitnessSpec& spec, const SeesawConfig& cfg, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const StartPoint sp = start_point(rng, SeesawMode::General, spec.dims());
    RestartData r;

    PreparationFamily alice = sp.alice;
    PreparationFamily bob = sp.bob;
    MeasurementAssembly assembly = sp.assembly;
    for (int phase = 0; phase < kGeneralPhases; ++phase) {
        if (phase > 0) {
            alice = r.alice;
            bob = r.bob;
            assembly = r.assembly;
            const StartPoint fresh = start_point(rng, SeesawMode::General, spec.dims());
            for (int z = 0; z < spec.dims().nz; ++z)
                for (int c = 0; c < spec.dims().nc; ++c)
                    assembly.settings()[z][c] =
                        (1.0 - kPovmKick) * assembly.settings()[z][c] +
                        kPovmKick * fresh.assembly.settings()[z][c];
        }

        double obj = raw_value(spec, alice, bob, assembly);
        bool converged = false;
        std::vector<double> sweeps;
        for (int it = 0; it < cfg.max_iters; ++it) {
            update_states(spec, alice, bob, assembly);
            const auto f = effect_objectives(spec, alice, bob);
            for (int z = 0; z < spec.dims().nz; ++z)
                assembly.settings()[z] =
                    povm_update(f[z], assembly.settings()[z], cfg.conv_tol).povm;
            const double next = raw_value(spec, alice, bob, assembly);
            if (cfg.record_sweeps) sweeps.push_back(next);
            if (std::abs(next - obj) < cfg.conv_tol) {
                obj = next;
                converged = true;
                break;
            }
            obj = next;
        }
        if (cfg.record_sweeps) r.sweeps.push_back(std::move(sweeps));
        if (obj > r.value) {
            r.value = obj;
            r.converged = converged;
            r.alice = alice;
            r.bob = bob;
            r.assembly = assembly;
        }
    }
    return r;
}

RestartData run_locc(const WitnessSpec& spec, const SeesawConfig& cfg, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const TableDims& d = spec.dims();
    RestartData r;
    r.alice = random_family(rng, Party::A, d.nx);
    r.bob = random_family(rng, Party::B, d.ny);
    std::vector<LoccSetting> settings;
    for (int z = 0; z < d.nz; ++z) settings.push_back(random_locc_setting(rng, d.nc));

    auto assemble = [&] {
        std::vector<std::vector<ComplexMatrix>> eff;
        for (const auto& s : settings) eff.push_back(assemble_locc(s, d.nc));
        return MeasurementAssembly(std::move(eff));
    };

    r.assembly = assemble();
    double obj = raw_value(spec, r.alice, r.bob, r.assembly);
    std::vector<double> sweeps;
    for (int it = 0; it < cfg.max_iters; ++it) {
        update_states(spec, r.alice, r.bob, r.assembly);

        for (int z = 0; z < d.nz; ++z) {
            LoccSetting& s = settings[z];
            // scalar responses Tr(rho_x A_a), Tr(rho_y B_{b|a})
            auto resp_a = [&](int a, int x) {
                return inner(r.alice.states[x].density, s.a_povm[a]).real();
            };
            auto resp_b = [&](int a, int b, int y) {
                return inner(r.bob.states[y].density, s.b_povm[a][b]).real();
            };

            // wire A block: objectives H_a = sum_x rho_x * (sum_{b,y} coeff * respB)
            {
                std::vector<ComplexMatrix> h(2, ComplexMatrix(2));
                for (int a = 0; a < 2; ++a)
                    for (int x = 0; x < d.nx; ++x) {
                        double scalar = 0.0;
                        for (int b = 0; b < 2; ++b)
                            for (int y = 0; y < d.ny; ++y)
                                scalar += spec.coeff(s.post[2 * a + b], x, y, z) *
                                          resp_b(a, b, y);
                        if (scalar != 0.0) h[a] += scalar * r.alice.states[x].density;
                    }
                s.a_povm = povm_update(h, s.a_povm, cfg.conv_tol).povm;
            }

            // wire B blocks, one POVM per heralded a
            for (int a = 0; a < 2; ++a) {
                std::vector<ComplexMatrix> k(2, ComplexMatrix(2));
                for (int b = 0; b < 2; ++b)
                    for (int y = 0; y < d.ny; ++y) {
                        double scalar = 0.0;
                        for (int x = 0; x < d.nx; ++x)
                            scalar += spec.coeff(s.post[2 * a + b], x, y, z) * resp_a(a, x);
                        if (scalar != 0.0) k[b] += scalar * r.bob.states[y].density;
                    }
                s.b_povm[a] = povm_update(k, s.b_povm[a], cfg.conv_tol).povm;
            }

            // postprocessing by enumeration: independent argmax per (a,b)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    int best_c = 0;
                    double best_t = -std::numeric_limits<double>::infinity();
                    for (int c = 0; c < d.nc; ++c) {
                        double t = 0.0;
                        for (int x = 0; x < d.nx; ++x)
                            for (int y = 0; y < d.ny; ++y)
                                t += spec.coeff(c, x, y, z) * resp_a(a, x) * resp_b(a, b, y);
                        if (t > best_t) {
                            best_t = t;
                            best_c = c;
                        }
                    }
                    s.post[2 * a + b] = best_c;
                }
        }

        r.assembly = assemble();
        const double next = raw_value(spec, r.alice, r.bob, r.assembly);
        if (cfg.record_sweeps) sweeps.push_back(next);
        if (std::abs(next - obj) < cfg.conv_tol) {
            obj = next;
            r.converged = true;
            break;
        }
        obj = next;
    }
    if (cfg.record_sweeps) r.sweeps.push_back(std::move(sweeps));
    r.value = obj;
    return r;
}

RestartData run_separable(const WitnessSpec& spec, const SeesawConfig& cfg,
                          std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const TableDims& d = spec.dims();
    RestartData r;
    r.alice = random_family(rng, Party::A, d.nx);
    r.bob = random_family(rng, Party::B, d.ny);
    std::vector<SepSetting> settings;
    for (int z = 0; z < d.nz; ++z)
        settings.push_back(random_sep_setting(rng, d.nc, cfg.separable_rank));

    auto assemble = [&] {
        std::vector<std::vector<ComplexMatrix>> eff;
        for (const auto& s : settings) eff.push_back(assemble_sep(s));
        return MeasurementAssembly(std::move(eff));
    };

    const ComplexMatrix id4 = ComplexMatrix::identity(4);
    const int inner_cap = std::max(20, cfg.max_iters / kPenaltyLoopsMax);

    double mu = kPenaltyStart;
    double residual = std::numeric_limits<double>::infinity();
    bool inner_converged = false;
    for (int level = 0; level < kPenaltyLoopsMax; ++level) {
        double penalized = -std::numeric_limits<double>::infinity();
        inner_converged = false;
        std::vector<double> sweeps;  // penalized objective; one trajectory per mu level
        for (int it = 0; it < inner_cap; ++it) {
            r.assembly = assemble();
            update_states(spec, r.alice, r.bob, r.assembly);
            const auto f = effect_objectives(spec, r.alice, r.bob);

            for (int z = 0; z < d.nz; ++z) {
                SepSetting& s = settings[z];
                ComplexMatrix sum(4);
                for (int c = 0; c < d.nc; ++c)
                    for (const auto& [a, b] : s.factors[c]) sum += kron(a, b);

                for (int c = 0; c < d.nc; ++c)
                    for (auto& [a, b] : s.factors[c]) {
                        // exact block maximization of the penalized objective,
                        // concave quadratic in each factor
                        ComplexMatrix rest = sum - kron(a, b) - id4;
                        const double bn2 = std::pow(b.frobenius_norm(), 2);
                        if (bn2 > 1e-18) {
                            const ComplexMatrix grow =
                                partial_trace_b(kron(ComplexMatrix::identity(2), b) *
                                                (f[z][c] - 2.0 * mu * rest));
                            const ComplexMatrix a_new =
                                clamped_quadratic_argmax(grow, mu * bn2);
                            sum += kron(a_new - a, b);
                            rest = sum - kron(a_new, b) - id4;
                            a = a_new;
                        }
                        const double an2 = std::pow(a.frobenius_norm(), 2);
                        if (an2 > 1e-18) {
                            const ComplexMatrix gcol =
                                partial_trace_a(kron(a, ComplexMatrix::identity(2)) *
                                                (f[z][c] - 2.0 * mu * rest));
                            const ComplexMatrix b_new =
                                clamped_quadratic_argmax(gcol, mu * an2);
                            sum += kron(a, b_new - b);
                            b = b_new;
                        }
                        // rebalance the pair; the product (and objective) is
                        // unchanged but neither side can run away in scale
                        const double na = a.frobenius_norm();
                        const double nb = b.frobenius_norm();
                        if (na > 0 && nb > 0) {
                            const double scale = std::sqrt(na / nb);
                            a *= Complex(1.0 / scale, 0);
                            b *= Complex(scale, 0);
                        }
                    }
            }

            r.assembly = assemble();
            const double value = raw_value(spec, r.alice, r.bob, r.assembly);
            const double next = value - mu * std::pow(r.assembly.completeness_defect(), 2);
            if (cfg.record_sweeps) sweeps.push_back(next);
            if (std::abs(next - penalized) < cfg.conv_tol) {
                penalized = next;
                inner_converged = true;
                break;
            }
            penalized = next;
        }
        if (cfg.record_sweeps) r.sweeps.push_back(std::move(sweeps));
        residual = r.assembly.completeness_defect();
        if (level + 1 >= kPenaltyLoopsNominal && residual <= kPenaltyResidualTarget) break;
        mu *= kPenaltyFactor;
    }

    r.converged = inner_converged && residual <= 1e-6;
    r.value = raw_value(spec, r.alice, r.bob, r.assembly);
    return r;
}

RestartData run_restart(const WitnessSpec& spec, const SeesawConfig& cfg, int index) {
    const std::uint64_t seed = cfg.seed ^ static_cast<std::uint64_t>(index);
    switch (cfg.mode) {
        case SeesawMode::General:
            return run_general(spec, cfg, seed);
        case SeesawMode::Locc:
            return run_locc(spec, cfg, seed);
        case SeesawMode::Separable:
            return run_separable(spec, cfg, seed);
    }
    throw Error("seesaw: unknown mode");
}

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
    std::vector<double> re, im;
    re.reserve(m.dim() * m.dim());
    im.reserve(m.dim() * m.dim());
    for (const auto& z : m.entries()) {
        re.push_back(z.real());
        im.push_back(z.imag());
    }
    return {{"dim", m.dim()}, {"re", re}, {"im", im}};
}

nlohmann::json family_to_json(const PreparationFamily& f) {
    nlohmann::json states = nlohmann::json::array();
    for (const auto& s : f.states) {
        nlohmann::json j;
        if (s.angle) j["angle"] = *s.angle;
        j["density"] = matrix_to_json(s.density);
        states.push_back(j);
    }
    return states;
}

}  // namespace

std::string to_string(SeesawMode mode) {
    switch (mode) {
        case SeesawMode::General:
            return "general";
        case SeesawMode::Locc:
            return "locc";
        case SeesawMode::Separable:
            return "separable";
    }
    return "?";
}

SeesawMode seesaw_mode_from_string(const std::string& name) {
    if (name == "general") return SeesawMode::General;
    if (name == "locc") return SeesawMode::Locc;
    if (name == "separable") return SeesawMode::Separable;
    throw ParseError("unknown see-saw mode: " + name);
}

StateUpdateResult state_update(const WitnessSpec& spec, const PreparationFamily& other_party,
                               const MeasurementAssembly& assembly, Party party, int index) {
    const TableDims& d = spec.dims();
    const int n_other = party == Party::A ? d.ny : d.nx;
    if (other_party.size() != n_other)
        throw DimensionMismatchError("state_update: other-party family size mismatch");

    ComplexMatrix g(2);
    const ComplexMatrix id2 = ComplexMatrix::identity(2);
    for (int z = 0; z < d.nz; ++z)
        for (int c = 0; c < d.nc; ++c) {
            // fold the sum over the other party's index into one operator
            ComplexMatrix s(2);
            bool any = false;
            for (int o = 0; o < n_other; ++o) {
                const double w = party == Party::A ? spec.coeff(c, index, o, z)
                                                   : spec.coeff(c, o, index, z);
                if (w == 0.0) continue;
                s += w * other_party.states[o].density;
                any = true;
            }
            if (!any) continue;
            const ComplexMatrix& effect = assembly.settings()[z][c];
            g += party == Party::A ? partial_trace_b(kron(id2, s) * effect)
                                   : partial_trace_a(kron(s, id2) * effect);
        }

    const EigenSystem es = eig_hermitian(g, 1e-9);
    StateUpdateResult out;
    out.degenerate = es.values.size() > 1 && es.values[0] - es.values[1] < kDegenerateGap;
    out.state = QubitPreparation::from_state_vector({es.vectors(0, 0), es.vectors(1, 0)});
    return out;
}

PovmUpdateResult povm_update(const std::vector<ComplexMatrix>& objectives,
                             std::vector<ComplexMatrix> povm, double conv_tol,
                             int max_iters) {
    if (objectives.size() != povm.size())
        throw DimensionMismatchError("povm_update: one objective per outcome required");
    const std::size_t n = povm.empty() ? 0 : povm[0].dim();
    const int nc = static_cast<int>(povm.size());

    auto objective_of = [&](const std::vector<ComplexMatrix>& m) {
        double o = 0.0;
        for (int c = 0; c < nc; ++c) o += inner(objectives[c], m[c]).real();
        return o;
    };

    double shift = 0.0;
    for (const auto& f : objectives) shift = std::max(shift, -min_eigenvalue(f));
    std::vector<ComplexMatrix> shifted = objectives;
    if (shift > 0)
        for (auto& f : shifted) f += shift * ComplexMatrix::identity(n);

    PovmUpdateResult best{povm, objective_of(povm)};
    double prev = best.objective;
    for (int it = 0; it < max_iters; ++it) {
        // factored Gram form of M <- R^{-1/2} F~ M F~ R^{-1/2}: with
        // Y_c = F~_c sqrt(M_c), R = sum Y Y^dag and M'_c = (T Y_c)(T Y_c)^dag.
        // Identical in exact arithmetic, but keeps every iterate exactly
        // Hermitian PSD when R is nearly singular and T has huge norm.
        ComplexMatrix r(n);
        std::vector<ComplexMatrix> y(nc);
        for (int c = 0; c < nc; ++c) {
            y[c] = shifted[c] * psd_clamp(povm[c], /*take_sqrt=*/true);
            r += y[c] * y[c].adjoint();
        }
        const ComplexMatrix t = psd_inv_sqrt(r, kPinvTol);
        std::vector<ComplexMatrix> next(nc);
        ComplexMatrix total(n);
        for (int c = 0; c < nc; ++c) {
            const ComplexMatrix x = t * y[c];
            next[c] = x * x.adjoint();
            total += next[c];
        }
        // pseudo-inverse path can leave a completeness deficit; hand it to the
        // outcome it helps most
        ComplexMatrix deficit = ComplexMatrix::identity(n) - total;
        if (deficit.frobenius_norm() > 1e-13) {
            int pick = 0;
            double gain = -std::numeric_limits<double>::infinity();
            for (int c = 0; c < nc; ++c) {
                const double g = inner(objectives[c], deficit).real();
                if (g > gain) {
                    gain = g;
                    pick = c;
                }
            }
            // the deficit carries T-amplified roundoff and can be slightly
            // indefinite: absorb it, clamp that effect back onto the PSD cone,
            // and renormalize with the now well-conditioned sum
            next[pick] = psd_clamp(next[pick] + deficit);
            ComplexMatrix sum(n);
            for (const auto& m : next) sum += m;
            const ComplexMatrix t2 = psd_inv_sqrt(sum, kPinvTol);
            for (auto& m : next) m = t2 * m * t2;
        }
        povm = std::move(next);
        const double obj = objective_of(povm);
        if (obj > best.objective) best = {povm, obj};
        if (std::abs(obj - prev) < conv_tol) break;
        prev = obj;
    }
    return best;
}

double certify_povm_optimality(const std::vector<ComplexMatrix>& objectives,
                               const std::vector<ComplexMatrix>& povm) {
    if (objectives.size() != povm.size())
        throw DimensionMismatchError("certify_povm_optimality: size mismatch");
    if (objectives.empty()) return 0.0;
    const std::size_t n = objectives[0].dim();
    ComplexMatrix y(n);
    for (std::size_t c = 0; c < objectives.size(); ++c) {
        const ComplexMatrix fm = objectives[c] * povm[c];
        y += 0.5 * (fm + fm.adjoint());
    }
    double gap = 0.0;
    for (const auto& f : objectives) gap = std::max(gap, max_eigenvalue(f - y));
    return std::max(0.0, gap);
}

StartPoint start_point(std::mt19937_64& rng, SeesawMode mode, const TableDims& dims,
                       int separable_rank) {
    StartPoint sp;
    sp.alice = random_family(rng, Party::A, dims.nx);
    sp.bob = random_family(rng, Party::B, dims.ny);
    std::vector<std::vector<ComplexMatrix>> settings;
    for (int z = 0; z < dims.nz; ++z) {
        switch (mode) {
            case SeesawMode::General:
                settings.push_back(random_povm(rng, 4, dims.nc));
                break;
            case SeesawMode::Locc:
                settings.push_back(assemble_locc(random_locc_setting(rng, dims.nc), dims.nc));
                break;
            case SeesawMode::Separable:
                settings.push_back(assemble_sep(random_sep_setting(rng, dims.nc, separable_rank)));
                break;
        }
    }
    sp.assembly = MeasurementAssembly(std::move(settings));
    return sp;
}

OptResult seesaw(const WitnessSpec& spec, const SeesawConfig& config) {
    if (config.restarts < 1) throw DimensionMismatchError("seesaw: restarts must be >= 1");
    if (!(config.conv_tol > 0)) throw DimensionMismatchError("seesaw: conv_tol must be > 0");

    std::vector<RestartData> results(config.restarts);
    int threads = config.threads > 0
                      ? config.threads
                      : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, config.restarts));

    std::atomic<int> cursor{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        try {
            for (;;) {
                const int idx = cursor.fetch_add(1);
                if (idx >= config.restarts) return;
                results[idx] = run_restart(spec, config, idx);
            }
        } catch (...) {
            const std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    OptResult out;
    out.trace.reserve(config.restarts);
    for (int i = 0; i < config.restarts; ++i) {
        out.trace.push_back(results[i].value);
        if (config.record_sweeps)
            for (auto& phase : results[i].sweeps)
                out.sweep_objectives.push_back(std::move(phase));
        if (results[i].value > out.best_value || out.best_restart < 0) {
            out.best_restart = i;
            out.best_value = results[i].value;
        }
    }
    RestartData& best = results[out.best_restart];
    out.converged = best.converged;
    out.best_alice = std::move(best.alice);
    out.best_bob = std::move(best.bob);
    out.best_assembly = std::move(best.assembly);
    // report the value the stored strategy actually evaluates to
    out.best_value = raw_value(spec, out.best_alice, out.best_bob, out.best_assembly);

    if (config.mode == SeesawMode::General) {
        const auto f = effect_objectives(spec, out.best_alice, out.best_bob);
        double gap = 0.0;
        for (int z = 0; z < spec.dims().nz; ++z)
            gap = std::max(gap, certify_povm_optimality(f[z], out.best_assembly.settings()[z]));
        out.certificate_gap = gap;
    }
    return out;
}

std::string opt_result_to_json(const OptResult& result, const SeesawConfig& config) {
    nlohmann::json j;
    j["mode"] = to_string(config.mode);
    j["seed"] = config.seed;
    j["restarts"] = config.restarts;
    j["max_iters"] = config.max_iters;
    j["conv_tol"] = config.conv_tol;
    if (config.mode == SeesawMode::Separable) j["separable_rank"] = config.separable_rank;
    j["best_value"] = result.best_value;
    j["best_restart"] = result.best_restart;
    j["converged"] = result.converged;
    if (result.certificate_gap) j["certificate_gap"] = *result.certificate_gap;
    j["preparations"] = {{"alice", family_to_json(result.best_alice)},
                         {"bob", family_to_json(result.best_bob)}};
    nlohmann::json settings = nlohmann::json::array();
    for (const auto& effects : result.best_assembly.settings()) {
        nlohmann::json setting = nlohmann::json::array();
        for (const auto& e : effects) setting.push_back(matrix_to_json(e));
        settings.push_back(setting);
    }
    j["assembly"] = settings;
    j["trace"] = result.trace;
    return j.dump(2);
}

}  // namespace emcert
