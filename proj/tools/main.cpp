#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "emcert/bounds.hpp"
#include "emcert/model.hpp"
#include "emcert/optimize.hpp"
#include "emcert/simulate.hpp"
#include "emcert/witness.hpp"
#include "sha256.hpp"

namespace {

using namespace emcert;

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitBudget = 3;
constexpr int kExitNoConvergence = 4;
constexpr int kExitMismatch = 5;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path);
    out << text;
}

SplittingRatios ratios_from_json(const std::string& text) {
    SplittingRatios r;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("ratios JSON: ") + e.what());
    }
    for (const auto& [key, value] : j.items()) r.ratio[std::stoi(key)] = value.get<double>();
    return r;
}

// scenario behind the built-in witnesses: trigonal preparations on both wires,
// the noisy partial BSM for w, the two product measurements for v
ProbabilityTable builtin_scenario_table(const std::string& witness, double visibility) {
    const PreparationFamily alice = trigonal_preparations(Party::A);
    const PreparationFamily bob = trigonal_preparations(Party::B);
    if (witness == "w")
        return born_table(alice, bob, partial_bsm_noisy(VisibilityModel{visibility}));
    if (witness == "v") {
        if (visibility != 1.0)
            throw ParseError("--visibility models the Bell-state measurement; only witness w supports it");
        return born_table(alice, bob, unentangled_povm_pair());
    }
    throw ParseError("simulate supports the built-in witnesses `w` and `v` only");
}

int cmd_bounds(const std::string& witness, std::uint64_t budget, bool json) {
    const WitnessSpec spec = load_witness(witness);
    const BoundResult result = classical_bound(spec, budget);
    if (json) {
        nlohmann::json j;
        j["witness"] = spec.name();
        j["classical_bound"] = result.max_value;
        j["n_enumerated"] = result.n_enumerated;
        j["argmax"] = {{"alice_msg", result.argmax.alice_msg},
                       {"bob_msg", result.argmax.bob_msg},
                       {"charlie_out", result.argmax.charlie_out}};
        std::cout << j.dump(2) << "\n";
        return kExitOk;
    }
    std::cout << "witness: " << spec.name() << "\n";
    std::cout << "classical bound: " << result.max_value << "\n";
    std::cout << "strategies enumerated: " << result.n_enumerated << "\n";
    std::cout << "attaining strategy:\n  alice_msg:";
    for (int m : result.argmax.alice_msg) std::cout << ' ' << m;
    std::cout << "\n  bob_msg:";
    for (int m : result.argmax.bob_msg) std::cout << ' ' << m;
    std::cout << "\n  charlie_out (c per z, indexed by bA,bB):";
    for (const auto& f : result.argmax.charlie_out) {
        std::cout << " [";
        for (std::size_t k = 0; k < f.size(); ++k) std::cout << (k ? " " : "") << f[k] + 1;
        std::cout << "]";
    }
    std::cout << "\n";
    return kExitOk;
}

int cmd_optimize(const std::string& witness, const SeesawConfig& config, bool strict,
                 bool json, const std::string& out_path) {
    const WitnessSpec spec = load_witness(witness);
    const OptResult result = seesaw(spec, config);
    const std::string dump = opt_result_to_json(result, config);
    if (!out_path.empty()) write_file(out_path, dump);
    if (json) {
        std::cout << dump << "\n";
    } else {
        std::cout << "witness: " << spec.name() << "\nmode: " << to_string(config.mode)
                  << "\nbest value: " << std::setprecision(12) << result.best_value
                  << "\nbest restart: " << result.best_restart
                  << "\nconverged: " << (result.converged ? "yes" : "no") << "\n";
        if (result.certificate_gap)
            std::cout << "certificate gap: " << *result.certificate_gap << "\n";
        if (!out_path.empty()) std::cout << "strategy dump: " << out_path << "\n";
    }
    if (strict && !result.converged) return kExitNoConvergence;
    return kExitOk;
}

int cmd_simulate(const std::string& witness, double visibility, std::int64_t shots,
                 std::uint64_t seed, const std::string& out_path, bool json) {
    if (shots < 1) throw ParseError("--shots must be >= 1");
    if (visibility < 0.0 || visibility > 1.0) throw ParseError("--visibility must lie in [0,1]");
    const WitnessSpec spec = load_witness(witness);
    const ProbabilityTable table = builtin_scenario_table(witness, visibility);
    const CountTable counts = sample_counts(table, shots, seed);
    const Estimate est = estimate(spec, counts);

    const std::string csv = counts_to_csv(counts);
    write_file(out_path, csv);
    nlohmann::json meta;
    meta["shots_per_setting"] = shots;
    meta["witness"] = witness;
    meta["visibility"] = visibility;
    meta["seed"] = seed;
    meta["counts_sha256"] = tools::Sha256::of(csv);
    meta["generator"] = "emcert simulate";
    write_file(out_path + ".meta.json", meta.dump(2) + "\n");

    if (json) {
        nlohmann::json j;
        j["witness"] = witness;
        j["estimate"] = est.value;
        j["stderr"] = est.stderr_;
        j["counts_file"] = out_path;
        j["seed"] = seed;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "wrote " << out_path << " (+.meta.json)\n"
                  << "estimate: " << std::setprecision(10) << est.value << " +- "
                  << est.stderr_ << "\n";
    }
    return kExitOk;
}

int cmd_certify(const std::string& counts_path, const std::string& witness,
                const std::string& ratios_path, double sigma, bool json,
                const std::string& out_path) {
    const WitnessSpec spec = load_witness(witness);
    const std::string csv = read_file(counts_path);
    CountTable counts = counts_from_csv(csv);

    nlohmann::json provenance;
    provenance["counts_file"] = counts_path;
    provenance["counts_sha256"] = tools::Sha256::of(csv);
    provenance["witness"] = witness;
    provenance["shots_per_setting"] = counts.shots_per_setting();

    if (!ratios_path.empty()) {
        const std::string rtext = read_file(ratios_path);
        counts = apply_splitting_correction(counts, ratios_from_json(rtext));
        provenance["ratios_file"] = ratios_path;
        provenance["ratios_sha256"] = tools::Sha256::of(rtext);
    }

    const Estimate est = estimate(spec, counts);
    const CertificationVerdict v = verdict(spec, WitnessValue{est.value, spec.name()},
                                           est.stderr_, sigma);

    nlohmann::json report;
    report["witness"] = spec.name();
    report["value"] = est.value;
    report["stderr"] = est.stderr_;
    report["significance"] = sigma;
    nlohmann::json dists = nlohmann::json::array();
    for (const auto& dst : v.distances)
        dists.push_back({{"class", dst.cls},
                         {"bound", dst.bound},
                         {"sigmas", std::isfinite(dst.sigmas) ? nlohmann::json(dst.sigmas)
                                                              : nlohmann::json(nullptr)},
                         {"excluded", dst.excluded}});
    report["distances"] = dists;
    report["verdict"] = v.label;
    report["provenance"] = provenance;

    if (!out_path.empty()) write_file(out_path, report.dump(2) + "\n");
    if (json) {
        std::cout << report.dump(2) << "\n";
    } else {
        std::cout << "witness: " << spec.name() << "\nestimate: " << std::setprecision(10)
                  << est.value << " +- " << est.stderr_ << "\n";
        for (const auto& dst : v.distances)
            std::cout << "  vs " << dst.cls << " bound " << dst.bound << ": "
                      << std::setprecision(4) << dst.sigmas << " sigma"
                      << (dst.excluded ? " (excluded)" : "") << "\n";
        std::cout << "verdict: " << v.label << "\n";
        if (!out_path.empty()) std::cout << "report: " << out_path << "\n";
    }
    return kExitOk;
}

int cmd_sweep(const std::string& witness, double from, double to, int points, bool json) {
    if (points < 2) throw ParseError("--points must be >= 2");
    const WitnessSpec spec = load_witness(witness);
    std::vector<double> grid;
    for (int i = 0; i < points; ++i)
        grid.push_back(from + (to - from) * i / (points - 1));
    const auto sweep = visibility_sweep(spec, grid);
    if (json) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& [v, w] : sweep) j.push_back({{"visibility", v}, {"value", w}});
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "visibility,value\n";
        for (const auto& [v, w] : sweep)
            std::cout << std::setprecision(10) << v << ',' << w << "\n";
    }
    return kExitOk;
}

int cmd_prep_table(bool json) {
    const PreparationFamily alice = trigonal_preparations(Party::A);
    const PreparationFamily bob = trigonal_preparations_relabelled(Party::B);
    const auto ta = prep_characterization(alice);
    const auto tb = prep_characterization(bob);
    if (json) {
        nlohmann::json j;
        auto dump = [](const auto& t) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& [h, v] : t) arr.push_back({{"pi_h", h}, {"pi_v", v}});
            return arr;
        };
        j["alice"] = dump(ta);
        j["bob"] = dump(tb);
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "state,pi_H,pi_V\n" << std::setprecision(10);
        for (std::size_t i = 0; i < ta.size(); ++i)
            std::cout << "A" << i << ',' << ta[i].first << ',' << ta[i].second << "\n";
        for (std::size_t i = 0; i < tb.size(); ++i)
            std::cout << "B" << i << ',' << tb[i].first << ',' << tb[i].second << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semi-device-independent certification of entangled measurements"};
    app.require_subcommand(1);

    std::string witness = "w";
    std::uint64_t budget = 100'000'000;
    bool json = false;

    auto* bounds_cmd = app.add_subcommand("bounds", "Exact classical bound by enumeration");
    bounds_cmd->add_option("--witness", witness, "built-in name (w, v) or JSON file path");
    bounds_cmd->add_option("--budget", budget, "maximum number of strategies to enumerate");
    bounds_cmd->add_flag("--json", json, "machine-readable output");

    SeesawConfig config;
    std::string mode = "general";
    bool strict = false;
    std::string out_path;
    auto* opt_cmd = app.add_subcommand("optimize", "See-saw optimization of a witness");
    opt_cmd->add_option("--witness", witness, "built-in name (w, v) or JSON file path");
    opt_cmd->add_option("--mode", mode, "general | locc | separable")
        ->check(CLI::IsMember({"general", "locc", "separable"}));
    opt_cmd->add_option("--restarts", config.restarts, "random restarts");
    opt_cmd->add_option("--seed", config.seed, "restart seed");
    opt_cmd->add_option("--iters", config.max_iters, "max sweeps per restart");
    opt_cmd->add_option("--tol", config.conv_tol, "objective convergence tolerance");
    opt_cmd->add_option("--rank", config.separable_rank, "product terms per effect (separable)");
    opt_cmd->add_option("--threads", config.threads, "worker threads (0 = auto)");
    opt_cmd->add_flag("--strict", strict, "exit 4 when the best restart did not converge");
    opt_cmd->add_flag("--json", json, "machine-readable output");
    opt_cmd->add_option("--out", out_path, "write the strategy dump to this path");

    double visibility = 1.0;
    std::int64_t shots = 1'000'000;
    std::uint64_t seed = 0;
    std::string counts_out = "counts.csv";
    auto* sim_cmd = app.add_subcommand("simulate", "Finite-statistics experiment simulation");
    sim_cmd->add_option("--witness", witness, "built-in name (w or v)");
    sim_cmd->add_option("--visibility", visibility, "HOM visibility in [0,1] (witness w)");
    sim_cmd->add_option("--shots", shots, "events per (x,y,z) setting");
    sim_cmd->add_option("--seed", seed, "sampling seed");
    sim_cmd->add_option("--out", counts_out, "counts CSV output path");
    sim_cmd->add_flag("--json", json, "machine-readable output");

    std::string counts_path, ratios_path, report_out;
    double sigma = 3.0;
    auto* cert_cmd = app.add_subcommand("certify", "Certify measurement class from counts");
    cert_cmd->add_option("--counts", counts_path, "counts CSV file")->required();
    cert_cmd->add_option("--witness", witness, "built-in name (w, v) or JSON file path");
    cert_cmd->add_option("--ratios", ratios_path, "splitting-ratio JSON file");
    cert_cmd->add_option("--sigma", sigma, "significance threshold in standard deviations");
    cert_cmd->add_flag("--json", json, "machine-readable output");
    cert_cmd->add_option("--out", report_out, "write the report JSON to this path");

    double from = 0.0, to = 1.0;
    int points = 21;
    auto* sweep_cmd = app.add_subcommand("sweep", "Witness value across a visibility grid");
    sweep_cmd->add_option("--witness", witness, "built-in name (w, v) or JSON file path");
    sweep_cmd->add_option("--from", from, "grid start");
    sweep_cmd->add_option("--to", to, "grid end");
    sweep_cmd->add_option("--points", points, "grid size");
    sweep_cmd->add_flag("--json", json, "machine-readable output");

    auto* prep_cmd = app.add_subcommand("prep-table", "Preparation characterization table");
    prep_cmd->add_flag("--json", json, "machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitParse;
    }

    try {
        if (bounds_cmd->parsed()) return cmd_bounds(witness, budget, json);
        if (opt_cmd->parsed()) {
            config.mode = seesaw_mode_from_string(mode);
            return cmd_optimize(witness, config, strict, json, out_path);
        }
        if (sim_cmd->parsed())
            return cmd_simulate(witness, visibility, shots, seed, counts_out, json);
        if (cert_cmd->parsed())
            return cmd_certify(counts_path, witness, ratios_path, sigma, json, report_out);
        if (sweep_cmd->parsed()) return cmd_sweep(witness, from, to, points, json);
        if (prep_cmd->parsed()) return cmd_prep_table(json);
    } catch (const BudgetExceededError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const DimensionMismatchError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMismatch;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
