#ifndef EMCERT_SIMULATE_HPP
#define EMCERT_SIMULATE_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "emcert/model.hpp"
#include "emcert/table.hpp"
#include "emcert/witness.hpp"

namespace emcert {

/// Raw event counts per (c,x,y,z) with N shots per setting group. When a
/// splitting-ratio correction has been applied, the real-valued corrected
/// weights are carried alongside the untouched integer counts.
class CountTable {
public:
    CountTable() = default;
    CountTable(TableDims dims, std::int64_t shots_per_setting)
        : dims_(dims), shots_(shots_per_setting), counts_(dims.cells(), 0) {}

    const TableDims& dims() const { return dims_; }
    std::int64_t shots_per_setting() const { return shots_; }

    std::int64_t& at(int c, int x, int y, int z) { return counts_[dims_.index(c, x, y, z)]; }
    std::int64_t at(int c, int x, int y, int z) const { return counts_[dims_.index(c, x, y, z)]; }
    const std::vector<std::int64_t>& counts() const { return counts_; }

    bool has_correction() const { return !weights_.empty(); }
    const std::vector<double>& corrected_weights() const { return weights_; }
    void set_corrected_weights(std::vector<double> w) { weights_ = std::move(w); }

    /// Relative frequencies (or corrected weights renormalized per group).
    ProbabilityTable frequencies() const;

private:
    TableDims dims_;
    std::int64_t shots_ = 0;
    std::vector<std::int64_t> counts_;
    std::vector<double> weights_;
};

/// Fraction of bunched photon pairs a 50:50 fiber splitter actually resolves,
/// per pseudo-number-resolved outcome (1-based outcome index -> r in (0,1]).
struct SplittingRatios {
    std::map<int, double> ratio;
};

/// Independent multinomial draw of N events per (x,y,z) cell group.
CountTable sample_counts(const ProbabilityTable& table, std::int64_t shots,
                         std::uint64_t seed);

struct Estimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

/// Plug-in witness estimate with first-order multinomial error propagation:
/// within a cell group var = (sum_c w^2 p - (sum_c w p)^2)/N, groups independent.
Estimate estimate(const WitnessSpec& spec, const CountTable& counts);

/// Optional cross-check of the propagated stderr: standard deviation of the
/// estimator over `resamples` parametric bootstrap resamples of the counts.
double bootstrap_stderr(const WitnessSpec& spec, const CountTable& counts,
                        int resamples, std::uint64_t seed);

/// Rescale the mapped outcomes by 1/r, then renormalize per group. Raw counts
/// are preserved; the corrected real weights ride along in the result.
CountTable apply_splitting_correction(const CountTable& counts, const SplittingRatios& ratios);

/// Exact (infinite statistics) witness value of the noisy partial BSM on
/// trigonal preparations, per grid visibility.
std::vector<std::pair<double, double>> visibility_sweep(const WitnessSpec& spec,
                                                        const std::vector<double>& v_grid);

/// Projector expectations <Pi_H>, <Pi_V> per state of a qubit family.
std::vector<std::pair<double, double>> prep_characterization(const PreparationFamily& family);

// --- CSV I/O ----------------------------------------------------------------
// Header `z,x,y,c,count`; c is 1-based, z/x/y 0-based, rows in index order.
std::string counts_to_csv(const CountTable& counts);
CountTable counts_from_csv(const std::string& text);

}  // namespace emcert

#endif
