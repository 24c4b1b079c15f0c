#include "emcert/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace emcert {

ProbabilityTable CountTable::frequencies() const {
    ProbabilityTable table(dims_);
    for (int z = 0; z < dims_.nz; ++z)
        for (int x = 0; x < dims_.nx; ++x)
            for (int y = 0; y < dims_.ny; ++y) {
                double total = 0.0;
                for (int c = 0; c < dims_.nc; ++c)
                    total += has_correction() ? weights_[dims_.index(c, x, y, z)]
                                              : static_cast<double>(at(c, x, y, z));
                if (total <= 0) continue;
                for (int c = 0; c < dims_.nc; ++c) {
                    const double w = has_correction()
                                         ? weights_[dims_.index(c, x, y, z)]
                                         : static_cast<double>(at(c, x, y, z));
                    table.at(c, x, y, z) = w / total;
                }
            }
    return table;
}

CountTable sample_counts(const ProbabilityTable& table, std::int64_t shots,
                         std::uint64_t seed) {
    if (shots < 1) throw DimensionMismatchError("sample_counts: shots must be >= 1");
    if (table.normalization_defect() > 1e-8)
        throw UnnormalizedTableError("sample_counts: table cells do not sum to 1");

    const TableDims& d = table.dims();
    CountTable counts(d, shots);
    std::mt19937_64 rng(seed);

    // conditional-binomial chain: O(nc) per cell group
    for (int z = 0; z < d.nz; ++z)
        for (int x = 0; x < d.nx; ++x)
            for (int y = 0; y < d.ny; ++y) {
                std::int64_t remaining = shots;
                double mass = 1.0;
                for (int c = 0; c + 1 < d.nc && remaining > 0; ++c) {
                    const double p = table.at(c, x, y, z);
                    if (p <= 0) continue;
                    const double q = std::min(1.0, p / mass);
                    std::int64_t k;
                    if (q >= 1.0) {
                        k = remaining;
                    } else {
                        std::binomial_distribution<std::int64_t> bin(remaining, q);
                        k = bin(rng);
                    }
                    counts.at(c, x, y, z) = k;
                    remaining -= k;
                    mass -= p;
                }
                counts.at(d.nc - 1, x, y, z) += remaining;
            }
    return counts;
}

Estimate estimate(const WitnessSpec& spec, const CountTable& counts) {
    if (!(spec.dims() == counts.dims()))
        throw DimensionMismatchError("estimate: witness and counts dims differ");
    const TableDims& d = spec.dims();
    const double n = static_cast<double>(counts.shots_per_setting());

    const ProbabilityTable freq = counts.frequencies();
    Estimate est;
    double var = 0.0;
    for (int z = 0; z < d.nz; ++z)
        for (int x = 0; x < d.nx; ++x)
            for (int y = 0; y < d.ny; ++y) {
                double mean = 0.0, second = 0.0;
                for (int c = 0; c < d.nc; ++c) {
                    const double w = spec.coeff(c, x, y, z);
                    const double p = freq.at(c, x, y, z);
                    mean += w * p;
                    second += w * w * p;
                }
                est.value += mean;
                var += (second - mean * mean) / n;
            }
    est.stderr_ = std::sqrt(std::max(0.0, var));
    return est;
}

double bootstrap_stderr(const WitnessSpec& spec, const CountTable& counts,
                        int resamples, std::uint64_t seed) {
    const ProbabilityTable freq = counts.frequencies();
    std::vector<double> values;
    values.reserve(resamples);
    for (int r = 0; r < resamples; ++r) {
        const CountTable resampled =
            sample_counts(freq, counts.shots_per_setting(), seed + static_cast<std::uint64_t>(r));
        values.push_back(estimate(spec, resampled).value);
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= values.size();
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (values.size() - 1));
}

CountTable apply_splitting_correction(const CountTable& counts, const SplittingRatios& ratios) {
    const TableDims& d = counts.dims();
    for (const auto& [c, r] : ratios.ratio) {
        if (c < 1 || c > d.nc)
            throw DimensionMismatchError("splitting correction: outcome index out of range");
        if (!(r > 0.0 && r <= 1.0))
            throw RatioOutOfRangeError("splitting ratio must lie in (0,1]");
    }
    CountTable out = counts;
    std::vector<double> weights(d.cells());
    for (int z = 0; z < d.nz; ++z)
        for (int x = 0; x < d.nx; ++x)
            for (int y = 0; y < d.ny; ++y)
                for (int c = 0; c < d.nc; ++c) {
                    double w = static_cast<double>(counts.at(c, x, y, z));
                    auto it = ratios.ratio.find(c + 1);
                    if (it != ratios.ratio.end()) w /= it->second;
                    weights[d.index(c, x, y, z)] = w;
                }
    out.set_corrected_weights(std::move(weights));
    return out;
}

std::vector<std::pair<double, double>> visibility_sweep(const WitnessSpec& spec,
                                                        const std::vector<double>& v_grid) {
    const PreparationFamily alice = trigonal_preparations(Party::A);
    const PreparationFamily bob = trigonal_preparations(Party::B);
    std::vector<std::pair<double, double>> out;
    out.reserve(v_grid.size());
    for (double v : v_grid) {
        const MeasurementAssembly m = partial_bsm_noisy(VisibilityModel{v});
        out.emplace_back(v, evaluate(spec, born_table(alice, bob, m)).value);
    }
    return out;
}

std::vector<std::pair<double, double>> prep_characterization(const PreparationFamily& family) {
    std::vector<std::pair<double, double>> out;
    out.reserve(family.states.size());
    for (const auto& s : family.states) {
        if (s.density.dim() != 2)
            throw WrongDimensionError("prep_characterization: expects qubit states");
        out.emplace_back(s.density(0, 0).real(), s.density(1, 1).real());
    }
    return out;
}

std::string counts_to_csv(const CountTable& counts) {
    const TableDims& d = counts.dims();
    std::ostringstream os;
    os << "z,x,y,c,count\n";
    for (int z = 0; z < d.nz; ++z)
        for (int x = 0; x < d.nx; ++x)
            for (int y = 0; y < d.ny; ++y)
                for (int c = 0; c < d.nc; ++c)
                    os << z << ',' << x << ',' << y << ',' << c + 1 << ','
                       << counts.at(c, x, y, z) << '\n';
    return os.str();
}

CountTable counts_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.find("z,x,y,c,count") != 0)
        throw ParseError("counts CSV: missing `z,x,y,c,count` header");

    struct Row {
        int z, x, y, c;
        std::int64_t n;
    };
    std::vector<Row> rows;
    TableDims dims{0, 0, 0, 0};
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        Row r;
        char comma;
        std::istringstream ls(line);
        if (!(ls >> r.z >> comma >> r.x >> comma >> r.y >> comma >> r.c >> comma >> r.n))
            throw ParseError("counts CSV: malformed row at line " + std::to_string(lineno));
        if (r.z < 0 || r.x < 0 || r.y < 0 || r.c < 1 || r.n < 0)
            throw ParseError("counts CSV: index out of range at line " + std::to_string(lineno));
        dims.nz = std::max(dims.nz, r.z + 1);
        dims.nx = std::max(dims.nx, r.x + 1);
        dims.ny = std::max(dims.ny, r.y + 1);
        dims.nc = std::max(dims.nc, r.c);
        rows.push_back(r);
    }
    if (rows.empty()) throw ParseError("counts CSV: no data rows");

    // shots per group must agree across groups
    CountTable counts(dims, 0);
    for (const auto& r : rows) counts.at(r.c - 1, r.x, r.y, r.z) += r.n;
    std::int64_t shots = -1;
    for (int z = 0; z < dims.nz; ++z)
        for (int x = 0; x < dims.nx; ++x)
            for (int y = 0; y < dims.ny; ++y) {
                std::int64_t total = 0;
                for (int c = 0; c < dims.nc; ++c) total += counts.at(c, x, y, z);
                if (shots < 0) shots = total;
                if (total != shots)
                    throw ParseError("counts CSV: groups disagree on shots per setting");
            }

    CountTable out(dims, shots);
    for (const auto& r : rows) out.at(r.c - 1, r.x, r.y, r.z) += r.n;
    return out;
}

}  // namespace emcert
