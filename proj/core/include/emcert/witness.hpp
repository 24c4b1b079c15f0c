#ifndef EMCERT_WITNESS_HPP
#define EMCERT_WITNESS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "emcert/table.hpp"

namespace emcert {

/// A linear functional over probability tables plus the published bounds for
/// the measurement classes it discriminates. Coefficients are stored densely
/// (explicit zeros) so one evaluator serves every witness.
class WitnessSpec {
public:
    WitnessSpec() = default;
    WitnessSpec(std::string name, TableDims dims);

    const std::string& name() const { return name_; }
    const TableDims& dims() const { return dims_; }

    double& coeff(int c, int x, int y, int z) { return w_[dims_.index(c, x, y, z)]; }
    double coeff(int c, int x, int y, int z) const { return w_[dims_.index(c, x, y, z)]; }
    const std::vector<double>& coefficients() const { return w_; }

    /// Class labels: "classical", "locc", "unentangled", "entangled_max".
    /// Absent entries are allowed; present ones must be monotone in that order.
    const std::map<std::string, double>& bounds() const { return bounds_; }
    void set_bound(const std::string& cls, double value);
    std::optional<double> bound(const std::string& cls) const;

    void check_bound_monotonicity() const;

private:
    std::string name_;
    TableDims dims_;
    std::vector<double> w_;
    std::map<std::string, double> bounds_;
};

struct WitnessValue {
    double value = 0.0;
    std::string witness;
};

/// Entangled-measurement witness: dims (3,3,1,3), coefficients +-1 on the
/// first two outcomes. Bounds: classical = locc = unentangled = 1,
/// quantum maximum 3/2.
WitnessSpec witness_w();

/// Nonclassicality witness for unentangled measurements: dims (3,3,2,2),
/// coefficients on outcome 1 only. Bounds: classical 2, unentangled 3.
WitnessSpec witness_v();

/// sum over (c,x,y,z) of coeff * p. Throws DimensionMismatchError if shapes
/// disagree and UnnormalizedTableError if any cell group strays from sum 1 by
/// more than 1e-8.
WitnessValue evaluate(const WitnessSpec& spec, const ProbabilityTable& table);

struct BoundDistance {
    std::string cls;
    double bound = 0.0;
    double sigmas = 0.0;  // (value - bound)/stderr; +-inf when stderr = 0
    bool excluded = false;
};

struct CertificationVerdict {
    std::string witness;
    double value = 0.0;
    double stderr_ = 0.0;
    double significance = 3.0;
    std::vector<BoundDistance> distances;     // ordered classical..entangled_max
    std::optional<std::string> strongest_excluded;
    std::string label;  // human-readable summary
};

/// Signed sigma-distance to every published bound and the strongest class
/// excluded at the given significance (default 3 sigma).
CertificationVerdict verdict(const WitnessSpec& spec, const WitnessValue& value,
                             double stderr_, double significance = 3.0);

// --- JSON (de)serialization -------------------------------------------------
// {name, dims:{nx,ny,nz,nc}, coefficients:[{c,x,y,z,value}...], bounds:{...}}
// Sparse entries; c is 1-based in files, x/y/z 0-based.
std::string witness_to_json(const WitnessSpec& spec);
WitnessSpec witness_from_json(const std::string& text);

/// Registry lookup: "w", "v", or a path to a JSON file.
WitnessSpec load_witness(const std::string& name_or_path);

}  // namespace emcert

#endif
