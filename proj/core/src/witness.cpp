#include "emcert/witness.hpp"

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace emcert {

namespace {

constexpr double kNormalizationTol = 1e-8;

const std::array<std::string, 4> kClassOrder = {"classical", "locc", "unentangled",
                                                "entangled_max"};

int class_rank(const std::string& cls) {
    for (int i = 0; i < static_cast<int>(kClassOrder.size()); ++i)
        if (kClassOrder[i] == cls) return i;
    return -1;
}

}  // namespace

WitnessSpec::WitnessSpec(std::string name, TableDims dims)
    : name_(std::move(name)), dims_(dims), w_(dims.cells(), 0.0) {}

void WitnessSpec::set_bound(const std::string& cls, double value) {
    if (class_rank(cls) < 0) throw ParseError("unknown bound class: " + cls);
    bounds_[cls] = value;
    check_bound_monotonicity();
}

std::optional<double> WitnessSpec::bound(const std::string& cls) const {
    auto it = bounds_.find(cls);
    if (it == bounds_.end()) return std::nullopt;
    return it->second;
}

void WitnessSpec::check_bound_monotonicity() const {
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& cls : kClassOrder) {
        auto it = bounds_.find(cls);
        if (it == bounds_.end()) continue;
        if (it->second < prev)
            throw ParseError("witness bounds must be monotone across classes");
        prev = it->second;
    }
}

WitnessSpec witness_w() {
    WitnessSpec spec("w", TableDims{3, 3, 1, 3});
    const int w1[3][3] = {{1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
    const int w2[3][3] = {{1, -1, -1}, {-1, -1, 1}, {-1, 1, -1}};
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y) {
            spec.coeff(0, x, y, 0) = w1[x][y];
            spec.coeff(1, x, y, 0) = w2[x][y];
        }
    spec.set_bound("classical", 1.0);
    spec.set_bound("locc", 1.0);
    spec.set_bound("unentangled", 1.0);
    spec.set_bound("entangled_max", 1.5);
    return spec;
}

WitnessSpec witness_v() {
    WitnessSpec spec("v", TableDims{3, 3, 2, 2});
    const int v0[3][3] = {{2, 0, 0}, {0, -2, -2}, {0, -2, -2}};
    const int v1[3][3] = {{0, 0, 0}, {0, 1, -1}, {0, -1, 1}};
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y) {
            spec.coeff(0, x, y, 0) = v0[x][y];
            spec.coeff(0, x, y, 1) = v1[x][y];
        }
    spec.set_bound("classical", 2.0);
    spec.set_bound("unentangled", 3.0);
    return spec;
}

WitnessValue evaluate(const WitnessSpec& spec, const ProbabilityTable& table) {
    if (!(spec.dims() == table.dims()))
        throw DimensionMismatchError("evaluate: witness and table dims differ");
    if (table.normalization_defect() > kNormalizationTol)
        throw UnnormalizedTableError("evaluate: table cells do not sum to 1");
    double v = 0.0;
    const auto& w = spec.coefficients();
    const auto& p = table.values();
    for (std::size_t k = 0; k < w.size(); ++k) v += w[k] * p[k];
    return WitnessValue{v, spec.name()};
}

CertificationVerdict verdict(const WitnessSpec& spec, const WitnessValue& value,
                             double stderr_, double significance) {
    if (stderr_ < 0) throw DimensionMismatchError("verdict: stderr must be nonnegative");
    CertificationVerdict out;
    out.witness = spec.name();
    out.value = value.value;
    out.stderr_ = stderr_;
    out.significance = significance;

    for (const auto& cls : {"classical", "locc", "unentangled"}) {
        auto b = spec.bound(cls);
        if (!b) continue;
        BoundDistance d;
        d.cls = cls;
        d.bound = *b;
        if (stderr_ > 0) {
            d.sigmas = (value.value - *b) / stderr_;
            d.excluded = d.sigmas >= significance;
        } else {
            // zero-error limit: excluded only on strict violation
            d.excluded = value.value > *b;
            d.sigmas = value.value == *b
                           ? 0.0
                           : std::copysign(std::numeric_limits<double>::infinity(),
                                           value.value - *b);
        }
        out.distances.push_back(d);
        if (d.excluded) out.strongest_excluded = cls;
    }

    if (!out.strongest_excluded) {
        out.label = "inconclusive";
    } else if (*out.strongest_excluded == "unentangled") {
        out.label = "entangled measurement certified";
    } else if (*out.strongest_excluded == "locc") {
        out.label = "non-LOCC measurement certified";
    } else {
        out.label = "non-classical measurement certified";
    }
    if (out.strongest_excluded) {
        std::ostringstream os;
        double sig = 0;
        for (const auto& d : out.distances)
            if (d.cls == *out.strongest_excluded) sig = d.sigmas;
        os << out.label << " (" << std::round(sig * 100.0) / 100.0 << "σ)";
        out.label = os.str();
    }
    return out;
}

std::string witness_to_json(const WitnessSpec& spec) {
    nlohmann::json j;
    j["name"] = spec.name();
    j["dims"] = {{"nx", spec.dims().nx},
                 {"ny", spec.dims().ny},
                 {"nz", spec.dims().nz},
                 {"nc", spec.dims().nc}};
    nlohmann::json entries = nlohmann::json::array();
    for (int z = 0; z < spec.dims().nz; ++z)
        for (int x = 0; x < spec.dims().nx; ++x)
            for (int y = 0; y < spec.dims().ny; ++y)
                for (int c = 0; c < spec.dims().nc; ++c) {
                    const double v = spec.coeff(c, x, y, z);
                    if (v == 0.0) continue;
                    entries.push_back(
                        {{"c", c + 1}, {"x", x}, {"y", y}, {"z", z}, {"value", v}});
                }
    j["coefficients"] = entries;
    j["bounds"] = spec.bounds();
    return j.dump(2);
}

WitnessSpec witness_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("witness JSON: ") + e.what());
    }
    try {
        TableDims dims{j.at("dims").at("nx").get<int>(), j.at("dims").at("ny").get<int>(),
                       j.at("dims").at("nz").get<int>(), j.at("dims").at("nc").get<int>()};
        if (dims.nx < 1 || dims.ny < 1 || dims.nz < 1 || dims.nc < 1)
            throw ParseError("witness JSON: dims must be positive");
        WitnessSpec spec(j.at("name").get<std::string>(), dims);
        for (const auto& e : j.at("coefficients")) {
            const int c = e.at("c").get<int>();
            const int x = e.at("x").get<int>();
            const int y = e.at("y").get<int>();
            const int z = e.at("z").get<int>();
            if (c < 1 || c > dims.nc || x < 0 || x >= dims.nx || y < 0 || y >= dims.ny ||
                z < 0 || z >= dims.nz)
                throw ParseError("witness JSON: coefficient index out of range");
            spec.coeff(c - 1, x, y, z) = e.at("value").get<double>();
        }
        if (j.contains("bounds"))
            for (const auto& [cls, v] : j.at("bounds").items())
                spec.set_bound(cls, v.get<double>());
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("witness JSON: ") + e.what());
    }
}

WitnessSpec load_witness(const std::string& name_or_path) {
    if (name_or_path == "w") return witness_w();
    if (name_or_path == "v") return witness_v();
    std::ifstream in(name_or_path);
    if (!in) throw ParseError("cannot open witness file: " + name_or_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return witness_from_json(buf.str());
}

}  // namespace emcert
