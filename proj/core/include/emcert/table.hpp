#ifndef EMCERT_TABLE_HPP
#define EMCERT_TABLE_HPP

#include <cstddef>
#include <vector>

#include "emcert/errors.hpp"

namespace emcert {

/// Shape of a conditional distribution p(c|x,y,z): preparation counts for the
/// two sources, setting count and outcome count for the measurement box.
/// Outcomes are 1-based in files and printed output, 0-based in memory.
struct TableDims {
    int nx = 0;
    int ny = 0;
    int nz = 0;
    int nc = 0;

    bool operator==(const TableDims&) const = default;
    std::size_t cells() const {
        return static_cast<std::size_t>(nx) * ny * nz * nc;
    }
    std::size_t index(int c, int x, int y, int z) const {
        return ((static_cast<std::size_t>(z) * nx + x) * ny + y) * nc + c;
    }
};

/// p(c|x,y,z) laid out per TableDims::index.
class ProbabilityTable {
public:
    ProbabilityTable() = default;
    explicit ProbabilityTable(TableDims dims)
        : dims_(dims), p_(dims.cells(), 0.0) {}

    const TableDims& dims() const { return dims_; }
    double& at(int c, int x, int y, int z) { return p_[dims_.index(c, x, y, z)]; }
    double at(int c, int x, int y, int z) const { return p_[dims_.index(c, x, y, z)]; }
    const std::vector<double>& values() const { return p_; }

    /// max over (x,y,z) of |sum_c p - 1|
    double normalization_defect() const {
        double worst = 0.0;
        for (int z = 0; z < dims_.nz; ++z)
            for (int x = 0; x < dims_.nx; ++x)
                for (int y = 0; y < dims_.ny; ++y) {
                    double s = 0.0;
                    for (int c = 0; c < dims_.nc; ++c) s += at(c, x, y, z);
                    worst = std::max(worst, std::abs(s - 1.0));
                }
        return worst;
    }

private:
    TableDims dims_;
    std::vector<double> p_;
};

}  // namespace emcert

#endif
