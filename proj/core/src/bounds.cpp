#include "emcert/bounds.hpp"

#include <cmath>
#include <limits>

namespace emcert {

namespace {

// odometer over digit tuples, first digit most significant (lexicographic)
bool next_tuple(std::vector<int>& t, int base) {
    for (int i = static_cast<int>(t.size()) - 1; i >= 0; --i) {
        if (++t[i] < base) return true;
        t[i] = 0;
    }
    return false;
}

double strategy_value(const WitnessSpec& spec, const std::vector<int>& alice,
                      const std::vector<int>& bob, const std::vector<std::vector<int>>& out) {
    const TableDims& d = spec.dims();
    double v = 0.0;
    for (int z = 0; z < d.nz; ++z)
        for (int x = 0; x < d.nx; ++x)
            for (int y = 0; y < d.ny; ++y)
                v += spec.coeff(out[z][2 * alice[x] + bob[y]], x, y, z);
    return v;
}

}  // namespace

ProbabilityTable strategy_to_table(const ClassicalStrategy& s, const TableDims& dims) {
    if (static_cast<int>(s.alice_msg.size()) != dims.nx ||
        static_cast<int>(s.bob_msg.size()) != dims.ny ||
        static_cast<int>(s.charlie_out.size()) != dims.nz)
        throw DimensionMismatchError("strategy_to_table: strategy does not match dims");
    for (const auto& f : s.charlie_out)
        if (f.size() != 4)
            throw DimensionMismatchError("strategy_to_table: charlie table must cover both bits");

    ProbabilityTable table(dims);
    for (int z = 0; z < dims.nz; ++z)
        for (int x = 0; x < dims.nx; ++x)
            for (int y = 0; y < dims.ny; ++y) {
                const int c = s.charlie_out[z][2 * s.alice_msg[x] + s.bob_msg[y]];
                if (c < 0 || c >= dims.nc)
                    throw DimensionMismatchError("strategy_to_table: outcome out of range");
                table.at(c, x, y, z) = 1.0;
            }
    return table;
}

BoundResult classical_bound(const WitnessSpec& spec, std::uint64_t budget) {
    const TableDims& d = spec.dims();
    if (d.nx > 62 || d.ny > 62) throw BudgetExceededError("classical_bound: too many inputs");

    const double count = std::pow(2.0, d.nx) * std::pow(2.0, d.ny) *
                         std::pow(static_cast<double>(d.nc), 4.0 * d.nz);
    if (count > static_cast<double>(budget))
        throw BudgetExceededError("classical_bound: strategy count exceeds budget");

    BoundResult best;
    best.max_value = -std::numeric_limits<double>::infinity();

    std::vector<int> alice(d.nx, 0);
    do {
        std::vector<int> bob(d.ny, 0);
        do {
            // flatten charlie's [z][4] table into one odometer
            std::vector<int> flat(static_cast<std::size_t>(d.nz) * 4, 0);
            do {
                std::vector<std::vector<int>> out(d.nz, std::vector<int>(4));
                for (int z = 0; z < d.nz; ++z)
                    for (int k = 0; k < 4; ++k) out[z][k] = flat[4 * z + k];
                ++best.n_enumerated;
                const double v = strategy_value(spec, alice, bob, out);
                if (v > best.max_value) {
                    best.max_value = v;
                    best.argmax = ClassicalStrategy{alice, bob, out};
                }
            } while (next_tuple(flat, d.nc));
        } while (next_tuple(bob, 2));
    } while (next_tuple(alice, 2));

    return best;
}

}  // namespace emcert
