#ifndef EMCERT_BOUNDS_HPP
#define EMCERT_BOUNDS_HPP

#include <cstdint>
#include <vector>

#include "emcert/witness.hpp"

namespace emcert {

/// One deterministic classical strategy: each source forwards one bit and the
/// measurement box outputs a fixed function of the two bits and the setting.
/// charlie_out is 0-based and indexed [z][2*bA + bB].
struct ClassicalStrategy {
    std::vector<int> alice_msg;                 // x -> {0,1}
    std::vector<int> bob_msg;                   // y -> {0,1}
    std::vector<std::vector<int>> charlie_out;  // [z][2*bA+bB] -> c in 0..nc-1
};

struct BoundResult {
    double max_value = 0.0;
    ClassicalStrategy argmax;
    std::uint64_t n_enumerated = 0;
};

/// Deterministic table: p(c|x,y,z) = 1 iff c = charlie_out[z][...].
ProbabilityTable strategy_to_table(const ClassicalStrategy& s, const TableDims& dims);

/// Exact classical bound by exhaustive enumeration of every deterministic
/// strategy (2^nx * 2^ny * nc^(4 nz) of them). The argmax is the first
/// maximizer in lexicographic order over (alice_msg, bob_msg, charlie_out).
/// Throws BudgetExceededError when the strategy count exceeds `budget`.
BoundResult classical_bound(const WitnessSpec& spec, std::uint64_t budget = 100'000'000);

}  // namespace emcert

#endif
