#pragma once

#include "adamdp/mdp.hpp"

#include <iosfwd>
#include <vector>

namespace adamdp {

/// Maximum number of states at which the decision maker adheres.
struct CardinalityBudget {
    int k = 0;
};

struct ConstrainedResult {
    std::vector<int> worst_u; // binary adherence pattern, lexicographically smallest on ties
    double worst_return = 0.0;
    long subsets_evaluated = 0;
};

/// Exhaustive minimization of the effective return over binary adherence
/// patterns with at most k adhering states. The problem is hard in general;
/// enumeration (guarded at 1e6 feasible subsets) is the reference method at
/// this scale.
ConstrainedResult evaluate_constrained(const MdpInstance& inst, const StationaryPolicy& alg,
                                       const StationaryPolicy& base, CardinalityBudget budget);

/// Writes the cardinality-constrained worst-case model as a mixed-integer
/// program in CPLEX LP text format: free values v_s, free linearization
/// variables z_s with big-M bands tied to binary u_s, and one cardinality row.
void export_mip(const MdpInstance& inst, const StationaryPolicy& alg,
                const StationaryPolicy& base, CardinalityBudget budget, std::ostream& sink);

} // namespace adamdp
