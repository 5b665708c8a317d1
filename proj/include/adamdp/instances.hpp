#pragma once

#include "adamdp/mdp.hpp"
#include "adamdp/robust.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace adamdp {

/// An instance plus named baseline policies and provenance metadata. Template
/// bundles ship with the transition tensor unfilled (NaN) and refuse to
/// validate until the user completes them from the original data source.
struct InstanceBundle {
    std::string name;
    std::string description;
    std::string provenance;
    MdpInstance instance;
    std::vector<std::string> state_names;
    std::vector<std::string> action_names;
    std::map<std::string, StationaryPolicy> baselines;
    std::optional<BaselineAmbiguity> ambiguity;
    bool transitions_required_external = false;
};

/// Bundle-level validation: REQUIRED-EXTERNAL templates are reported as such,
/// then instance and baseline invariants are checked.
std::vector<Violation> validate_bundle(const InstanceBundle& bundle);

/// Five-state chain with a start state, two intermediate states and two
/// absorbing states whose rewards differ by epsilon. Action 0 moves to the
/// lower-numbered successor, action 1 to the higher one; absorbing states
/// self-loop under both. Ships baselines "base" (1->3, 2->5, 3->4) and "alg"
/// (1->2, 2->4, 3->5).
InstanceBundle toy_counterexample(double lambda, int epsilon);

/// Ten-state machine replacement benchmark skeleton: rewards, names, discount
/// and start state are fixed; transition probabilities must be completed from
/// the original source (marked REQUIRED-EXTERNAL). Baselines "always_wait"
/// and "repair_in_8_R1".
InstanceBundle machine_replacement_template();

/// Six-state treatment benchmark skeleton (five severity states plus an
/// absorbing mortality state). Action rewards 20/15/10 for low/medium/high
/// dosage, 0 in the mortality state; transitions REQUIRED-EXTERNAL except the
/// absorbing mortality row. Baselines "always_low", "always_medium",
/// "always_high".
InstanceBundle healthcare_template();

/// JSON round trip. Numbers survive save/load bit-exactly; unfilled template
/// entries are stored as null. Unknown keys are tolerated (a warning per key
/// is collected into *warnings when given).
InstanceBundle load_bundle(const std::string& path, std::vector<std::string>* warnings = nullptr);
void save_bundle(const InstanceBundle& bundle, const std::string& path);

} // namespace adamdp
