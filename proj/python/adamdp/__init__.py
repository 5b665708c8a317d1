"""Adherence-aware MDP solvers: optimal recommendations under partial adherence."""

from adamdp._core import (
    AdherenceDistribution,
    AdherenceSpec,
    AdversaryKind,
    BaselineAmbiguity,
    BestResponse,
    ConstrainedResult,
    InstanceBundle,
    McReport,
    MdpInstance,
    PolicyEvaluation,
    RobustBaselineResult,
    RobustThetaResult,
    SaddleReport,
    SolveResult,
    StationaryPolicy,
    SuboptimalityBound,
    ThetaSegment,
    ThetaSweep,
    ValueFunction,
    ValueSimilarReport,
    Violation,
    WorstCaseFamily,
    adversary_best_response,
    build_surrogate,
    build_surrogate_state_action,
    check_saddle,
    deterioration_curve,
    effective_policy,
    evaluate_constrained,
    evaluate_policy,
    export_lp,
    export_lp_string,
    export_mip,
    healthcare_template,
    load_bundle,
    machine_replacement_template,
    robust_baseline_solve,
    robust_theta_solve,
    save_bundle,
    simulate_random_adherence,
    solve_adamdp,
    solve_nominal,
    suboptimality_bound,
    theta_sweep,
    toy_counterexample,
    validate_bundle,
    validate_instance,
    value_similar_check,
    worst_case_family,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
