"""Exact-arithmetic workbench for rapidly converging series.

Builds exact convergents p/q with shared denominator q_N = b_1*...*b_N,
certifies tail bounds, checks growth hypotheses on coefficient/denominator
sequences in a log-domain-with-exact-escalation regime, constructs
linear-form product instances, and searches for (or refutes) integer
relations among series values.
"""

from .approx import (
    Convergent,
    ErrorReport,
    SeriesSpec,
    SubspaceInstance,
    build_subspace_instance,
    convergent,
    error_report,
    geometric_tail_bound,
    measured_exponent,
    power_tail_bound,
    product_tail_bound,
    tail_enclosure,
    value_enclosure,
    verify_forms_inequality,
)
from .criteria import (
    ConditionVerdict,
    CriteriaConfig,
    GrowthWindowReport,
    HypothesisSet,
    check_coeff_loglog,
    check_coeff_logpower,
    check_coeff_sqrt_power,
    check_divisor_gap,
    check_growth_window,
    check_ratio_vanishing,
    check_spike_decay,
    check_spike_decay_strong,
    check_spike_rootstep,
)
from .exactcore import (
    BigRational,
    Enclosure,
    LogMag,
    RefusalError,
    cmp_logmag,
    cmp_products,
    enclose_sum,
    scale_logmag,
    to_logmag,
)
from .relations import (
    RelationCandidate,
    SearchConfig,
    find_relations,
    probe_divisor_pair_independence,
    unit_divisor_pair_spec,
    verify_relation_on_convergents,
)
from .scenarios import (
    Report,
    ScenarioConfig,
    builtin_scenario,
    list_scenarios,
    run_scenario,
)
from .sequences import (
    SequenceSpec,
    SequenceWindow,
    divisor_count,
    prefix_square_denominators,
    sieve_window,
    sigma,
    totient,
)

__all__ = [
    "BigRational",
    "ConditionVerdict",
    "Convergent",
    "CriteriaConfig",
    "Enclosure",
    "ErrorReport",
    "GrowthWindowReport",
    "HypothesisSet",
    "LogMag",
    "RefusalError",
    "RelationCandidate",
    "Report",
    "ScenarioConfig",
    "SearchConfig",
    "SequenceSpec",
    "SequenceWindow",
    "SeriesSpec",
    "SubspaceInstance",
    "build_subspace_instance",
    "builtin_scenario",
    "check_coeff_loglog",
    "check_coeff_logpower",
    "check_coeff_sqrt_power",
    "check_divisor_gap",
    "check_growth_window",
    "check_ratio_vanishing",
    "check_spike_decay",
    "check_spike_decay_strong",
    "check_spike_rootstep",
    "cmp_logmag",
    "cmp_products",
    "convergent",
    "divisor_count",
    "enclose_sum",
    "error_report",
    "find_relations",
    "geometric_tail_bound",
    "list_scenarios",
    "measured_exponent",
    "power_tail_bound",
    "prefix_square_denominators",
    "probe_divisor_pair_independence",
    "product_tail_bound",
    "run_scenario",
    "scale_logmag",
    "sieve_window",
    "sigma",
    "tail_enclosure",
    "to_logmag",
    "totient",
    "unit_divisor_pair_spec",
    "value_enclosure",
    "verify_forms_inequality",
    "verify_relation_on_convergents",
]

__version__ = "0.1.0"
