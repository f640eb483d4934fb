"""Scenario configs, execution, and report assembly.

A scenario bundles one series family with hypothesis checks, a convergent
table, and optional linear-form instances and relation searches.  Reports
are deterministic: identical configs produce byte-identical JSON (timing
is kept out of the canonical document).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import approx, criteria, relations
from .approx import SeriesSpec
from .criteria import HypothesisSet
from .exactcore import RefusalError
from .relations import SearchConfig
from .reporting import fraction_str, to_canonical_json
from .sequences import KINDS, SequenceSpec


class ConfigError(Exception):
    """Invalid scenario config; carries the offending field path."""

    def __init__(self, path: str, message: str):
        super().__init__("config error at %s: %s" % (path, message))
        self.path = path


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    series: SeriesSpec
    hypotheses: tuple[HypothesisSet, ...]
    window: tuple[int, int]
    search: Optional[SearchConfig] = None
    probe_bound: Optional[int] = None
    subspace_orders: Optional[tuple[int, int]] = None
    subspace_precision: int = 2

    def validate(self) -> None:
        n0, n1 = self.window
        if n0 < 1 or n1 < n0:
            raise ConfigError("window", "need 1 <= start <= end")
        asymptotic = {k for k in criteria.HYPOTHESIS_KINDS if k != "divisor-gap"}
        if any(h.kind in asymptotic for h in self.hypotheses) and n1 - n0 + 1 < 4:
            raise ConfigError("window", "length >= 4 required by asymptotic checks")
        for idx, h in enumerate(self.hypotheses):
            try:
                h.validate_for_pipeline(self.series.m)
            except ValueError as exc:
                raise ConfigError("hypotheses[%d]" % idx, str(exc)) from exc
        if self.subspace_orders is not None:
            a, b = self.subspace_orders
            if a < 1 or b < a:
                raise ConfigError("subspace.orders", "need 1 <= first <= last")


@dataclass
class Report:
    scenario: str
    window: tuple[int, int]
    verdicts: list = field(default_factory=list)
    convergents: list = field(default_factory=list)
    subspace: list = field(default_factory=list)
    relation_findings: Optional[dict] = None
    probe: Optional[dict] = None
    refusals: list = field(default_factory=list)
    timing_seconds: Optional[float] = None

    def payload(self, include_timing: bool = False) -> dict:
        doc = {
            "scenario": self.scenario,
            "window": list(self.window),
            "verdicts": self.verdicts,
            "convergents": self.convergents,
            "subspace": self.subspace,
            "relations": self.relation_findings,
            "probe": self.probe,
            "refusals": self.refusals,
        }
        if include_timing:
            doc["timing_seconds"] = self.timing_seconds
        return doc

    def to_json(self, include_timing: bool = False) -> str:
        return to_canonical_json(self.payload(include_timing))

    @property
    def any_violated(self) -> bool:
        for rec in self.verdicts:
            v = rec.get("verdict", "")
            if v.startswith("violated") or v == "fails":
                return True
        return False

    def exit_code(self) -> int:
        if self.refusals:
            return 3
        return 1 if self.any_violated else 0

    def to_table(self) -> str:
        lines = ["scenario: %s   window: %d..%d" % (self.scenario, *self.window)]
        if self.verdicts:
            lines.append("")
            lines.append("hypothesis checks")
            for rec in self.verdicts:
                lines.append("  %-44s %s" % (rec["hypothesis"], rec["verdict"]))
        if self.convergents:
            lines.append("")
            lines.append("convergents (series, order, p, q, exponent)")
            for row in self.convergents:
                p = row["p"] if len(row["p"]) <= 24 else row["p"][:21] + "..."
                q = row["q"] if len(row["q"]) <= 24 else row["q"][:21] + "..."
                exp = ("%.6f" % float(Fraction(row["exponent"]))
                       if row["exponent"] is not None else "-")
                lines.append("  i=%d N=%-3d p=%-24s q=%-24s delta_N=%s"
                             % (row["series"], row["order"], p, q, exp))
        if self.subspace:
            lines.append("")
            lines.append("linear-form instances (order, height, product, max exponent)")
            for row in self.subspace:
                h = row["height"] if len(row["height"]) <= 24 else row["height"][:21] + "..."
                prod = row["product"].get("log2mag", "-inf")
                dmax = ("%.6f" % float(Fraction(row["delta_prime_max"]))
                        if row["delta_prime_max"] is not None else "unbounded")
                lines.append("  N=%-3d H=%-24s log2(product)=%-14s delta'_max=%s"
                             % (row["order"], h, prod, dmax))
        if self.relation_findings is not None:
            lines.append("")
            rf = self.relation_findings
            lines.append("relation search: method=%s bound=%d precision=2^-%d -> %d candidate(s)"
                         % (rf["method"], rf["bound"], rf["precision_bits"],
                            len(rf["candidates"])))
            for cand in rf["candidates"]:
                lines.append("  z=%s status=%s" % (cand["z"], cand["status"]))
        if self.probe is not None:
            lines.append("")
            lines.append("independence probe: %d/%d candidates refuted, witness d(%d)=%d vs d(%d)=%d"
                         % (self.probe["refuted"], self.probe["total_candidates"],
                            self.probe["witness"][0][0], self.probe["witness"][0][1],
                            self.probe["witness"][1][0], self.probe["witness"][1][1]))
        if self.refusals:
            lines.append("")
            lines.append("refusals")
            for r in self.refusals:
                lines.append("  " + r)
        if self.timing_seconds is not None:
            lines.append("")
            lines.append("elapsed: %.3fs" % self.timing_seconds)
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Hypothesis dispatch.
# ---------------------------------------------------------------------------


def _run_hypothesis(h: HypothesisSet, series: SeriesSpec, window) -> dict:
    coeffs = list(series.coefficients)
    denoms = series.denominators
    if h.kind == "spike-decay":
        return criteria.check_spike_decay(coeffs, denoms, h.delta, window).to_record()
    if h.kind == "spike-decay-strong":
        return criteria.check_spike_decay_strong(coeffs, denoms, h.delta, window).to_record()
    if h.kind == "spike-rootstep":
        return criteria.check_spike_rootstep(coeffs, denoms, h.delta, h.epsilon,
                                             window).to_record()
    if h.kind == "divisor-gap":
        return criteria.check_divisor_gap(denoms, h.delta, window).to_record()
    if h.kind == "growth-window":
        return criteria.check_growth_window(denoms, h.m or series.m, window).to_record()
    if h.kind == "ratio-vanishing":
        return criteria.check_ratio_vanishing(coeffs, window).to_record()
    if h.kind == "coeff-logpower":
        alpha = h.alpha if h.alpha is not None else Fraction(1, 2)
        return criteria.check_coeff_logpower(coeffs, denoms, alpha, h.epsilon,
                                             window).to_record()
    if h.kind == "coeff-loglog":
        return criteria.check_coeff_loglog(coeffs, denoms, h.epsilon, window).to_record()
    if h.kind == "coeff-sqrt-power":
        # applies to the first coefficient family; realign or reorder to
        # target another one
        return criteria.check_coeff_sqrt_power(coeffs[0], h.delta, window).to_record()
    raise ConfigError("hypotheses", "unknown kind %r" % h.kind)


def run_scenario(config: ScenarioConfig) -> Report:
    """Execute every configured stage; refusals are recorded, not fatal."""
    config.validate()
    t0 = time.perf_counter()
    report = Report(scenario=config.name, window=config.window)
    for h in config.hypotheses:
        try:
            report.verdicts.append(_run_hypothesis(h, config.series, config.window))
        except RefusalError as exc:
            report.refusals.append("hypothesis %s: %s" % (h.label(), exc))
    n0, n1 = config.window
    for order in range(n0, n1 + 1):
        for i in range(1, config.series.m + 1):
            cv = approx.convergent(config.series, i, order)
            try:
                exponent = approx.measured_exponent(config.series, i, order)
                exp_str: Optional[str] = fraction_str(exponent)
            except RefusalError as exc:
                report.refusals.append("exponent i=%d N=%d: %s" % (i, order, exc))
                exp_str = None
            except ValueError:
                exp_str = None  # exact rational hit: exponent unbounded
            report.convergents.append({
                "series": i,
                "order": order,
                "p": str(cv.p),
                "q": str(cv.q),
                "exponent": exp_str,
            })
    if config.subspace_orders is not None:
        for order in range(config.subspace_orders[0], config.subspace_orders[1] + 1):
            try:
                inst = approx.build_subspace_instance(
                    config.series, order, config.subspace_precision)
            except RefusalError as exc:
                report.refusals.append("subspace N=%d: %s" % (order, exc))
                continue
            report.subspace.append({
                "order": inst.order,
                "point": [str(x) for x in inst.point],
                "height": str(inst.height),
                "product": inst.product.serialize(),
                "delta_prime_max": (fraction_str(inst.delta_prime_max)
                                    if inst.delta_prime_max is not None else None),
            })
    if config.search is not None:
        try:
            values = [approx.value_enclosure(config.series, i, config.search.precision_bits)
                      for i in range(1, config.series.m + 1)]
            from .exactcore import Enclosure

            encs = [Enclosure.point(1)] + values
            cands = relations.find_relations(encs, config.search)
            rows = []
            for cand in cands:
                status = cand.status
                if status != relations.STATUS_EXACT:
                    status = relations.verify_relation_on_convergents(
                        cand.z, config.series, config.window)
                    if status == relations.STATUS_PLAUSIBLE:
                        status = cand.status
                rows.append({"z": list(cand.z), "status": status,
                             "residual": cand.residual})
            report.relation_findings = {
                "method": config.search.method,
                "bound": config.search.coefficient_bound,
                "precision_bits": config.search.precision_bits,
                "candidates": rows,
            }
        except RefusalError as exc:
            report.refusals.append("relation search: %s" % exc)
    if config.probe_bound is not None:
        try:
            report.probe = relations.probe_divisor_pair_independence(
                config.probe_bound, config.window).to_record()
        except (RefusalError, ValueError) as exc:
            report.refusals.append("independence probe: %s" % exc)
    report.timing_seconds = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------------------
# Builtin scenarios and config parsing.
# ---------------------------------------------------------------------------


def _unit_divisor_series() -> SeriesSpec:
    return relations.unit_divisor_pair_spec()


def _builtin_corollary() -> ScenarioConfig:
    return ScenarioConfig(
        name="corollary",
        series=_unit_divisor_series(),
        hypotheses=(
            HypothesisSet(kind="spike-decay", delta=Fraction(3, 5)),
            HypothesisSet(kind="spike-decay-strong", delta=Fraction(3, 5)),
            HypothesisSet(kind="divisor-gap", delta=Fraction(1, 2)),
            HypothesisSet(kind="growth-window", m=2),
        ),
        window=(1, 8),
        search=SearchConfig(coefficient_bound=20, precision_bits=332),
        probe_bound=10,
        subspace_orders=(3, 8),
        subspace_precision=2,
    )


def _builtin_comparison() -> ScenarioConfig:
    return ScenarioConfig(
        name="theoremA-comparison",
        series=_unit_divisor_series(),
        hypotheses=(
            HypothesisSet(kind="spike-decay", delta=Fraction(51, 100)),
            HypothesisSet(kind="spike-decay", delta=Fraction(3, 4)),
            HypothesisSet(kind="spike-decay", delta=Fraction(99, 100)),
            HypothesisSet(kind="spike-decay-strong", delta=Fraction(1, 100)),
            HypothesisSet(kind="spike-decay-strong", delta=Fraction(1)),
        ),
        window=(1, 12),
    )


_BUILTINS = {
    "corollary": _builtin_corollary,
    "theoremA-comparison": _builtin_comparison,
}


def list_scenarios() -> list[str]:
    """Builtin scenario names, stable order."""
    return sorted(_BUILTINS)


def builtin_scenario(name: str) -> ScenarioConfig:
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise ConfigError("scenario", "unknown builtin %r (have: %s)"
                          % (name, ", ".join(list_scenarios()))) from None


def _parse_fraction(value, path: str) -> Fraction:
    try:
        if isinstance(value, str):
            return Fraction(value)
        if isinstance(value, int):
            return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(path, str(exc)) from exc
    raise ConfigError(path, "expected a rational like '3/5', got %r" % (value,))


def _parse_sequence(payload, path: str) -> SequenceSpec:
    if not isinstance(payload, dict) or "kind" not in payload:
        raise ConfigError(path, "expected a mapping with a 'kind'")
    kind = payload["kind"]
    if kind not in KINDS:
        raise ConfigError(path + ".kind", "unknown kind %r (have: %s)"
                          % (kind, ", ".join(KINDS)))
    offset = int(payload.get("offset", 1))
    try:
        if kind == "constant":
            return SequenceSpec.constant(int(payload["value"]), offset=offset)
        if kind == "polynomial":
            return SequenceSpec.polynomial(*[int(c) for c in payload["coeffs"]],
                                           offset=offset)
        if kind == "power":
            return SequenceSpec.power(int(payload["base"]), offset=offset)
        if kind == "table":
            return SequenceSpec.table([int(v) for v in payload["values"]], offset=offset)
        if kind == "prefix-square-recurrence":
            return SequenceSpec.prefix_square(int(payload.get("seed", 2)), offset=offset)
        return SequenceSpec(kind=kind, offset=offset)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(path, str(exc)) from exc


def _parse_hypothesis(payload, path: str) -> HypothesisSet:
    if not isinstance(payload, dict) or "kind" not in payload:
        raise ConfigError(path, "expected a mapping with a 'kind'")
    kwargs = {}
    for key in ("delta", "epsilon", "alpha"):
        if key in payload:
            kwargs[key] = _parse_fraction(payload[key], "%s.%s" % (path, key))
    if "m" in payload:
        kwargs["m"] = int(payload["m"])
    try:
        return HypothesisSet(kind=payload["kind"], **kwargs)
    except ValueError as exc:
        raise ConfigError(path + ".kind", str(exc)) from exc


def parse_scenario_config(payload: dict) -> ScenarioConfig:
    """Build a ScenarioConfig from a parsed YAML/JSON mapping."""
    if not isinstance(payload, dict):
        raise ConfigError("<root>", "expected a mapping")
    if "series" not in payload:
        raise ConfigError("series", "missing")
    sp = payload["series"]
    if not isinstance(sp, dict):
        raise ConfigError("series", "expected a mapping")
    mode = sp.get("mode", "sum-direct")
    if mode not in approx.MODES:
        raise ConfigError("series.mode", "unknown mode %r (have: %s)"
                          % (mode, ", ".join(approx.MODES)))
    coeff_payload = sp.get("coefficients")
    if not isinstance(coeff_payload, list) or not coeff_payload:
        raise ConfigError("series.coefficients", "expected a non-empty list")
    coeffs = tuple(
        _parse_sequence(cp, "series.coefficients[%d]" % k)
        for k, cp in enumerate(coeff_payload)
    )
    if "denominators" not in sp:
        raise ConfigError("series.denominators", "missing")
    denoms = _parse_sequence(sp["denominators"], "series.denominators")
    series = SeriesSpec(
        mode=mode,
        coefficients=coeffs,
        denominators=denoms,
        delta=_parse_fraction(sp.get("delta", "0"), "series.delta"),
        epsilon=(_parse_fraction(sp["epsilon"], "series.epsilon")
                 if "epsilon" in sp else None),
        require_coeff_le_denom=bool(sp.get("require_coeff_le_denom", False)),
    )
    window_payload = payload.get("window")
    if (not isinstance(window_payload, (list, tuple)) or len(window_payload) != 2):
        raise ConfigError("window", "expected [start, end]")
    window = (int(window_payload[0]), int(window_payload[1]))
    hypotheses = tuple(
        _parse_hypothesis(hp, "hypotheses[%d]" % k)
        for k, hp in enumerate(payload.get("hypotheses", []))
    )
    search = None
    if "search" in payload and payload["search"] is not None:
        s = payload["search"]
        try:
            search = SearchConfig(
                coefficient_bound=int(s["bound"]),
                precision_bits=int(s.get("precision", 128)),
                method=s.get("method", "exhaustive"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("search", str(exc)) from exc
    probe_bound = None
    if "probe" in payload and payload["probe"] is not None:
        try:
            probe_bound = int(payload["probe"]["bound"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("probe.bound", str(exc)) from exc
    subspace_orders = None
    subspace_precision = 2
    if "subspace" in payload and payload["subspace"] is not None:
        sub = payload["subspace"]
        try:
            orders = sub["orders"]
            subspace_orders = (int(orders[0]), int(orders[1]))
            subspace_precision = int(sub.get("precision", 2))
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise ConfigError("subspace", str(exc)) from exc
    config = ScenarioConfig(
        name=str(payload.get("name", "custom")),
        series=series,
        hypotheses=hypotheses,
        window=window,
        search=search,
        probe_bound=probe_bound,
        subspace_orders=subspace_orders,
        subspace_precision=subspace_precision,
    )
    config.validate()
    return config
