"""Experiment orchestration: configuration ingestion, dispatch to the library
modules, and deterministic report emission.

All randomness is drawn from one seeded generator per record, so identical
(config, seed) pairs produce byte-identical JSON reports.  Wall-clock timings
are collected but kept out of the canonical serialization; pass
``include_timing=True`` to emit them.
"""

from __future__ import annotations

import json
import random
import re
import time
from dataclasses import dataclass, field

from . import __version__
from .autfunctors import (
    outer_group_experiment,
    random_semi_inner_data,
    semi_inner_functor,
    skew_inner_functor,
    verify_functor,
)
from .errors import AxiomViolation, ConfigError, ParseError, SemicatError
from .ibn import classify_type, left_right_ibn_agree
from .lie import (
    UniversalEnvelope,
    abelian,
    chevalley_involution,
    coefficient_ring,
    commutative_multiply,
    cyclic_aut_check,
    free_module_basis,
    heisenberg,
    is_unit,
    lie_from_file,
    lift_semi_automorphism,
    multiply_by_word_rewriting,
    multiset_count,
    restricted_module_basis,
    sl2,
    verify_restricted,
)
from .semirings import (
    AXIOM_ORDER,
    automorphism_groups,
    check_axioms_on_sample,
    find_axiom_witness,
    load_semiring,
    units_of,
)

EXPERIMENT_KINDS = (
    "validate", "ibn", "aut-groups", "functor-verify", "out-group", "lie-suite",
)


@dataclass
class ExperimentConfig:
    kind: str
    semiring: str = None
    lie: str = None
    cap: int = 2
    degree_cap: int = 3
    seed: int = 0
    budget: int = 200_000
    fmt: str = "json"
    out: str = None

    def validate(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if self.cap < 1 or self.degree_cap < 1:
            raise ConfigError("caps must be at least 1")
        if self.kind == "lie-suite":
            if not self.lie:
                raise ConfigError("lie-suite needs a lie algebra file or name")
        elif not self.semiring:
            raise ConfigError(f"{self.kind} needs a semiring file or name")
        if self.fmt not in ("json", "text"):
            raise ConfigError(f"unknown format {self.fmt!r}")

    def echo(self):
        return {
            "kind": self.kind,
            "semiring": self.semiring,
            "lie": self.lie,
            "cap": self.cap,
            "degree_cap": self.degree_cap,
            "seed": self.seed,
            "budget": self.budget,
        }


@dataclass
class HarnessRecord:
    name: str
    regime: str
    status: str
    witness: str = None
    seed: int = None
    timing_ms: float = None

    @property
    def passed(self):
        return self.status == "pass"

    def to_json(self, include_timing=False):
        data = {
            "name": self.name,
            "regime": self.regime,
            "status": self.status,
            "witness": self.witness,
        }
        if self.regime == "sampled":
            data["seed"] = self.seed
        if include_timing and self.timing_ms is not None:
            data["timing_ms"] = self.timing_ms
        return data


@dataclass
class Report:
    experiment: dict
    records: list = field(default_factory=list)
    version: str = __version__

    @property
    def verdict(self):
        if not self.records:
            return "vacuous-pass"
        return "pass" if all(r.passed for r in self.records) else "fail"

    def to_json(self, include_timing=False):
        return {
            "experiment": self.experiment,
            "records": [r.to_json(include_timing) for r in self.records],
            "verdict": self.verdict,
            "version": self.version,
        }


def emit_report(report, fmt="json", include_timing=False):
    if fmt == "json":
        return json.dumps(report.to_json(include_timing), sort_keys=True, indent=2)
    if fmt == "text":
        lines = [f"experiment: {json.dumps(report.experiment, sort_keys=True)}"]
        width = max((len(r.name) for r in report.records), default=8)
        for r in report.records:
            lines.append(f"  {r.name:<{width}}  {r.regime:<10}  {r.status}")
            if r.witness and not r.passed:
                lines.append(f"    witness: {r.witness}")
        lines.append(f"verdict: {report.verdict}")
        return "\n".join(lines)
    raise ConfigError(f"unknown format {fmt!r}")


def report_from_json(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad report JSON: {exc}") from exc
    records = [
        HarnessRecord(
            name=r["name"], regime=r["regime"], status=r["status"],
            witness=r.get("witness"), seed=r.get("seed"),
            timing_ms=r.get("timing_ms"))
        for r in data["records"]
    ]
    return Report(
        experiment=data["experiment"], records=records,
        version=data.get("version", __version__))


class _Recorder:
    def __init__(self, seed):
        self.seed = seed
        self.records = []

    def run(self, name, regime, body):
        start = time.perf_counter()
        try:
            witness = body()
        except SemicatError as exc:
            status, witness = "fail", f"{type(exc).__name__}: {exc}"
        else:
            status = "pass"
            witness = witness if isinstance(witness, str) else None
        self.records.append(HarnessRecord(
            name=name, regime=regime, status=status, witness=witness,
            seed=self.seed if regime == "sampled" else None,
            timing_ms=round((time.perf_counter() - start) * 1000.0, 3)))

    def add(self, name, regime, passed, witness=None):
        self.records.append(HarnessRecord(
            name=name, regime=regime, status="pass" if passed else "fail",
            witness=witness,
            seed=self.seed if regime == "sampled" else None))


def run_experiment(config):
    """Dispatch a validated config to its module; failures become records."""
    config.validate()
    rec = _Recorder(config.seed)
    runner = {
        "validate": _run_validate,
        "ibn": _run_ibn,
        "aut-groups": _run_aut_groups,
        "functor-verify": _run_functor_verify,
        "out-group": _run_out_group,
        "lie-suite": _run_lie_suite,
    }[config.kind]
    runner(config, rec)
    return Report(experiment=config.echo(), records=rec.records)


def _run_validate(config, rec):
    import os

    from .errors import IndexOutOfRange
    from .semirings import validate_semiring

    spec = config.semiring
    if os.path.exists(spec):
        # raw tables from a file: malformed shapes are a parse error, but
        # axiom violations become failed records
        try:
            with open(spec) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot parse semiring file {spec}: {exc}") from exc
        for field_name in ("size", "zero", "one", "add", "mul"):
            if field_name not in data:
                raise ParseError(f"semiring file missing field {field_name!r}")
        add, mul = data["add"], data["mul"]
        zero, one = data["zero"], data["one"]
        try:
            validate_semiring(add, mul, zero, one, data.get("name", "custom"))
        except AxiomViolation:
            pass
        except (IndexOutOfRange, TypeError) as exc:
            raise ParseError(f"malformed semiring tables: {exc}") from exc
        for axiom in AXIOM_ORDER:
            witness = find_axiom_witness(add, mul, zero, one, axiom)
            rec.add(f"axiom:{axiom}", "exhaustive", witness is None,
                    witness=None if witness is None else repr(witness))
        return
    semiring = load_semiring(spec)
    if semiring.is_finite:
        for axiom in AXIOM_ORDER:
            witness = find_axiom_witness(
                semiring.add_table, semiring.mul_table,
                semiring.zero, semiring.one, axiom)
            rec.add(f"axiom:{axiom}", "exhaustive", witness is None,
                    witness=None if witness is None else repr(witness))
    else:
        rng = random.Random(f"{config.seed}:validate")
        sample = [semiring.zero, semiring.one] + [
            semiring.sample_element(rng) for _ in range(8)
        ]

        def body():
            check_axioms_on_sample(semiring, sample)

        rec.run("axioms-on-sample", "sampled", body)


def _run_ibn(config, rec):
    semiring = load_semiring(config.semiring)
    cap = max(2, config.cap)
    classification = classify_type(semiring, cap)
    rec.add("classification", classification.regime, True,
            witness=json.dumps(classification.to_json(), sort_keys=True))
    agreement = left_right_ibn_agree(semiring, cap)
    rec.add("left-right-agreement", classification.regime, agreement.agree,
            witness=json.dumps(agreement.to_json(), sort_keys=True))


def _run_aut_groups(config, rec):
    semiring = load_semiring(config.semiring)
    groups = automorphism_groups(semiring)
    rec.add("orders", "exhaustive", True,
            witness=json.dumps({
                "aut": groups.aut_order,
                "inn": groups.inn_order,
                "out": groups.out_order}, sort_keys=True))
    perms = {a.perm for a in groups.aut}
    closed = all(a.then(b).perm in perms for a in groups.aut for b in groups.aut)
    has_inverses = all(a.inverted().perm in perms for a in groups.aut)
    rec.add("group-closure", "exhaustive", closed and has_inverses)
    inner_perms = {a.perm for a in groups.inn}
    normal = all(
        a.inverted().then(i).then(a).perm in inner_perms
        for a in groups.aut for i in groups.inn)
    rec.add("inner-normality", "exhaustive", normal)
    units = units_of(semiring)
    units_closed = all(
        semiring.mul(u, v) in units for u in units for v in units)
    units_inverses = all(semiring.try_unit_inverse(u) in units for u in units)
    rec.add("units-form-group", "exhaustive", units_closed and units_inverses)


def _merge_verification(rec, prefix, report):
    for r in report.records:
        rec.records.append(HarnessRecord(
            name=f"{prefix}:{r.name}", regime=r.regime, status=r.status,
            witness=r.witness, seed=rec.seed if r.regime == "sampled" else None))


def _run_functor_verify(config, rec):
    semiring = load_semiring(config.semiring)
    if semiring.is_finite:
        groups = automorphism_groups(semiring)
        for idx, sigma in enumerate(groups.aut):
            functor = semi_inner_functor(skew_inner_functor(sigma, config.cap))
            _merge_verification(
                rec, f"skew[{idx}]",
                verify_functor(functor, budget=config.budget, seed=config.seed))
        rng = random.Random(f"{config.seed}:semi-inner")
        data = random_semi_inner_data(semiring, config.cap, rng, groups)
        _merge_verification(
            rec, "semi-inner",
            verify_functor(semi_inner_functor(data), budget=config.budget,
                           seed=config.seed))
    else:
        from .semirings import identity_automorphism

        functor = semi_inner_functor(
            skew_inner_functor(identity_automorphism(semiring), config.cap))
        _merge_verification(
            rec, "skew[id]",
            verify_functor(functor, budget=config.budget, seed=config.seed))


def _run_out_group(config, rec):
    semiring = load_semiring(config.semiring)
    report = outer_group_experiment(
        semiring, config.cap, budget=config.budget, seed=config.seed)
    rec.add("class-count-matches-out", "exhaustive",
            report.class_count == report.out_order,
            witness=json.dumps(report.to_json(), sort_keys=True))
    rec.add("no-undecided-pairs", "exhaustive", not report.undecided)


_BUILTIN_LIE = re.compile(r"^(sl2|heisenberg|abelian(\d+)):(.+)$")


def load_lie(spec):
    """Resolve 'sl2:<ring>', 'heisenberg:<ring>', 'abelian<d>:<ring>', or a file."""
    match = _BUILTIN_LIE.match(spec)
    if match:
        ring = coefficient_ring(match.group(3))
        if match.group(1) == "sl2":
            return sl2(ring), None
        if match.group(1) == "heisenberg":
            return heisenberg(ring), None
        return abelian(ring, int(match.group(2))), None
    return lie_from_file(spec)


def _monomials_up_to(envelope, degree):
    import itertools as _it

    dim = envelope.lie.dim
    out = []
    for total in range(degree + 1):
        for word in _it.combinations_with_replacement(range(dim), total):
            exp = [0] * dim
            for letter in word:
                exp[letter] += 1
            out.append(envelope.monomial(exp))
    return out


def _run_lie_suite(config, rec):
    lie, restricted = load_lie(config.lie)
    rec.add("validate", "exhaustive", True,
            witness=f"dim={lie.dim} ring={lie.ring.name}")
    envelope = UniversalEnvelope(lie)
    monomials = _monomials_up_to(envelope, 2)

    mismatch = None
    for u in monomials:
        for v in monomials:
            if u * v != multiply_by_word_rewriting(u, v):
                mismatch = (u, v)
                break
        if mismatch:
            break
    rec.add("pbw-word-oracle-agreement", "exhaustive", mismatch is None,
            witness=None if mismatch is None else repr(mismatch))

    rng = random.Random(f"{config.seed}:lie-assoc")
    ok = True
    for _ in range(60):
        u = envelope.sample_element(rng, max_degree=2)
        v = envelope.sample_element(rng, max_degree=2)
        w = envelope.sample_element(rng, max_degree=2)
        if (u * v) * w != u * (v * w):
            ok = False
            break
    rec.add("associativity", "sampled", ok)

    ok = True
    for u in monomials:
        for v in monomials:
            product = u * v
            if product.degree() != (u.degree() or 0) + (v.degree() or 0):
                ok = False
                break
            if product.leading() != commutative_multiply(u.leading(), v.leading()):
                ok = False
                break
        if not ok:
            break
    rec.add("graded-domain-structure", "exhaustive", ok)

    rng = random.Random(f"{config.seed}:lie-units")
    ok = is_unit(envelope.one()) and not is_unit(envelope.zero())
    for _ in range(40):
        u = envelope.sample_element(rng, max_degree=2)
        expected = (
            u.degree() == 0
            and lie.ring.is_unit(u.constant_coefficient()))
        if is_unit(u) != expected:
            ok = False
            break
    rec.add("unit-detection", "sampled", ok)

    ok = True
    for cap in range(0, 4):
        expected = sum(multiset_count(lie.dim, k) for k in range(cap + 1))
        if len(free_module_basis(lie, ("x1",), cap)) != expected:
            ok = False
    rec.add("free-basis-counts", "exhaustive", ok)

    if restricted is not None:
        def body():
            verify_restricted(lie, restricted, seed=config.seed)

        rec.run("restricted-axioms", "sampled", body)
        p = restricted.p
        full_cap = lie.dim * (p - 1)
        count = len(restricted_module_basis(lie, p, ("x1",), full_cap))
        rec.add("restricted-basis-count", "exhaustive", count == p ** lie.dim,
                witness=f"{count} vs {p}^{lie.dim}")


# ---------------------------------------------------------------------------
# bespoke CLI flows that do not map onto one of the six experiment kinds


def run_autmorph_flow(action, config, sigma_index=0, random_family=False):
    """extract / normalize round-trip flows on constructed functors."""
    from .autfunctors import extract_sigma, normalize_injections

    semiring = load_semiring(config.semiring)
    groups = automorphism_groups(semiring)
    if sigma_index >= len(groups.aut):
        raise ConfigError(
            f"semiring has {len(groups.aut)} automorphisms; index {sigma_index} is out of range")
    sigma = groups.aut[sigma_index]
    rec = _Recorder(config.seed)
    if random_family:
        rng = random.Random(f"{config.seed}:family")
        from .matcat import random_invertible

        family = {
            n: random_invertible(semiring, n, rng)[0]
            for n in range(1, config.cap + 1)
        }
    else:
        family = {}
    data = skew_inner_functor(sigma, config.cap)
    data.family = family
    functor = semi_inner_functor(data)
    if action == "extract":
        def body():
            normalized, _ = normalize_injections(functor)
            recovered = extract_sigma(
                normalized, budget=config.budget, seed=config.seed)
            if recovered.perm != sigma.perm:
                raise SemicatError(
                    f"recovered {recovered!r} instead of {sigma!r}")
            return f"recovered {recovered!r}"

        rec.run("extract-round-trip", "exhaustive", body)
    elif action == "normalize":
        def body():
            normalized, witness = normalize_injections(functor)
            from .matcat import biproduct_system

            for n in range(1, config.cap + 1):
                for mu in biproduct_system(semiring, n).injections:
                    if normalized.on_morphism(mu) != mu:
                        raise SemicatError(f"injection {mu!r} still moves")
            return f"components at ranks {sorted(witness.components)}"

        rec.run("normalize-fixes-injections", "exhaustive", body)
    else:
        raise ConfigError(f"unknown autmorph action {action!r}")
    return Report(experiment={**config.echo(), "action": action,
                              "sigma": sigma_index,
                              "random_family": random_family},
                  records=rec.records)


def _parse_word(lie, text):
    labels = list(lie.labels)
    out = []
    for token in text.split(","):
        token = token.strip()
        if token not in labels:
            raise ConfigError(f"unknown basis label {token!r}")
        out.append(labels.index(token))
    return tuple(out)


def run_lie_command(action, config, left=None, right=None, gens=1, map_name=None):
    """The `lie` subcommand actions that are not the full suite."""
    lie, restricted = load_lie(config.lie)
    envelope = UniversalEnvelope(lie, restricted=restricted)
    rec = _Recorder(config.seed)
    extra = {"action": action}
    if action == "validate":
        rec.add("validate", "exhaustive", True,
                witness=f"dim={lie.dim} ring={lie.ring.name}"
                        + (" restricted" if restricted else ""))
        if restricted is not None:
            rec.run("restricted-axioms", "sampled",
                    lambda: verify_restricted(lie, restricted, seed=config.seed))
    elif action == "mul":
        if left is None or right is None:
            raise ConfigError("mul needs --left and --right words")
        u = _word_element(envelope, _parse_word(lie, left))
        v = _word_element(envelope, _parse_word(lie, right))
        product = u * v
        oracle = multiply_by_word_rewriting(u, v)
        rec.add("normal-form", "exhaustive", product == oracle,
                witness=repr(product))
        extra["left"], extra["right"] = left, right
    elif action == "basis":
        cap = config.degree_cap
        generators = tuple(f"x{i+1}" for i in range(gens))
        if restricted is not None:
            basis = restricted_module_basis(lie, restricted.p, generators, cap)
        else:
            basis = free_module_basis(lie, generators, cap)
        rec.add("basis", "exhaustive", True,
                witness=json.dumps(
                    {"count": len(basis),
                     "labels": [b.label(lie) for b in basis[:24]]},
                    sort_keys=True))
        extra["generators"] = gens
    elif action == "lift":
        if map_name != "chevalley":
            raise ConfigError("only the built-in 'chevalley' map is supported here")
        theta = chevalley_involution(lie)

        def body():
            lifted = lift_semi_automorphism(theta, envelope=UniversalEnvelope(lie),
                                            seed=config.seed)
            return f"lifted {lifted!r}"

        rec.run("lift-spot-checks", "sampled", body)
        extra["map"] = map_name
    elif action == "units":
        report = cyclic_aut_check(envelope, config.degree_cap, seed=config.seed)
        for name, status in report.records:
            rec.add(f"units:{name}", "sampled", status == "pass")
        rec.add("unit-count", "exhaustive", True,
                witness=json.dumps(
                    {"count": report.unit_count, "units": report.units},
                    sort_keys=True))
    else:
        raise ConfigError(f"unknown lie action {action!r}")
    return Report(experiment={**config.echo(), **extra}, records=rec.records)


def _word_element(envelope, word):
    out = envelope.one()
    for letter in word:
        out = out * envelope.generator(letter)
    return out
