"""Command-line front end.

Reads channel/pair documents (JSON, complex entries as ``[re, im]``), runs
divergence computations and privacy audits, and writes CSV bound curves.

Exit codes: 0 success, 1 a pair falsified the guarantee, 2 bad input,
3 numerical failure (including a dual gap above ``GAP_LIMIT``).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import privacy, quantum
from .divergences import (
    LogBase,
    PriorPair,
    d_max,
    d_zero,
    helstrom,
    hockey_stick,
    neyman_pearson,
    relative_entropy,
    trace_distance,
)
from .errors import (
    InvalidInput,
    NumericalFailure,
    ParseError,
    SinkError,
    ValidationError,
)

GAP_LIMIT = 1e-7
DEFAULT_GAMMA_ETAS = (0.1, 0.3, 0.5, 0.7, 0.9)
DEFAULT_DELTAS = (0.0, 0.05, 0.1, 0.2)
DEFAULT_OMEGA_ETA = 0.1

EXIT_OK, EXIT_FALSIFIED, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3


# --------------------------------------------------------------------------
# input documents


@dataclass
class InputDocument:
    dim: int
    channel: dict  # {"kind": "kraus", "operators": [ndarray]} or {"kind": "depolarizing", "p": float}
    pairs: Optional[list] = None  # list of (ndarray, ndarray)
    neighborhood: Optional[dict] = None  # {"kind": "trace_distance", "d": float} or {"kind": "pairs"}
    priors: Optional[dict] = None  # {"p_rho": float}
    base: str = "natural"
    seed: int = 0

    def __eq__(self, other):
        if not isinstance(other, InputDocument):
            return NotImplemented
        return serialize(self) == serialize(other)

    def build_channel(self):
        if self.channel["kind"] == "depolarizing":
            return quantum.DepolarizingChannel(self.channel["p"], self.dim)
        return quantum.KrausChannel(tuple(self.channel["operators"]))

    def states(self):
        return [(quantum.DensityOperator(r), quantum.DensityOperator(s)) for r, s in self.pairs or []]

    def relation(self):
        has_pairs = bool(self.pairs)
        distance = self.neighborhood is not None and self.neighborhood["kind"] == "trace_distance"
        if has_pairs == distance:
            raise ValidationError("audit needs exactly one of 'pairs' or a trace_distance neighborhood")
        if distance:
            return privacy.TraceDistanceNeighborhood(self.neighborhood["d"])
        return privacy.ExplicitPairs(self.states())


def _where(path, msg):
    return f"{path}: {msg}"


def _require(obj, key, path, kinds):
    if key not in obj:
        raise ParseError(_where(path, f"missing field '{key}'"))
    value = obj[key]
    if not isinstance(value, kinds) or isinstance(value, bool):
        raise ParseError(_where(f"{path}.{key}", f"expected {kinds}, got {type(value).__name__}"))
    return value


def _real(value, path) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(_where(path, f"expected a number, got {value!r}"))
    if not math.isfinite(value):
        raise ParseError(_where(path, "number is not finite"))
    return float(value)


def _matrix(value, dim, path) -> np.ndarray:
    if not isinstance(value, list) or len(value) != dim:
        raise ParseError(_where(path, f"expected {dim} rows"))
    out = np.empty((dim, dim), dtype=np.complex128)
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != dim:
            raise ParseError(_where(f"{path}[{i}]", f"expected {dim} entries"))
        for j, entry in enumerate(row):
            if not isinstance(entry, list) or len(entry) != 2:
                raise ParseError(_where(f"{path}[{i}][{j}]", "complex entry must be [re, im]"))
            out[i, j] = complex(_real(entry[0], f"{path}[{i}][{j}][0]"), _real(entry[1], f"{path}[{i}][{j}][1]"))
    return out


def _validate(check, path):
    try:
        return check()
    except InvalidInput as exc:
        raise ValidationError(_where(path, f"{type(exc).__name__}: {exc}")) from None


def parse_input(source) -> InputDocument:
    """Parse and validate a document from a path or a JSON string.

    Raises:
        ParseError: malformed JSON or a field of the wrong shape.
        ValidationError: a matrix breaks a density or channel invariant; the
            message names the offending index and check.
    """
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read {source}: {exc.strerror}") from None
    else:
        text = source
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ParseError("document must be a JSON object")

    dim = _require(raw, "dim", "$", int)
    if not 1 <= dim <= 64:
        raise ValidationError(_where("$.dim", f"dimension {dim} outside [1, 64]"))

    ch = _require(raw, "channel", "$", dict)
    kind = _require(ch, "kind", "$.channel", str)
    if kind == "kraus":
        ops = _require(ch, "operators", "$.channel", list)
        channel = {"kind": "kraus", "operators": [_matrix(op, dim, f"$.channel.operators[{k}]") for k, op in enumerate(ops)]}
        _validate(lambda: quantum.KrausChannel(tuple(channel["operators"])), "$.channel.operators (completeness)")
    elif kind == "depolarizing":
        channel = {"kind": "depolarizing", "p": _real(_require(ch, "p", "$.channel", (int, float)), "$.channel.p")}
        _validate(lambda: quantum.DepolarizingChannel(channel["p"], dim), "$.channel")
    else:
        raise ParseError(_where("$.channel.kind", f"unknown channel kind {kind!r}"))

    pairs = None
    if "pairs" in raw:
        items = _require(raw, "pairs", "$", list)
        pairs = []
        for k, item in enumerate(items):
            if not isinstance(item, dict):
                raise ParseError(_where(f"$.pairs[{k}]", "pair must be an object"))
            r = _matrix(_require(item, "rho", f"$.pairs[{k}]", list), dim, f"$.pairs[{k}].rho")
            s = _matrix(_require(item, "sigma", f"$.pairs[{k}]", list), dim, f"$.pairs[{k}].sigma")
            _validate(lambda: quantum.DensityOperator(r), f"$.pairs[{k}].rho")
            _validate(lambda: quantum.DensityOperator(s), f"$.pairs[{k}].sigma")
            pairs.append((r, s))

    neighborhood = None
    if "neighborhood" in raw:
        nb = _require(raw, "neighborhood", "$", dict)
        nkind = _require(nb, "kind", "$.neighborhood", str)
        if nkind == "trace_distance":
            d = _real(_require(nb, "d", "$.neighborhood", (int, float)), "$.neighborhood.d")
            _validate(lambda: privacy.TraceDistanceNeighborhood(d), "$.neighborhood.d")
            neighborhood = {"kind": "trace_distance", "d": d}
        elif nkind == "pairs":
            if pairs is None:
                raise ValidationError(_where("$.neighborhood", "kind 'pairs' but no pairs given"))
            neighborhood = {"kind": "pairs"}
        else:
            raise ParseError(_where("$.neighborhood.kind", f"unknown neighborhood kind {nkind!r}"))

    priors = None
    if "priors" in raw:
        pr = _require(raw, "priors", "$", dict)
        p_rho = _real(_require(pr, "p_rho", "$.priors", (int, float)), "$.priors.p_rho")
        _validate(lambda: PriorPair(p_rho), "$.priors.p_rho")
        priors = {"p_rho": p_rho}

    base = "natural"
    if "base" in raw:
        base = _require(raw, "base", "$", str)
        _validate(lambda: LogBase.parse(base), "$.base")
        base = LogBase.parse(base).value

    seed = _require(raw, "seed", "$", int) if "seed" in raw else 0
    return InputDocument(dim, channel, pairs, neighborhood, priors, base, seed)


def _encode_matrix(m) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=np.complex128)]


def serialize(doc: InputDocument) -> str:
    out: dict = {"dim": doc.dim}
    if doc.channel["kind"] == "kraus":
        out["channel"] = {"kind": "kraus", "operators": [_encode_matrix(op) for op in doc.channel["operators"]]}
    else:
        out["channel"] = {"kind": "depolarizing", "p": float(doc.channel["p"])}
    if doc.pairs is not None:
        out["pairs"] = [{"rho": _encode_matrix(r), "sigma": _encode_matrix(s)} for r, s in doc.pairs]
    if doc.neighborhood is not None:
        out["neighborhood"] = dict(doc.neighborhood)
    if doc.priors is not None:
        out["priors"] = dict(doc.priors)
    out["base"] = doc.base
    out["seed"] = doc.seed
    return json.dumps(out, indent=1, allow_nan=False)


# --------------------------------------------------------------------------
# curves


@dataclass(frozen=True)
class CurveSpec:
    bound: str  # gamma | omega | theta
    eps_min: float
    eps_max: float
    steps: int
    fixed: tuple  # eta values for gamma, delta values otherwise
    p_rho: float = 0.5
    eta: float = DEFAULT_OMEGA_ETA  # only used by omega
    base: LogBase = LogBase.NATURAL
    seed: int = 0
    defaults_used: bool = False

    def __post_init__(self):
        if self.bound not in ("gamma", "omega", "theta"):
            raise InvalidInput(f"unknown bound {self.bound!r}")
        if self.eps_min < 0 or self.eps_max < self.eps_min:
            raise InvalidInput(f"bad epsilon range [{self.eps_min}, {self.eps_max}]")
        if self.steps < 2:
            raise InvalidInput(f"need at least 2 sweep points, got {self.steps}")
        if not self.fixed:
            raise InvalidInput("no fixed parameter values")

    @property
    def column(self) -> str:
        return "eta" if self.bound == "gamma" else "delta"

    def grid(self) -> list[float]:
        span = self.eps_max - self.eps_min
        return [self.eps_min + k * span / (self.steps - 1) for k in range(self.steps)]

    def value(self, eps: float, fixed: float) -> float:
        if self.bound == "gamma":
            return privacy.gamma_bound(privacy.HtPrivacyParams(eps, fixed), PriorPair(self.p_rho))
        if self.bound == "omega":
            return privacy.omega_bound(privacy.DpParams(eps, fixed), self.eta, self.base)
        return privacy.theta_bound(privacy.DpParams(eps, fixed), PriorPair(self.p_rho), self.base)


def curve_text(spec: CurveSpec) -> str:
    lines = [
        f"# bound={spec.bound}",
        f"# base={spec.base.value}",
        f"# seed={spec.seed}",
    ]
    if spec.bound == "omega":
        lines.append(f"# eta={spec.eta:.9g}")
    else:
        lines.append(f"# p_rho={spec.p_rho:.9g}")
    source = "built-in defaults" if spec.defaults_used else "command line"
    lines.append(f"# {spec.column} values: {source}")
    lines.append(",".join(["epsilon"] + [f"{spec.column}={v:.9g}" for v in spec.fixed]))
    for eps in spec.grid():
        lines.append(",".join([f"{eps:.9g}"] + [f"{spec.value(eps, v):.9g}" for v in spec.fixed]))
    return "\n".join(lines) + "\n"


def emit_curve(spec: CurveSpec, sink) -> str:
    """Write the CSV for ``spec`` to ``sink`` (path, file object or None) and return it."""
    text = curve_text(spec)
    try:
        if sink is None:
            pass
        elif isinstance(sink, (str, Path)):
            with open(sink, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sink.write(text)
    except OSError as exc:
        raise SinkError(f"cannot write curve: {exc}") from None
    return text


# --------------------------------------------------------------------------
# reports


def json_number(x: float):
    """Finite floats pass through; +inf becomes the string "inf"."""
    x = float(x)
    if x == math.inf:
        return "inf"
    if not math.isfinite(x):
        raise NumericalFailure(f"non-finite value {x!r} in report")
    return x


def report_schema() -> dict:
    return json.loads(resources.files("htprivacy").joinpath("report_schema.json").read_text(encoding="utf-8"))


def _audit_report(report: privacy.AuditReport) -> dict:
    params = {"epsilon": json_number(report.params.epsilon)}
    if report.mode == "ht":
        params["eta"] = json_number(report.params.eta)
    else:
        params["delta"] = json_number(report.params.delta)
    cert = None
    if report.certificate is not None:
        cert = {k: (json_number(v) if isinstance(v, float) else v) for k, v in report.certificate.items()}
    return {
        "command": "audit",
        "mode": report.mode,
        "params": params,
        "base": report.base.value,
        "seed": report.seed,
        "status": report.status.value,
        "worst_value": json_number(report.worst_value),
        "worst_index": report.worst_index,
        "pairs_examined": report.pairs_examined,
        "max_dual_gap": json_number(report.max_dual_gap),
        "per_pair": [
            {"index": ev.index, "value": json_number(ev.value), "dual_gap": json_number(ev.dual_gap)}
            for ev in report.per_pair
        ],
        "certificate": cert,
    }


def _audit_exit(report: privacy.AuditReport) -> int:
    if report.max_dual_gap > GAP_LIMIT:
        return EXIT_NUMERICAL
    return EXIT_FALSIFIED if report.status is privacy.Status.FALSIFIED else EXIT_OK


def _scalar(value) -> str:
    return value if isinstance(value, str) else json.dumps(value)


def _render_text(obj, indent=0) -> str:
    pad = "  " * indent
    lines = []
    for key, value in obj.items():
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.append(_render_text(value, indent + 1))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{pad}{key}:")
            for item in value:
                lines.append(pad + "  - " + ", ".join(f"{k}={_scalar(v)}" for k, v in item.items()))
        else:
            lines.append(f"{pad}{key}: {_scalar(value)}")
    return "\n".join(lines)


# --------------------------------------------------------------------------
# commands


def _base(args, doc: Optional[InputDocument] = None) -> LogBase:
    if args.base is not None:
        return LogBase.parse(args.base)
    return LogBase.parse(doc.base if doc else "natural")


def _seed(args, doc: Optional[InputDocument] = None) -> int:
    if args.seed is not None:
        return args.seed
    return doc.seed if doc else 0


def _need(value, flag):
    if value is None:
        raise InvalidInput(f"{flag} is required")
    return value


def _floats(text: str, flag: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise InvalidInput(f"{flag}: expected comma-separated numbers, got {text!r}") from None


def _one_input(args) -> InputDocument:
    paths = _need(args.input, "--input")
    if len(paths) != 1:
        raise InvalidInput("exactly one --input is expected")
    return parse_input(Path(paths[0]))


def cmd_divergence(args):
    doc = _one_input(args)
    base = _base(args, doc)
    eta = float(_need(args.eta, "--eta"))
    if not doc.pairs:
        raise ValidationError("$.pairs: divergence needs at least one pair")
    channel = doc.build_channel()
    priors = PriorPair(args.p_rho if args.p_rho is not None else (doc.priors or {}).get("p_rho", 0.5))
    rows, worst_gap = [], 0.0
    for k, (rho, sigma) in enumerate(doc.states()):
        a, b = channel.apply(rho), channel.apply(sigma)
        np_res = neyman_pearson(a, b, eta, base)
        worst_gap = max(worst_gap, np_res.dual_gap)
        row = {
            "index": k,
            "beta": json_number(np_res.beta),
            "d_eta": json_number(np_res.d_eta),
            "dual_gap": json_number(np_res.dual_gap),
            "d_zero": json_number(d_zero(a, b, base)),
            "relative_entropy": json_number(relative_entropy(a, b, base)),
            "d_max": json_number(d_max(a, b, base)),
            "trace_distance": json_number(trace_distance(a, b)),
            "p_err": json_number(helstrom(a, b, priors).p_err),
        }
        if args.epsilon is not None:
            row["hockey_stick"] = json_number(hockey_stick(a, b, base.exp(args.epsilon)))
        rows.append(row)
    report = {
        "command": "divergence",
        "base": base.value,
        "eta": json_number(eta),
        "p_rho": json_number(priors.p_rho),
        "pairs": rows,
    }
    return report, (EXIT_NUMERICAL if worst_gap > GAP_LIMIT else EXIT_OK)


def cmd_audit(args):
    doc = _one_input(args)
    base, seed = _base(args, doc), _seed(args, doc)
    channel, relation = doc.build_channel(), doc.relation()
    epsilon = float(_need(args.epsilon, "--epsilon"))
    if args.mode == "ht":
        report = privacy.audit_ht(
            channel, relation, float(_need(args.eta, "--eta")), epsilon, base, args.budget, seed
        )
    else:
        delta = args.delta if args.delta is not None else 0.0
        report = privacy.audit_dp(channel, relation, epsilon, base, args.budget, seed, delta=delta)
    return _audit_report(report), _audit_exit(report)


def cmd_bounds(args):
    eps_min, eps_max, steps = _parse_sweep(args.eps)
    base = _base(args)
    if args.bound == "gamma":
        fixed = _floats(args.eta, "--eta") if args.eta is not None else DEFAULT_GAMMA_ETAS
        defaults = args.eta is None
        eta = DEFAULT_OMEGA_ETA
    else:
        fixed = _floats(args.delta, "--delta") if args.delta is not None else DEFAULT_DELTAS
        defaults = args.delta is None
        eta = _floats(args.eta, "--eta")[0] if args.eta is not None else DEFAULT_OMEGA_ETA
    spec = CurveSpec(
        bound=args.bound,
        eps_min=eps_min,
        eps_max=eps_max,
        steps=steps,
        fixed=fixed,
        p_rho=args.p_rho if args.p_rho is not None else 0.5,
        eta=eta,
        base=base,
        seed=_seed(args),
        defaults_used=defaults,
    )
    return emit_curve(spec, args.out)


def _parse_sweep(text):
    if text is None:
        return 0.0, 3.0, 121
    parts = text.split(":")
    try:
        if len(parts) != 3:
            raise ValueError
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InvalidInput(f"--eps expects MIN:MAX:STEPS, got {text!r}") from None


def cmd_compose(args):
    paths = _need(args.input, "--input")
    if len(paths) != 2:
        raise InvalidInput("compose needs exactly two --input documents")
    docs = [parse_input(Path(p)) for p in paths]
    for k, doc in enumerate(docs):
        if not doc.pairs:
            raise ValidationError(f"input {k}: compose needs explicit pairs")
    base, seed = _base(args, docs[0]), _seed(args, docs[0])
    channels = [doc.build_channel() for doc in docs]
    relations = [privacy.ExplicitPairs(doc.states()) for doc in docs]
    factors = [
        privacy.audit_ht(ch, rel, 0.0, math.inf, base, seed=seed)
        for ch, rel in zip(channels, relations)
    ]
    product_pairs = [
        (quantum.tensor_state(r1, r2), quantum.tensor_state(s1, s2))
        for r1, s1 in relations[0].pairs
        for r2, s2 in relations[1].pairs
    ]
    product = quantum.tensor_channel(channels[0], channels[1])
    budget = args.epsilon if args.epsilon is not None else factors[0].worst_value + factors[1].worst_value
    # the product relation already holds every swap and self-pair of the factors
    joint = privacy.audit_ht(product, privacy.ExplicitPairs(product_pairs), 0.0, budget, base, seed=seed)
    report = {
        "command": "compose",
        "base": base.value,
        "factor_epsilons": [json_number(f.worst_value) for f in factors],
        "budget": json_number(budget),
        "composite": _audit_report(joint),
    }
    return report, _audit_exit(joint)


def cmd_translate(args):
    if args.direction == "ht-to-dp":
        params = privacy.HtPrivacyParams(float(_need(args.epsilon, "--epsilon")), float(_need(args.eta, "--eta")))
        dp = privacy.ht_to_dp(params)
        out = {"epsilon": json_number(dp.epsilon), "delta": json_number(dp.delta)}
        given = {"epsilon": json_number(params.epsilon), "eta": json_number(params.eta)}
    elif args.direction == "dp-to-ht":
        eps = float(_need(args.epsilon, "--epsilon"))
        delta = args.delta if args.delta is not None else 0.0
        family = privacy.dp_to_ht(eps, delta)
        base = _base(args)
        out = {
            "epsilon": json_number(family.epsilon),
            "eta": "all",
            "provable_epsilon_at_eta": {
                f"{eta:g}": json_number(privacy.ht_budget_from_pure_dp(eps, eta, base)) for eta in DEFAULT_GAMMA_ETAS
            },
        }
        given = {"epsilon": json_number(eps), "delta": json_number(delta)}
    else:
        doc = _one_input(args)
        base = _base(args, doc)
        if doc.channel["kind"] != "depolarizing" or not doc.neighborhood or doc.neighborhood["kind"] != "trace_distance":
            raise ValidationError("$: depolarizing translation needs a depolarizing channel and a trace_distance neighborhood")
        channel, d = doc.build_channel(), doc.neighborhood["d"]
        family = privacy.depolarizing_ht_epsilon(channel, d, base)
        eps = args.epsilon if args.epsilon is not None else family.epsilon
        out = {
            "ht_epsilon": json_number(family.epsilon),
            "dp_epsilon": json_number(eps),
            "dp_delta": json_number(privacy.depolarizing_dp_delta(channel, d, eps, base)),
        }
        given = {"p": json_number(channel.p), "dim": channel.dim, "d": json_number(d), "base": base.value}
    return {"command": "translate", "direction": args.direction, "input": given, "output": out}, EXIT_OK


# --------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidInput(f"{self.prog}: {message}")


def _common(p, *, inputs=True):
    if inputs:
        p.add_argument("--input", action="append", metavar="PATH")
    p.add_argument("--eta")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--delta")
    p.add_argument("--p-rho", type=float)
    p.add_argument("--base", choices=["two", "natural"])
    p.add_argument("--seed", type=int)
    p.add_argument("--budget", type=int, default=200)
    p.add_argument("--json", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="htprivacy", description="Hypothesis-testing privacy of quantum channels.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("divergence", help="divergences between channel outputs of each pair")
    _common(p)
    p.set_defaults(run=cmd_divergence)

    p = sub.add_parser("audit", help="audit (epsilon, eta)-privacy or (epsilon, delta)-DP")
    p.add_argument("mode", choices=["ht", "dp"])
    _common(p)
    p.set_defaults(run=cmd_audit)

    p = sub.add_parser("bounds", help="CSV curves of the error lower bounds")
    p.add_argument("bound", choices=["gamma", "omega", "theta"])
    p.add_argument("--eps", metavar="MIN:MAX:STEPS")
    p.add_argument("--out", metavar="PATH")
    _common(p, inputs=False)
    p.set_defaults(run=cmd_bounds)

    p = sub.add_parser("compose", help="tensor two channels and audit at eta = 0")
    _common(p)
    p.set_defaults(run=cmd_compose)

    p = sub.add_parser("translate", help="convert between privacy parameters")
    p.add_argument("direction", choices=["ht-to-dp", "dp-to-ht", "depolarizing"])
    _common(p)
    p.set_defaults(run=cmd_translate)
    return parser


def _single(args, name):
    # bounds takes comma lists; every other command wants one number
    value = getattr(args, name, None)
    if value is None or args.command == "bounds":
        return
    values = _floats(value, f"--{name}")
    if len(values) != 1:
        raise InvalidInput(f"--{name} expects a single number for {args.command}")
    setattr(args, name, values[0])


def run(argv: Sequence[str], stdout=None, stderr=None) -> int:
    """Run one command line; returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(list(argv))
        _single(args, "eta")
        _single(args, "delta")
        result = args.run(args)
        if args.command == "bounds":
            if args.out is None:
                stdout.write(result)
            return EXIT_OK
        report, code = result
        if args.json:
            stdout.write(json.dumps(report, indent=2, allow_nan=False) + "\n")
        else:
            stdout.write(_render_text(report) + "\n")
        return code
    except (InvalidInput, SinkError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except NumericalFailure as exc:
        stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


def main() -> None:
    sys.exit(run(sys.argv[1:]))
