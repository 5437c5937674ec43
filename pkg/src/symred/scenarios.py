"""Scenario files and the built-in scenario registry.

A scenario file is a line-oriented ``key = value`` format whose values are
expressions in the language of :mod:`symred.exprlang`.  Chart coordinates
are named x1..xn, group parameters t1..tk and quotient coordinates w1..wq;
matrices may span several lines as long as their brackets stay open.  The
built-in scenarios are defined in this same format and compiled through the
same code path as user files.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .actions import (
    GroupAction,
    MomentumMap,
    uniform_circle_quadrature,
    uniform_torus_quadrature,
    window_quadrature,
)
from .errors import ParseError, UnknownScenarioError, ValidationError
from .exprlang import (
    Expr,
    ExprParser,
    Token,
    eval_expr,
    tokenize,
    validate_expr,
)
from .geometry import ChartPoint, TensorField
from .reduction import ReductionScenario, SampleSpec
from .structures import build_compatible_triple

__all__ = [
    "ScenarioFile",
    "parse_scenario",
    "compile_scenario",
    "load_scenario_file",
    "builtin",
    "builtin_names",
]

_KNOWN_KEYS = {
    "name", "dim", "group_dim", "quotient_dim", "abelian",
    "omega", "metric", "acs", "flow", "mu", "beta", "section",
    "sample.count", "sample.seed", "sample.radius", "sample.points",
}
_KEY_ALIASES = {"g": "metric", "j": "acs", "J": "acs", "w": "omega"}
_TOL_PREFIX = "tol."


@dataclass(frozen=True, eq=False)
class ScenarioFile:
    """Parsed and statically validated scenario description."""

    name: str
    dim: int
    group_dim: int
    quotient_dim: int
    abelian: bool
    omega: tuple
    metric: tuple
    acs: tuple | None
    flow: tuple
    mu: tuple
    beta: tuple
    section: tuple
    tolerances: dict
    sample_spec: SampleSpec


def _statements(tokens: list[Token]):
    """Split the token stream into per-statement slices, joining lines while
    brackets are open so matrices can span lines."""
    pos = 0
    while tokens[pos].kind != "EOF":
        if tokens[pos].kind == "NEWLINE":
            pos += 1
            continue
        start = pos
        depth = 0
        body: list[Token] = []
        while True:
            tok = tokens[pos]
            if tok.kind == "EOF":
                break
            if tok.kind == "NEWLINE":
                pos += 1
                if depth <= 0:
                    break
                continue
            if tok.kind in ("LBRACKET", "LPAREN"):
                depth += 1
            elif tok.kind in ("RBRACKET", "RPAREN"):
                depth -= 1
            body.append(tok)
            pos += 1
        if body:
            yield body, tokens[start]


def _parse_key(parser: ExprParser) -> str:
    tok = parser.expect("IDENT", "key name")
    parts = [tok.text]
    while parser.peek().kind == "DOT":
        parser.advance()
        parts.append(parser.expect("IDENT", "key name").text)
    return ".".join(parts)


def _const_value(expr: Expr, key: str) -> float:
    try:
        return float(eval_expr(expr, {}))
    except ValidationError:
        raise ValidationError(f"value of {key!r} must be constant") from None


def _int_value(expr: Expr, key: str) -> int:
    val = _const_value(expr, key)
    if val != int(val):
        raise ValidationError(f"value of {key!r} must be an integer, got {val}")
    return int(val)


def parse_scenario(text: str) -> ScenarioFile:
    """Parse scenario text into a validated ScenarioFile.

    Raises ParseError with position on malformed syntax and ValidationError
    for semantic problems (dimension mismatches, unknown identifiers, odd
    symplectic dimension, missing keys).
    """
    tokens = tokenize(text)
    raw: dict[str, object] = {}
    for body, head in _statements(tokens):
        last = body[-1]
        eof = Token("EOF", "", last.line, last.column + len(last.text))
        parser = ExprParser(body + [eof])
        key = _parse_key(parser)
        key = _KEY_ALIASES.get(key, key)
        parser.expect("EQUALS", "'='")
        if key in ("name", "abelian"):
            tok = parser.expect("IDENT", "bare word")
            value: object = tok.text
        else:
            # parse before validating the key so malformed values (unclosed
            # brackets and the like) surface as ParseError with a position
            value = parser.parse_value()
        tok = parser.peek()
        if tok.kind != "EOF":
            raise ParseError(f"trailing {tok.kind} {tok.text!r} after value of {key!r}",
                             tok.line, tok.column, expected=("end of line",))
        if not (key in _KNOWN_KEYS or key.startswith(_TOL_PREFIX)):
            raise ValidationError(f"unknown key {key!r} at line {head.line}")
        if key in raw:
            raise ValidationError(f"duplicate key {key!r} at line {head.line}")
        raw[key] = value

    for required in ("name", "dim", "omega", "metric", "flow", "mu", "beta", "section"):
        if required not in raw:
            raise ValidationError(f"missing required key {required!r}")

    name = str(raw["name"])
    dim = _int_value(_as_expr(raw["dim"], "dim"), "dim")
    if dim <= 0:
        raise ValidationError(f"dim must be positive, got {dim}")
    if dim % 2 != 0:
        raise ValidationError(f"odd symplectic dimension {dim}")

    beta_exprs = _as_vector(raw["beta"], "beta")
    beta = tuple(_const_value(e, "beta") for e in beta_exprs)
    group_dim = _int_value(_as_expr(raw["group_dim"], "group_dim"), "group_dim") \
        if "group_dim" in raw else len(beta)
    quotient_dim = _int_value(_as_expr(raw["quotient_dim"], "quotient_dim"), "quotient_dim") \
        if "quotient_dim" in raw else dim - 2 * group_dim
    if quotient_dim < 0:
        raise ValidationError(f"quotient dimension {quotient_dim} is negative")
    abelian_word = str(raw.get("abelian", "true"))
    if abelian_word not in ("true", "false"):
        raise ValidationError(f"abelian must be true or false, got {abelian_word!r}")
    abelian = abelian_word == "true"

    x_names = {f"x{i + 1}" for i in range(dim)}
    t_names = {f"t{i + 1}" for i in range(group_dim)}
    w_names = {f"w{i + 1}" for i in range(quotient_dim)}

    def matrix_key(key: str, optional: bool = False):
        if key not in raw:
            if optional:
                return None
            raise ValidationError(f"missing required key {key!r}")
        rows = _as_matrix(raw[key], key)
        if len(rows) != dim or len(rows[0]) != dim:
            raise ValidationError(
                f"{key} must be {dim}x{dim}, got {len(rows)}x{len(rows[0])}"
            )
        for row in rows:
            for entry in row:
                validate_expr(entry, x_names, key)
        return rows

    omega = matrix_key("omega")
    metric = matrix_key("metric")
    acs = matrix_key("acs", optional=True)

    flow = _as_vector(raw["flow"], "flow")
    if len(flow) != dim:
        raise ValidationError(f"flow must have {dim} components, got {len(flow)}")
    for entry in flow:
        validate_expr(entry, x_names | t_names, "flow")

    mu = _as_vector(raw["mu"], "mu")
    if len(mu) != group_dim:
        raise ValidationError(f"mu must have {group_dim} components, got {len(mu)}")
    for entry in mu:
        validate_expr(entry, x_names, "mu")
    if len(beta) != group_dim:
        raise ValidationError(f"beta must have {group_dim} entries, got {len(beta)}")

    section = _as_vector(raw["section"], "section")
    if len(section) != dim:
        raise ValidationError(f"section must have {dim} components, got {len(section)}")
    for entry in section:
        validate_expr(entry, w_names, "section")

    tolerances = {}
    for key, value in raw.items():
        if key.startswith(_TOL_PREFIX):
            tolerances[key[len(_TOL_PREFIX):]] = _const_value(_as_expr(value, key), key)

    points: tuple = ()
    if "sample.points" in raw:
        rows = _as_matrix(raw["sample.points"], "sample.points")
        if quotient_dim and len(rows[0]) != quotient_dim:
            raise ValidationError(
                f"sample points must have {quotient_dim} coordinates, got {len(rows[0])}"
            )
        points = tuple(tuple(_const_value(e, "sample.points") for e in row) for row in rows)
    sample_spec = SampleSpec(
        count=_int_value(_as_expr(raw["sample.count"], "sample.count"), "sample.count")
        if "sample.count" in raw else 20,
        seed=_int_value(_as_expr(raw["sample.seed"], "sample.seed"), "sample.seed")
        if "sample.seed" in raw else 0,
        radius=_const_value(_as_expr(raw["sample.radius"], "sample.radius"), "sample.radius")
        if "sample.radius" in raw else 2.0,
        points=points,
    )

    return ScenarioFile(
        name=name, dim=dim, group_dim=group_dim, quotient_dim=quotient_dim,
        abelian=abelian, omega=omega, metric=metric, acs=acs, flow=flow, mu=mu,
        beta=beta, section=section, tolerances=tolerances, sample_spec=sample_spec,
    )


def _as_expr(value, key: str) -> Expr:
    if isinstance(value, Expr):
        return value
    raise ValidationError(f"value of {key!r} must be a single expression")


def _as_vector(value, key: str) -> tuple:
    if isinstance(value, tuple) and value and isinstance(value[0], Expr):
        return value
    if isinstance(value, Expr):
        return (value,)
    raise ValidationError(f"value of {key!r} must be a vector [..]")


def _as_matrix(value, key: str) -> tuple:
    if isinstance(value, tuple) and value and isinstance(value[0], tuple):
        return value
    raise ValidationError(f"value of {key!r} must be a matrix [[..], ..]")


def _x_env(p: ChartPoint) -> dict:
    return {f"x{i + 1}": float(c) for i, c in enumerate(p.coords)}


def _matrix_field(rows: tuple, dim: int, name: str) -> TensorField:
    def evaluate(p: ChartPoint) -> np.ndarray:
        env = _x_env(p)
        return np.array([[eval_expr(entry, env) for entry in row] for row in rows])

    return TensorField.matrix(evaluate, dim, name=name)


def compile_scenario(sf: ScenarioFile, quadrature=None) -> ReductionScenario:
    """Compile a parsed scenario into evaluable fields, action and section.

    Without an explicit quadrature a uniform torus rule is used (64 points
    for a circle, 16 per factor otherwise), which is correct for the compact
    abelian groups of the built-ins.
    """
    dim, k, q = sf.dim, sf.group_dim, sf.quotient_dim
    omega = _matrix_field(sf.omega, dim, f"{sf.name} omega")
    metric = _matrix_field(sf.metric, dim, f"{sf.name} metric")
    if sf.acs is not None:
        acs = _matrix_field(sf.acs, dim, f"{sf.name} acs")
    else:
        acs = build_compatible_triple(omega, metric).acs

    flow_exprs = sf.flow

    def flow(params, p):
        env = _x_env(p)
        env.update({f"t{i + 1}": float(v) for i, v in enumerate(params)})
        return ChartPoint([eval_expr(entry, env) for entry in flow_exprs])

    if quadrature is None:
        quadrature = uniform_circle_quadrature(64) if k == 1 else uniform_torus_quadrature(k, 16)
    action = GroupAction(
        group_dim=k, flow=flow, quadrature=quadrature, abelian=sf.abelian,
    )

    mu_fields = tuple(
        TensorField.scalar(
            (lambda entry: lambda p: eval_expr(entry, _x_env(p)))(entry),
            name=f"{sf.name} mu[{i}]",
        )
        for i, entry in enumerate(sf.mu)
    )
    mu = MomentumMap(components=mu_fields, beta=np.array(sf.beta))

    section_exprs = sf.section

    def section(x: ChartPoint) -> ChartPoint:
        env = {f"w{i + 1}": float(c) for i, c in enumerate(x.coords)}
        return ChartPoint([eval_expr(entry, env) for entry in section_exprs])

    return ReductionScenario(
        name=sf.name,
        chart_dim=dim,
        omega=omega,
        metric=metric,
        acs=acs,
        action=action,
        mu=mu,
        quotient_dim=q,
        section=section,
        quotient_chart_dim=q,
        tolerances=dict(sf.tolerances),
        sample_spec=sf.sample_spec,
    )


def load_scenario_file(path) -> ReductionScenario:
    with open(path, "r", encoding="utf-8") as handle:
        return compile_scenario(parse_scenario(handle.read()))


# ---------------------------------------------------------------------------
# built-in registry, written in the scenario file format itself

_HOPF_TEXT = """
# circle reduction of the flat two-plane chart at the unit-sphere level
name = hopf
dim = 4
group_dim = 1
quotient_dim = 2
abelian = true

omega = [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]
metric = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
acs = [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]

# clockwise phase rotation of both coordinate planes
flow = [x1*cos(t1) + x2*sin(t1), x2*cos(t1) - x1*sin(t1),
        x3*cos(t1) + x4*sin(t1), x4*cos(t1) - x3*sin(t1)]
mu = [0.5*(x1^2 + x2^2 + x3^2 + x4^2)]
beta = [0.5]

# normalized graph w -> (1, w) of the affine quotient chart
section = [1/sqrt(1 + w1^2 + w2^2), 0,
           w1/sqrt(1 + w1^2 + w2^2), w2/sqrt(1 + w1^2 + w2^2)]

sample.count = 20
sample.seed = 7
sample.radius = 2
"""

_LINEAR_TRANSLATION_TEXT = """
# free translation of the first position coordinate; momentum is its conjugate
name = linear_translation
dim = 4
group_dim = 1
quotient_dim = 2
abelian = true

omega = [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]
metric = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
acs = [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]

flow = [x1 + t1, x2, x3, x4]
mu = [x2]
beta = [0]
section = [0, 0, w1, w2]

sample.count = 20
sample.seed = 11
sample.radius = 2
"""

_SKEWED_METRIC_TEXT = """
# hopf data with a stretched metric: the triple is deliberately incompatible
name = skewed_metric_hopf
dim = 4
group_dim = 1
quotient_dim = 2
abelian = true

omega = [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]
metric = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 4, 0], [0, 0, 0, 4]]
acs = [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]

flow = [x1*cos(t1) + x2*sin(t1), x2*cos(t1) - x1*sin(t1),
        x3*cos(t1) + x4*sin(t1), x4*cos(t1) - x3*sin(t1)]
mu = [0.5*(x1^2 + x2^2 + x3^2 + x4^2)]
beta = [0.5]
section = [1/sqrt(1 + w1^2 + w2^2), 0,
           w1/sqrt(1 + w1^2 + w2^2), w2/sqrt(1 + w1^2 + w2^2)]

sample.count = 20
sample.seed = 7
sample.radius = 2
"""

_NONINVARIANT_METRIC_TEXT = """
# hopf data with a position-dependent metric that the circle does not preserve
name = noninvariant_metric_hopf
dim = 4
group_dim = 1
quotient_dim = 2
abelian = true

omega = [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]
metric = [[1 + x3^2, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
acs = [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]

flow = [x1*cos(t1) + x2*sin(t1), x2*cos(t1) - x1*sin(t1),
        x3*cos(t1) + x4*sin(t1), x4*cos(t1) - x3*sin(t1)]
mu = [0.5*(x1^2 + x2^2 + x3^2 + x4^2)]
beta = [0.5]
section = [1/sqrt(1 + w1^2 + w2^2), 0,
           w1/sqrt(1 + w1^2 + w2^2), w2/sqrt(1 + w1^2 + w2^2)]

sample.count = 20
sample.seed = 7
sample.radius = 2
"""


def _euclidean_text(planes: int) -> str:
    dim = 2 * planes
    q = dim - 2

    def eye_rows(scale_expr="1"):
        rows = []
        for r in range(dim):
            rows.append("[" + ", ".join(scale_expr if r == c else "0" for c in range(dim)) + "]")
        return "[" + ", ".join(rows) + "]"

    omega_rows = []
    acs_rows = []
    for r in range(dim):
        omega_row = ["0"] * dim
        acs_row = ["0"] * dim
        j = r // 2
        if r % 2 == 0:
            omega_row[2 * j + 1] = "1"
            acs_row[2 * j + 1] = "-1"
        else:
            omega_row[2 * j] = "-1"
            acs_row[2 * j] = "1"
        omega_rows.append("[" + ", ".join(omega_row) + "]")
        acs_rows.append("[" + ", ".join(acs_row) + "]")

    flow_entries = []
    for j in range(planes):
        a, b = f"x{2 * j + 1}", f"x{2 * j + 2}"
        flow_entries.append(f"{a}*cos(t1) + {b}*sin(t1)")
        flow_entries.append(f"{b}*cos(t1) - {a}*sin(t1)")
    squares = " + ".join(f"x{i + 1}^2" for i in range(dim))

    if q:
        w_sq = " + ".join(f"w{i + 1}^2" for i in range(q))
        denom = f"sqrt(1 + {w_sq})"
        section_entries = [f"1/{denom}", "0"] + [f"w{i + 1}/{denom}" for i in range(q)]
    else:
        section_entries = ["1", "0"]

    return "\n".join([
        "# flat standard structures with the diagonal circle reduction",
        "name = euclidean_r2n",
        f"dim = {dim}",
        "group_dim = 1",
        f"quotient_dim = {q}",
        "abelian = true",
        f"omega = [{', '.join(omega_rows)}]",
        f"metric = {eye_rows()}",
        f"acs = [{', '.join(acs_rows)}]",
        f"flow = [{', '.join(flow_entries)}]",
        f"mu = [0.5*({squares})]",
        "beta = [0.5]",
        f"section = [{', '.join(section_entries)}]",
        "sample.count = 20",
        "sample.seed = 5",
        "sample.radius = 2",
    ])


_BUILTIN_TEXTS = {
    "hopf": _HOPF_TEXT,
    "linear_translation": _LINEAR_TRANSLATION_TEXT,
    "skewed_metric_hopf": _SKEWED_METRIC_TEXT,
    "noninvariant_metric_hopf": _NONINVARIANT_METRIC_TEXT,
}


def builtin_names() -> tuple[str, ...]:
    return tuple(sorted(_BUILTIN_TEXTS)) + ("euclidean_r2n",)


def builtin_text(name: str, planes: int = 2) -> str:
    """Scenario-file source of a built-in, exactly as it is compiled."""
    if name == "euclidean_r2n":
        return _euclidean_text(planes)
    try:
        return _BUILTIN_TEXTS[name]
    except KeyError:
        raise UnknownScenarioError(
            f"unknown scenario {name!r}; built-ins are {', '.join(builtin_names())}"
        ) from None


def builtin(name: str, planes: int = 2) -> ReductionScenario:
    """Fully populated built-in scenario.

    ``planes`` selects the member of the euclidean_r2n family (chart
    dimension 2 * planes) and is ignored by the other built-ins.
    """
    sf = parse_scenario(builtin_text(name, planes))
    quadrature = None
    if name == "linear_translation":
        # translations are not compact; average over a bounded window instead
        quadrature = window_quadrature(1, 16)
    return compile_scenario(sf, quadrature=quadrature)
