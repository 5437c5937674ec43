"""Level sets of the momentum map, vertical/horizontal splitting, the
reduced symplectic form and metric through horizontal lifts, the candidate
reduced almost complex structure, and the verification pipelines for the
submersion, the pullback identity and the main equivalence.

The quotient has no chart of its own except through the local section, so
the projection differential is never formed globally: a tangent vector of
the level set is projected onto the horizontal space and expressed in the
lift frame by solving a small linear system.  The lifts are pinned by
``d pi(lift_i) = e_i``, which that solve satisfies to roundoff.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .actions import (
    GroupAction,
    MomentumMap,
    apply_flow,
    generator,
    momentum_jacobian,
    momentum_values,
)
from .errors import (
    ActionNotFreeError,
    DegenerateInputError,
    NoConvergenceError,
    NotOnLevelError,
    NotRegularValueError,
    RankDeficientLiftError,
    SectionNotOnLevelError,
    VerticalLeakWarning,
)
from .geometry import (
    ChartPoint,
    FDConfig,
    TangentVector,
    TensorField,
    as_coords,
    eval_field,
    fd_jacobian,
    fro_norm,
    g_norm,
    kernel_basis,
    max_abs,
    orthonormalize,
    sample_ball,
)
from .report import VerificationReport
from .structures import StructureCheckResult

__all__ = [
    "SampleSpec",
    "ReductionScenario",
    "SplitTangentSpace",
    "ReducedStructures",
    "project_to_level",
    "split_tangent",
    "check_vertical_ad_invariance",
    "reduced_metric",
    "reduced_symplectic",
    "reduced_acs",
    "reduced_structures",
    "verify_submersion",
    "verify_reduction_identity",
    "verify_main_theorem",
    "sample_quotient_points",
]

IDENTITY_FIBER = "h_x independent of the fibre representative"
IDENTITY_ORTHO = "H(M)_m g-orthogonal to V(M)_m inside ker d mu"
IDENTITY_DIMS = "dim ker d mu = (n - k); dim H = n - 2k"
IDENTITY_VERT_INV = "pushforward of a vertical vector is vertical"
IDENTITY_REDUCTION = "pi* omega_red = i* omega"
IDENTITY_DEGENERACY = "omega(vertical, ker d mu) = 0"
IDENTITY_ACM = "pi_* o J = J_red o pi_*"
IDENTITY_RED_COMPAT = "omega_red(u, J_red v) = h_red(u, v)"
IDENTITY_RED_ACS = "J_red^2 = -I"
IDENTITY_IFF = "reduced compatibility with h_red holds iff pi is almost complex"
IDENTITY_HYPOTHESIS = "ambient compatibility omega(u, J v) = g(u, v)"


@dataclass(frozen=True)
class SampleSpec:
    """Seeded sampling request for quotient chart points."""

    count: int = 20
    seed: int = 0
    radius: float = 2.0
    points: tuple = ()

    def resolve(self, quotient_dim: int) -> list[ChartPoint]:
        if self.points:
            return [ChartPoint(p) for p in self.points]
        return sample_ball(quotient_dim, self.count, self.radius, self.seed)


@dataclass(frozen=True, eq=False)
class ReductionScenario:
    """One reduction instance: ambient structures, group action, momentum map
    with its level, and a local section of the quotient projection."""

    name: str
    chart_dim: int
    omega: TensorField
    metric: TensorField
    acs: TensorField
    action: GroupAction
    mu: MomentumMap
    quotient_dim: int
    section: object  # quotient ChartPoint -> ChartPoint on the level set
    quotient_chart_dim: int = -1
    tolerances: dict = field(default_factory=dict)
    sample_spec: SampleSpec = SampleSpec()

    def __post_init__(self):
        if self.quotient_chart_dim < 0:
            object.__setattr__(self, "quotient_chart_dim", self.quotient_dim)
        expected = self.chart_dim - 2 * self.action.group_dim
        if self.quotient_dim != expected:
            # abelian free built-ins always have dim G_beta = dim G, so the
            # bookkeeping n - k - dim G_beta collapses to n - 2k
            warnings.warn(
                f"scenario {self.name!r}: quotient dimension {self.quotient_dim} "
                f"differs from chart_dim - 2 * group_dim = {expected}",
                stacklevel=2,
            )
        if self.quotient_chart_dim != self.quotient_dim:
            warnings.warn(
                f"scenario {self.name!r}: quotient chart dimension "
                f"{self.quotient_chart_dim} differs from quotient dimension {self.quotient_dim}",
                stacklevel=2,
            )

    def section_point(self, x) -> ChartPoint:
        out = self.section(x if isinstance(x, ChartPoint) else ChartPoint(as_coords(x)))
        return out if isinstance(out, ChartPoint) else ChartPoint(as_coords(out))


@dataclass(frozen=True, eq=False)
class SplitTangentSpace:
    """Bases of the level-set tangent space at a point: the full kernel of
    d mu, the vertical subspace (raw generators), and a g-orthonormal
    horizontal complement."""

    base: ChartPoint
    level_tangent: tuple
    vertical: tuple
    horizontal: tuple


@dataclass(frozen=True, eq=False)
class ReducedStructures:
    """Reduced metric, symplectic form and almost-complex candidate at one
    quotient chart point."""

    point: ChartPoint
    h_beta: np.ndarray
    omega_beta: np.ndarray
    j_beta: np.ndarray


def project_to_level(mu: MomentumMap, guess, tol: float = 1e-9, max_iter: int = 50,
                     cfg: FDConfig = FDConfig(), min_gradient: float = 1e-4) -> ChartPoint:
    """Gauss-Newton projection onto the momentum level set.

    Raises NotRegularValueError when the momentum differential degenerates
    along the way (singular values below ``min_gradient``), and
    NoConvergenceError when the iteration budget runs out.
    """
    m = as_coords(guess).astype(float).copy()
    for _ in range(max_iter):
        r = momentum_values(mu, m) - mu.beta
        if float(np.linalg.norm(r)) <= tol:
            return ChartPoint(m)
        J = momentum_jacobian(mu, m, cfg)
        s = np.linalg.svd(J, compute_uv=False)
        if s.size == 0 or s[-1] < max(min_gradient, 1e-8 * s[0]):
            raise NotRegularValueError(
                f"momentum differential is rank deficient near {m} "
                f"(smallest singular value {0.0 if s.size == 0 else s[-1]:.3e})"
            )
        step = np.linalg.lstsq(J, r, rcond=None)[0]
        m = m - step
    raise NoConvergenceError(
        f"level-set projection did not reach |mu - beta| <= {tol} in {max_iter} iterations"
    )


def split_tangent(scen: ReductionScenario, m, cfg: FDConfig = FDConfig(), *,
                  rank_tol: float = 1e-8, level_tol: float = 1e-8,
                  free_tol: float = 1e-8) -> SplitTangentSpace:
    """Split the level-set tangent space at ``m`` into vertical and horizontal.

    The level tangent space is the kernel of the momentum differential, the
    vertical basis is the generator vectors, and the horizontal basis is the
    g-orthogonal complement of the vertical span inside the kernel,
    orthonormalized for the ambient metric at ``m``.
    """
    point = m if isinstance(m, ChartPoint) else ChartPoint(as_coords(m))
    n = scen.chart_dim
    k = scen.action.group_dim

    residual = float(np.linalg.norm(momentum_values(scen.mu, point) - scen.mu.beta))
    if residual >= level_tol:
        raise NotOnLevelError(f"|mu(m) - beta| = {residual:.3e} exceeds {level_tol:.1e}")

    Jmu = momentum_jacobian(scen.mu, point, cfg)
    level = kernel_basis(Jmu, rank_tol)
    if len(level) != n - k:
        raise NotRegularValueError(
            f"kernel of d mu has dimension {len(level)}, expected {n - k}"
        )

    gens = [generator(scen.action, i, point, cfg).components for i in range(k)]
    V = np.column_stack(gens) if gens else np.zeros((n, 0))
    sv = np.linalg.svd(V, compute_uv=False) if k else np.zeros(0)
    if k and sv[-1] <= free_tol:
        raise ActionNotFreeError(
            f"generators are degenerate at {point} (smallest singular value {sv[-1]:.3e})"
        )
    scale = 1.0 + max_abs(Jmu)
    tangency = max_abs(Jmu @ V) if k else 0.0
    if tangency > level_tol * scale:
        raise DegenerateInputError(
            f"generators leave ker d mu by {tangency:.3e}; "
            "the action is not tangent to the level set"
        )

    G = eval_field(scen.metric, point)
    v_onb = orthonormalize(gens, G, tol=free_tol)
    if len(v_onb) != k:
        raise ActionNotFreeError(f"vertical space degenerates to dimension {len(v_onb)}")
    projected = []
    for u in level:
        w = u.astype(float).copy()
        for b in v_onb:
            w -= (b @ G @ w) * b
        projected.append(w)
    horizontal = orthonormalize(projected, G, tol=1e-8)
    if len(horizontal) != n - 2 * k:
        raise DegenerateInputError(
            f"horizontal complement has dimension {len(horizontal)}, expected {n - 2 * k}"
        )

    return SplitTangentSpace(
        base=point,
        level_tangent=tuple(TangentVector(point, u) for u in level),
        vertical=tuple(TangentVector(point, u) for u in gens),
        horizontal=tuple(TangentVector(point, u) for u in horizontal),
    )


@dataclass(frozen=True, eq=False)
class _Frame:
    """Everything needed at one section point: splitting, orthonormal frames,
    pinned lifts and the ambient structures evaluated at the point."""

    x: ChartPoint
    m: ChartPoint
    split: SplitTangentSpace
    level: np.ndarray    # n x (n-k), columns = kernel basis of d mu
    v_onb: np.ndarray    # n x k, g-orthonormal vertical frame
    h_onb: np.ndarray    # n x (n-2k), g-orthonormal horizontal frame
    lifts: np.ndarray    # n x q with d pi(lift_i) = e_i
    G: np.ndarray
    Om: np.ndarray
    J: np.ndarray
    lift_residual: float


def _columns(vectors) -> np.ndarray:
    comps = [as_coords(v) for v in vectors]
    if not comps:
        return np.zeros((0, 0))
    return np.column_stack(comps)


def _lift_frame(scen: ReductionScenario, x, cfg: FDConfig = FDConfig(),
                section=None) -> _Frame:
    xq = x if isinstance(x, ChartPoint) else ChartPoint(as_coords(x))
    sec = scen.section_point if section is None else section
    m = sec(xq)
    if not isinstance(m, ChartPoint):
        m = ChartPoint(as_coords(m))
    level_err = float(np.linalg.norm(momentum_values(scen.mu, m) - scen.mu.beta))
    if level_err > 1e-8:
        raise SectionNotOnLevelError(
            f"section lands off the level set: |mu - beta| = {level_err:.3e}"
        )
    split = split_tangent(scen, m, cfg)
    n = scen.chart_dim
    q = scen.quotient_dim
    G = eval_field(scen.metric, m)
    Om = eval_field(scen.omega, m)
    J = eval_field(scen.acs, m)
    level = _columns(split.level_tangent) if split.level_tangent else np.zeros((n, 0))
    v_onb = _columns(orthonormalize([as_coords(v) for v in split.vertical], G)) \
        if split.vertical else np.zeros((n, 0))
    h_onb = _columns(split.horizontal) if split.horizontal else np.zeros((n, 0))

    dsig = fd_jacobian(sec, xq, cfg)           # n x q section pushforward
    if q == 0:
        lifts = np.zeros((n, 0))
        lift_residual = 0.0
    else:
        # horizontal part of the section pushforward; d pi of it is the
        # identity on the quotient chart because pi o section = id and d pi
        # kills the vertical complement
        lifts = h_onb @ (h_onb.T @ G @ dsig)
        sv = np.linalg.svd(lifts, compute_uv=False)
        if sv[-1] <= 1e-8 * max(1.0, sv[0]):
            raise RankDeficientLiftError(
                f"projection differential is not invertible on H at {m} "
                f"(singular values {sv})"
            )
        solve_back = np.linalg.lstsq(lifts, lifts, rcond=None)[0]
        lift_residual = max_abs(solve_back - np.eye(q))
    return _Frame(xq, m, split, level, v_onb, h_onb, lifts, G, Om, J, lift_residual)


def _decompose(frame: _Frame, u: np.ndarray):
    """g-orthogonal decomposition of an ambient vector into horizontal and
    vertical coefficients plus the remainder normal to the level set."""
    h_coef = frame.h_onb.T @ frame.G @ u if frame.h_onb.size else np.zeros(0)
    v_coef = frame.v_onb.T @ frame.G @ u if frame.v_onb.size else np.zeros(0)
    rem = u - (frame.h_onb @ h_coef if h_coef.size else 0.0) \
            - (frame.v_onb @ v_coef if v_coef.size else 0.0)
    return h_coef, v_coef, rem


def _dpi(frame: _Frame, u: np.ndarray) -> np.ndarray:
    """Quotient components of d pi(u): project to H, then invert the lifts."""
    q = frame.lifts.shape[1]
    if q == 0:
        return np.zeros(0)
    h_coef, _, _ = _decompose(frame, u)
    h_part = frame.h_onb @ h_coef
    return np.linalg.lstsq(frame.lifts, h_part, rcond=None)[0]


def _reduced_from_frame(frame: _Frame):
    """Reduced metric, symplectic form and acs candidate from one frame,
    with the per-lift leak magnitudes of J applied to the lifts."""
    L = frame.lifts
    q = L.shape[1]
    h = L.T @ frame.G @ L
    h = 0.5 * (h + h.T)
    w = L.T @ frame.Om @ L
    w = 0.5 * (w - w.T)
    j_cols = []
    vert_leak = np.zeros(q)
    normal_leak = np.zeros(q)
    for i in range(q):
        image = frame.J @ L[:, i]
        h_coef, v_coef, rem = _decompose(frame, image)
        scale = g_norm(L[:, i], frame.G)
        vert_leak[i] = float(np.linalg.norm(v_coef)) / scale if scale else 0.0
        normal_leak[i] = g_norm(rem, frame.G) / scale if scale else 0.0
        j_cols.append(np.linalg.lstsq(L, frame.h_onb @ h_coef, rcond=None)[0])
    j_red = np.column_stack(j_cols) if j_cols else np.zeros((0, 0))
    return h, w, j_red, vert_leak, normal_leak


def reduced_metric(scen: ReductionScenario, x, cfg: FDConfig = FDConfig()) -> np.ndarray:
    """Reduced metric h_x(v, w) = g(lift v, lift w) in the quotient chart."""
    frame = _lift_frame(scen, x, cfg)
    return _reduced_from_frame(frame)[0]


def reduced_symplectic(scen: ReductionScenario, x, cfg: FDConfig = FDConfig()) -> np.ndarray:
    """Reduced symplectic form omega_red(v, w) = omega(lift v, lift w)."""
    frame = _lift_frame(scen, x, cfg)
    return _reduced_from_frame(frame)[1]


def reduced_acs(scen: ReductionScenario, x, cfg: FDConfig = FDConfig(), *,
                leak_tol: float = 1e-6, warn: bool = True) -> np.ndarray:
    """Pushforward candidate for the reduced almost complex structure.

    Column i is d pi(J lift_i) in the quotient chart.  Well-definedness is
    not assumed: when J applied to a lift leaves the level-set tangent space
    by more than ``leak_tol`` a VerticalLeakWarning records the defect, and
    the candidate is still returned so the equivalence check can quantify
    both branches.
    """
    frame = _lift_frame(scen, x, cfg)
    _, _, j_red, vert_leak, normal_leak = _reduced_from_frame(frame)
    if warn and normal_leak.size and float(np.max(normal_leak)) > leak_tol:
        warnings.warn(
            f"J applied to a horizontal lift leaves the level tangent space "
            f"by {float(np.max(normal_leak)):.3e} at {frame.m}",
            VerticalLeakWarning,
            stacklevel=2,
        )
    return j_red


def reduced_structures(scen: ReductionScenario, x, cfg: FDConfig = FDConfig()) -> ReducedStructures:
    """All three reduced objects from a single lift frame."""
    frame = _lift_frame(scen, x, cfg)
    h, w, j_red, _, _ = _reduced_from_frame(frame)
    return ReducedStructures(point=frame.x, h_beta=h, omega_beta=w, j_beta=j_red)


def check_vertical_ad_invariance(scen: ReductionScenario, m, a,
                                 cfg: FDConfig = FDConfig(),
                                 tol: float = 1e-8) -> StructureCheckResult:
    """Pushforward of each generator stays in the vertical space of the moved
    point; for abelian groups that pushforward is the generator itself."""
    point = m if isinstance(m, ChartPoint) else ChartPoint(as_coords(m))
    params = np.asarray(a, dtype=float).reshape(scen.action.group_dim)
    level_err = float(np.linalg.norm(momentum_values(scen.mu, point) - scen.mu.beta))
    if level_err > 1e-8:
        raise NotOnLevelError(f"|mu(m) - beta| = {level_err:.3e}")
    D = fd_jacobian(lambda p: apply_flow(scen.action, params, p), point, cfg)
    moved = apply_flow(scen.action, params, point)
    G_moved = eval_field(scen.metric, moved)
    gens_moved = [generator(scen.action, i, moved, cfg).components
                  for i in range(scen.action.group_dim)]
    v_onb = orthonormalize(gens_moved, G_moved)
    worst = 0.0
    for i in range(scen.action.group_dim):
        w = D @ generator(scen.action, i, point, cfg).components
        for b in v_onb:
            w = w - (b @ G_moved @ w) * b
        worst = max(worst, g_norm(w, G_moved))
    return StructureCheckResult.from_samples(
        "vertical invariance", [worst], [point], tol, IDENTITY_VERT_INV
    )


def sample_quotient_points(scen: ReductionScenario, count: int | None = None,
                           seed: int | None = None, radius: float | None = None) -> list[ChartPoint]:
    """Seeded quotient chart points, honoring the scenario's sample spec for
    any argument left as None."""
    spec = scen.sample_spec
    if count is None and seed is None and radius is None and spec.points:
        return spec.resolve(scen.quotient_chart_dim)
    return sample_ball(
        scen.quotient_chart_dim,
        spec.count if count is None else count,
        spec.radius if radius is None else radius,
        spec.seed if seed is None else seed,
    )


def verify_submersion(scen: ReductionScenario, points, fiber_params=(0.0, np.pi / 3, np.pi),
                      cfg: FDConfig = FDConfig(), tol: float = 1e-5) -> VerificationReport:
    """Riemannian-submersion checks: fiber independence of the reduced metric,
    orthogonality and tangency of the splitting, dimension counts, and
    invariance of the vertical distribution."""
    report = VerificationReport("submersion")
    xs = list(points)
    prm = [np.atleast_1d(np.asarray(a, dtype=float)) for a in fiber_params]
    k = scen.action.group_dim
    n = scen.chart_dim

    fiber_res, ortho_res, tangency_res, vert_res, dim_res = [], [], [], [], []
    for x in xs:
        frame = _lift_frame(scen, x, cfg)
        h_here = _reduced_from_frame(frame)[0]
        worst = 0.0
        for a in prm:
            moved_section = lambda xq, _a=a: apply_flow(scen.action, _a, scen.section_point(xq))
            frame_a = _lift_frame(scen, x, cfg, section=moved_section)
            h_moved = _reduced_from_frame(frame_a)[0]
            worst = max(worst, max_abs(h_here - h_moved))
        fiber_res.append(worst)

        ortho = max_abs(frame.h_onb.T @ frame.G @ frame.v_onb) \
            if frame.h_onb.size and frame.v_onb.size else 0.0
        ortho_res.append(ortho)
        Jmu = momentum_jacobian(scen.mu, frame.m, cfg)
        tangency_res.append(max_abs(Jmu @ frame.h_onb) if frame.h_onb.size else 0.0)

        worst_vert = 0.0
        for a in prm:
            res = check_vertical_ad_invariance(scen, frame.m, a, cfg, tol)
            worst_vert = max(worst_vert, res.max_residual)
        vert_res.append(worst_vert)

        mism = abs(len(frame.split.level_tangent) - (n - k))
        mism += abs(len(frame.split.vertical) - k)
        mism += abs(len(frame.split.horizontal) - (n - 2 * k))
        mism += abs(frame.lifts.shape[1] - scen.quotient_dim)
        dim_res.append(float(mism))

    report.add(StructureCheckResult.from_samples(
        "fiber independence", fiber_res, xs, tol, IDENTITY_FIBER,
        extras={"fiber_params": [list(a) for a in prm]}))
    report.add(StructureCheckResult.from_samples(
        "splitting orthogonality", ortho_res, xs, 1e-9, IDENTITY_ORTHO))
    report.add(StructureCheckResult.from_samples(
        "horizontal tangent to level", tangency_res, xs, 1e-8, IDENTITY_ORTHO))
    report.add(StructureCheckResult.from_samples(
        "vertical invariance", vert_res, xs, max(tol, 1e-6), IDENTITY_VERT_INV))
    report.add(StructureCheckResult.from_samples(
        "dimension counts", dim_res, xs, 0.5, IDENTITY_DIMS))
    report.meta["points"] = [list(x.coords) for x in xs]
    report.meta["fiber_params"] = [list(a) for a in prm]
    return report


def verify_reduction_identity(scen: ReductionScenario, points, cfg: FDConfig = FDConfig(),
                              tol: float = 1e-5, degeneracy_tol: float = 1e-8,
                              pairs_per_point: int = 3, seed: int = 0) -> VerificationReport:
    """Pullback identity of the reduced symplectic form and the degeneracy of
    the vertical directions inside the restricted form.

    For sampled level-tangent pairs (u, v) the residual is
    |omega(m)(u, v) - omega_red(pi m)(d pi u, d pi v)|; vertical directions
    must pair to zero with the whole kernel of d mu.
    """
    report = VerificationReport("reduction identity")
    xs = list(points)
    rng = np.random.default_rng(seed)
    id_res, deg_res = [], []
    for x in xs:
        frame = _lift_frame(scen, x, cfg)
        w_red = _reduced_from_frame(frame)[1]
        K = frame.level
        worst = 0.0
        for _ in range(pairs_per_point):
            u = K @ rng.standard_normal(K.shape[1])
            v = K @ rng.standard_normal(K.shape[1])
            ambient = float(u @ frame.Om @ v)
            reduced = float(_dpi(frame, u) @ w_red @ _dpi(frame, v))
            worst = max(worst, abs(ambient - reduced))
        id_res.append(worst)

        worst_deg = 0.0
        for j in range(frame.v_onb.shape[1]):
            pairings = frame.v_onb[:, j] @ frame.Om @ K
            worst_deg = max(worst_deg, max_abs(pairings))
        deg_res.append(worst_deg)

    report.add(StructureCheckResult.from_samples(
        "pullback identity", id_res, xs, tol, IDENTITY_REDUCTION,
        extras={"pairs_per_point": pairs_per_point, "seed": seed}))
    report.add(StructureCheckResult.from_samples(
        "vertical degeneracy", deg_res, xs, degeneracy_tol, IDENTITY_DEGENERACY))
    report.meta["points"] = [list(x.coords) for x in xs]
    report.meta["seed"] = seed
    return report


def verify_main_theorem(scen: ReductionScenario, points, cfg: FDConfig = FDConfig(),
                        tol: float = 1e-5, hypothesis_tol: float = 1e-6) -> VerificationReport:
    """Equivalence between reduced compatibility and the almost-complex-mapping
    property of the projection.

    Per sample point three residuals are reported: the almost-complex-mapping
    defect (horizontal component of J applied to vertical vectors, plus the
    level-normal leak of J applied to the lifts), the reduced compatibility
    defect |omega_red J_red - h_red|, and |J_red^2 + I|.  The equivalence
    verdict requires the first two to land on the same side of the tolerance
    at every sample; ambient compatibility is checked alongside because the
    equivalence is only asserted under that hypothesis.
    """
    report = VerificationReport("main theorem")
    xs = list(points)
    acm_res, compat_res, acs_res, hyp_res = [], [], [], []
    samples_meta = []
    iff_res = []
    hypothesis_ok = True
    eye = np.eye(scen.quotient_dim)
    for x in xs:
        frame = _lift_frame(scen, x, cfg)
        h_red, w_red, j_red, vert_leak, normal_leak = _reduced_from_frame(frame)

        acm = float(np.max(normal_leak)) if normal_leak.size else 0.0
        for j in range(frame.v_onb.shape[1]):
            image = frame.J @ frame.v_onb[:, j]
            h_coef, _, _ = _decompose(frame, image)
            acm = max(acm, float(np.linalg.norm(h_coef)))
        compat = max_abs(w_red @ j_red - h_red)
        acs = fro_norm(j_red @ j_red + eye)
        hyp = max_abs(frame.Om @ frame.J - frame.G)

        acm_res.append(acm)
        compat_res.append(compat)
        acs_res.append(acs)
        hyp_res.append(hyp)
        hypothesis_ok = hypothesis_ok and hyp <= hypothesis_tol
        consistent = (acm <= tol) == (compat <= tol)
        iff_res.append(0.0 if consistent else 1.0)
        samples_meta.append({
            "point": list(frame.x.coords),
            "acm_residual": acm,
            "compat_residual": compat,
            "acs_residual": acs,
            "vertical_leak": float(np.max(vert_leak)) if vert_leak.size else 0.0,
            "normal_leak": float(np.max(normal_leak)) if normal_leak.size else 0.0,
            "lift_solve_residual": frame.lift_residual,
        })

    branch = "positive" if (acm_res and max(acm_res) <= tol and max(compat_res) <= tol) \
        else "negative"
    report.add(StructureCheckResult.from_samples(
        "almost complex mapping defect", acm_res, xs, tol, IDENTITY_ACM))
    report.add(StructureCheckResult.from_samples(
        "reduced compatibility", compat_res, xs, tol, IDENTITY_RED_COMPAT))
    report.add(StructureCheckResult.from_samples(
        "reduced acs identity", acs_res, xs, tol, IDENTITY_RED_ACS))
    report.add(StructureCheckResult.from_samples(
        "ambient compatibility hypothesis", hyp_res, xs, hypothesis_tol, IDENTITY_HYPOTHESIS))
    report.add(StructureCheckResult.from_samples(
        "main theorem iff", iff_res, xs, 0.5, IDENTITY_IFF,
        extras={"hypothesis_ok": hypothesis_ok, "branch": branch,
                "hypothesis_violated": not hypothesis_ok}))
    report.meta["samples"] = samples_meta
    return report
