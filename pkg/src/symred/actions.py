"""Lie group actions on charted manifolds: infinitesimal generators,
isometry / symplectomorphism / Hamiltonian checks, invariant-metric
averaging, and invariance of endomorphism fields.

Group elements are addressed by Lie-algebra parameter vectors through a
fixed exponential chart; the built-in groups are circles, tori and
translations, so the chart is globally surjective and quadrature over the
group is plain uniform sampling.  The momentum sign convention is
``omega(xi_M, .) = d mu_xi``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedNonabelianError
from .geometry import (
    ChartPoint,
    FDConfig,
    TangentVector,
    TensorField,
    as_coords,
    eval_field,
    fd_gradient,
    fd_jacobian,
    max_abs,
    _central_difference,
)
from .structures import StructureCheckResult

__all__ = [
    "GroupAction",
    "MomentumMap",
    "apply_flow",
    "generator",
    "generator_vector",
    "momentum_values",
    "momentum_jacobian",
    "check_action_axioms",
    "check_isometry",
    "check_symplectomorphism",
    "momentum_residual",
    "check_momentum_invariance",
    "average_metric",
    "check_field_invariance",
    "uniform_circle_quadrature",
    "uniform_torus_quadrature",
    "window_quadrature",
    "planar_rotation_action",
]

IDENTITY_ISOMETRY = "g_m(u, v) = g_{Phi_a(m)}(D u, D v)"
IDENTITY_SYMPLECTO = "omega_m(u, v) = omega_{Phi_a(m)}(D u, D v)"
IDENTITY_MOMENTUM = "omega(xi_M, .) = d mu_xi"
IDENTITY_MU_INVARIANT = "mu o Phi_a = mu"
IDENTITY_FIELD_INVARIANT = "D F(m) = F(Phi_a(m)) D"
IDENTITY_AXIOMS = "Phi_0 = id and Phi_s o Phi_t = Phi_{s+t}"


@dataclass(frozen=True, eq=False)
class GroupAction:
    """Parametrized flow of a k-dimensional abelian group on one chart.

    ``flow(params, p)`` is the diffeomorphism for the group element reached
    by the parameter vector in the exponential chart.  ``quadrature`` is a
    tuple of (parameter vector, weight) pairs with weights summing to one,
    used for group averaging.
    """

    group_dim: int
    flow: object  # (params, ChartPoint) -> ChartPoint or array-like
    algebra_basis: tuple[str, ...] = ()
    quadrature: tuple = ()
    abelian: bool = True

    def __post_init__(self):
        if self.group_dim < 1:
            raise ValueError("group dimension must be at least 1")
        basis = self.algebra_basis or tuple(f"xi{i + 1}" for i in range(self.group_dim))
        if len(basis) != self.group_dim:
            raise ValueError("algebra basis size does not match group dimension")
        object.__setattr__(self, "algebra_basis", tuple(basis))
        quad = tuple((np.asarray(a, dtype=float).reshape(self.group_dim), float(w))
                     for a, w in self.quadrature)
        if quad:
            total = sum(w for _, w in quad)
            if abs(total - 1.0) > 1e-12:
                raise ValueError(f"quadrature weights sum to {total}, expected 1")
        object.__setattr__(self, "quadrature", quad)


@dataclass(frozen=True, eq=False)
class MomentumMap:
    """Component scalar fields of a momentum map together with the level."""

    components: tuple
    beta: np.ndarray

    def __post_init__(self):
        comps = tuple(self.components)
        beta = np.atleast_1d(np.asarray(self.beta, dtype=float))
        if len(comps) != beta.shape[0]:
            raise ValueError(
                f"{len(comps)} momentum components but level vector of length {beta.shape[0]}"
            )
        object.__setattr__(self, "components", comps)
        beta = beta.copy()
        beta.flags.writeable = False
        object.__setattr__(self, "beta", beta)

    @property
    def group_dim(self) -> int:
        return len(self.components)


def apply_flow(action: GroupAction, params, p) -> ChartPoint:
    out = action.flow(np.asarray(params, dtype=float).reshape(action.group_dim),
                      p if isinstance(p, ChartPoint) else ChartPoint(as_coords(p)))
    return out if isinstance(out, ChartPoint) else ChartPoint(as_coords(out))


def _flow_map(action: GroupAction, params):
    a = np.asarray(params, dtype=float).reshape(action.group_dim)
    return lambda q: apply_flow(action, a, q)


def generator_vector(action: GroupAction, xi, p, cfg: FDConfig = FDConfig()) -> TangentVector:
    """Infinitesimal generator along an arbitrary algebra vector:
    d/dt flow(t * xi, p) at t = 0."""
    point = p if isinstance(p, ChartPoint) else ChartPoint(as_coords(p))
    direction = np.asarray(xi, dtype=float).reshape(action.group_dim)

    def sample(t: float) -> np.ndarray:
        return apply_flow(action, t * direction, point).coords

    return TangentVector(point, _central_difference(sample, cfg))


def generator(action: GroupAction, xi_index: int, p, cfg: FDConfig = FDConfig()) -> TangentVector:
    """Generator of the xi_index-th algebra basis element at p."""
    if not 0 <= xi_index < action.group_dim:
        raise ValueError(f"algebra index {xi_index} out of range for k={action.group_dim}")
    e = np.zeros(action.group_dim)
    e[xi_index] = 1.0
    return generator_vector(action, e, p, cfg)


def momentum_values(mu: MomentumMap, p) -> np.ndarray:
    return np.array([eval_field(c, p) for c in mu.components])


def momentum_jacobian(mu: MomentumMap, p, cfg: FDConfig = FDConfig()) -> np.ndarray:
    """k x n matrix whose rows are the gradients of the momentum components."""
    return np.vstack([fd_gradient(c, p, cfg) for c in mu.components])


def check_action_axioms(action: GroupAction, params, points, cfg: FDConfig = FDConfig(),
                        tol: float = 1e-9) -> StructureCheckResult:
    """Identity axiom flow(0, p) = p and, for abelian actions, additivity
    flow(s, flow(t, p)) = flow(s + t, p) over the sampled parameters."""
    pts = list(points)
    prm = [np.asarray(a, dtype=float).reshape(action.group_dim) for a in params]
    zero = np.zeros(action.group_dim)
    residuals = []
    for p in pts:
        res = float(np.linalg.norm(apply_flow(action, zero, p).coords - as_coords(p)))
        if action.abelian:
            for s in prm:
                for t in prm:
                    two_step = apply_flow(action, s, apply_flow(action, t, p))
                    one_step = apply_flow(action, s + t, p)
                    res = max(res, float(np.linalg.norm(two_step.coords - one_step.coords)))
        residuals.append(res)
    return StructureCheckResult.from_samples(
        "action axioms", residuals, pts, tol, IDENTITY_AXIOMS
    )


def _pullback_check(name, identity, action, field_, params, points, cfg, tol):
    """Shared body of the isometry/symplectomorphism checks: compare a
    bilinear field with its pullback D^T F(Phi_a(p)) D."""
    pts = list(points)
    prm = [np.asarray(a, dtype=float).reshape(action.group_dim) for a in params]
    residuals = []
    for p in pts:
        worst = 0.0
        for a in prm:
            D = fd_jacobian(_flow_map(action, a), p, cfg)
            moved = eval_field(field_, apply_flow(action, a, p))
            here = eval_field(field_, p)
            worst = max(worst, max_abs(D.T @ moved @ D - here))
        residuals.append(worst)
    return StructureCheckResult.from_samples(name, residuals, pts, tol, identity)


def check_isometry(action: GroupAction, g: TensorField, params, points,
                   cfg: FDConfig = FDConfig(), tol: float = 1e-6) -> StructureCheckResult:
    return _pullback_check("isometry", IDENTITY_ISOMETRY, action, g, params, points, cfg, tol)


def check_symplectomorphism(action: GroupAction, w: TensorField, params, points,
                            cfg: FDConfig = FDConfig(), tol: float = 1e-6) -> StructureCheckResult:
    return _pullback_check("symplectomorphism", IDENTITY_SYMPLECTO, action, w, params, points,
                           cfg, tol)


def momentum_residual(action: GroupAction, mu: MomentumMap, w: TensorField, points,
                      cfg: FDConfig = FDConfig(), tol: float = 1e-6) -> StructureCheckResult:
    """Hamiltonian condition omega(xi_M, .) = d mu_xi for every basis element.

    With the row convention u^T Omega v for omega(u, v) the identity in
    components is Omega^T xi_M = grad mu, checked in the Euclidean norm.
    """
    pts = list(points)
    residuals = []
    for p in pts:
        Om = eval_field(w, p)
        worst = 0.0
        for i in range(action.group_dim):
            xi = generator(action, i, p, cfg).components
            grad = fd_gradient(mu.components[i], p, cfg)
            worst = max(worst, float(np.linalg.norm(Om.T @ xi - grad)))
        residuals.append(worst)
    return StructureCheckResult.from_samples(
        "hamiltonian condition", residuals, pts, tol, IDENTITY_MOMENTUM
    )


def check_momentum_invariance(action: GroupAction, mu: MomentumMap, params, points,
                              tol: float = 1e-6) -> StructureCheckResult:
    """Invariance mu o Phi_a = mu; this is equivariance for abelian groups.

    Nonabelian actions are refused: they would need a coadjoint
    representation, which is outside the built-in scope.
    """
    if not action.abelian:
        raise UnsupportedNonabelianError(
            "momentum equivariance for nonabelian groups needs a coadjoint action"
        )
    pts = list(points)
    prm = [np.asarray(a, dtype=float).reshape(action.group_dim) for a in params]
    residuals = []
    for p in pts:
        here = momentum_values(mu, p)
        worst = 0.0
        for a in prm:
            moved = momentum_values(mu, apply_flow(action, a, p))
            worst = max(worst, max_abs(moved - here))
        residuals.append(worst)
    return StructureCheckResult.from_samples(
        "momentum invariance", residuals, pts, tol, IDENTITY_MU_INVARIANT
    )


def average_metric(g0: TensorField, action: GroupAction, cfg: FDConfig = FDConfig()) -> TensorField:
    """Group average of the pullback metrics over the action's quadrature:
    sum_a w_a D_a^T G0(Phi_a(p)) D_a.

    A convex combination of pullbacks of an SPD field is SPD, and for an
    exact quadrature the average is invariant under the group.
    """
    if not action.quadrature:
        raise ValueError("action has no quadrature rule to average over")
    n = g0.shape[0]

    def avg(p: ChartPoint) -> np.ndarray:
        total = np.zeros((n, n))
        for a, weight in action.quadrature:
            D = fd_jacobian(_flow_map(action, a), p, cfg)
            moved = eval_field(g0, apply_flow(action, a, p))
            total += weight * (D.T @ moved @ D)
        return 0.5 * (total + total.T)

    return TensorField.matrix(avg, n, name=f"group average of {g0.name or 'metric'}")


def check_field_invariance(field_: TensorField, action: GroupAction, params, points,
                           cfg: FDConfig = FDConfig(), tol: float = 1e-6) -> StructureCheckResult:
    """Invariance of an endomorphism field: D F(p) = F(Phi_a(p)) D."""
    pts = list(points)
    prm = [np.asarray(a, dtype=float).reshape(action.group_dim) for a in params]
    residuals = []
    for p in pts:
        here = eval_field(field_, p)
        worst = 0.0
        for a in prm:
            D = fd_jacobian(_flow_map(action, a), p, cfg)
            moved = eval_field(field_, apply_flow(action, a, p))
            worst = max(worst, max_abs(D @ here - moved @ D))
        residuals.append(worst)
    return StructureCheckResult.from_samples(
        "endomorphism invariance", residuals, pts, tol, IDENTITY_FIELD_INVARIANT
    )


def uniform_circle_quadrature(n: int = 64) -> tuple:
    """n equally weighted angles on [0, 2 pi); exact for low trigonometric
    polynomials, spectrally accurate for smooth periodic integrands."""
    return tuple((np.array([2.0 * np.pi * i / n]), 1.0 / n) for i in range(n))


def uniform_torus_quadrature(k: int, n: int = 16) -> tuple:
    """Product of k uniform circle rules with n points per factor."""
    nodes = [np.array([2.0 * np.pi * i / n]) for i in range(n)]
    out = [np.zeros(0)]
    for _ in range(k):
        out = [np.concatenate([a, t]) for a in out for t in nodes]
    weight = 1.0 / len(out)
    return tuple((a, weight) for a in out)


def window_quadrature(k: int, n: int = 16, half_width: float = 1.0) -> tuple:
    """Uniform grid on [-half_width, half_width]^k with equal weights.

    Translations have no invariant probability measure; this bounded window
    stands in so that averaging identities can still be exercised on fields
    that are already invariant.
    """
    axis = np.linspace(-half_width, half_width, n)
    out = [np.zeros(0)]
    for _ in range(k):
        out = [np.concatenate([a, [t]]) for a in out for t in axis]
    weight = 1.0 / len(out)
    return tuple((a, weight) for a in out)


def planar_rotation_action(n_quad: int = 64) -> GroupAction:
    """Counterclockwise rotations of the plane, the basic circle action."""

    def flow(params, p):
        theta = float(params[0])
        x, y = p.coords
        c, s = np.cos(theta), np.sin(theta)
        return ChartPoint([c * x - s * y, s * x + c * y])

    return GroupAction(
        group_dim=1,
        flow=flow,
        algebra_basis=("rotation",),
        quadrature=uniform_circle_quadrature(n_quad),
        abelian=True,
    )
