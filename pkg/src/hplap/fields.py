"""Deformed horizontal vector fields, gradients and degenerate p-Laplacians.

For a fixed parameter k >= 1 the fields on an H-type group are

    X_j = d/dz_j + (k/2) |z|^{2k-2} * sum_i (J_i z)_j * d/dt_i,   j = 1..m,

i.e. the coordinate derivative plus a drift along the center weighted by
the bracket coefficients (J_i z)_j = <J_i z, e_j>.  For k = 1 these are
the left-invariant fields; for k > 1 they are neither left nor right
invariant, and for non-integer k they are not smooth across {z = 0}.

The horizontal gradient is grad_X u = (X_1 u, ..., X_m u), the horizontal
divergence of a field (u_1, ..., u_m) is sum_j X_j u_j, and the
degenerate p-Laplacian is

    L_{p,k} u = div_X(|grad_X u|^{p-2} grad_X u),

computed here as the divergence of the flux field by nested numerical
differentiation.  The weighted variant uses the flux
w |grad_X u|^{p-2} grad_X u with w = d^alpha |grad_X d|^beta.

Differentiation backends
------------------------
``DiffBackend(mode="analytic")`` uses a field's analytic Euclidean
gradient when present and falls back to central differences;
``mode="central-fd"`` forces central differences (the oracle mode used by
the verification suites).  Central-difference steps are per-coordinate,
``h * (scale + |coordinate|)``, where the scale defaults to 1 and can be
overridden per field: functions of the gauge norm d vary over ~d in z and
over ~d^{2k}/4 in t, and using those anisotropic scales is what keeps the
finite differences conditioned at small d.  First derivatives use h1
(~eps_machine^{1/3}); outer derivatives of nested fluxes use h2
(~eps_machine^{1/4}); a finite difference OF a finite difference needs an
inner step near eps_machine^{1/4} as well, which callers select by
passing a backend with a larger h1.

Everything is a pure function of immutable inputs; evaluation callables
take coordinate batches Z (n, m) and T (n, q) and return (n,) or (n, m)
arrays, so suites can map over sample points in one vectorized call.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .algebra import GroupPoint, HTypeAlgebra, OperatorParams, norm_d

__all__ = [
    "NearSingularWarning",
    "DegenerateFluxWarning",
    "ScalarField",
    "HorizontalVectorField",
    "DiffBackend",
    "RadialProfile",
    "aniso_scales",
    "euclid_gradient",
    "fd_x_gradient",
    "divergence_of_values",
    "apply_X",
    "apply_X_batch",
    "horizontal_gradient",
    "horizontal_gradient_batch",
    "horizontal_divergence",
    "horizontal_divergence_batch",
    "p_laplacian",
    "p_laplacian_batch",
    "weighted_p_laplacian",
    "weighted_p_laplacian_batch",
    "gradient_weight_batch",
    "gaussian_field",
    "monomial_field",
    "linear_combination_field",
    "profile_field",
    "scale_field",
]

#: exclusion radius around {z = 0} where the field coefficients are
#: non-smooth for non-integer k
DELTA_Z = 1e-6

#: gradient magnitude below which the p < 2 flux is treated as degenerate
DEGENERATE_FLUX_TOL = 1e-10


class NearSingularWarning(UserWarning):
    """Evaluation inside the singular-exclusion radius around {z = 0} where
    the coefficient |z|^{2k-2} is not smooth; accuracy is reduced."""


class DegenerateFluxWarning(UserWarning):
    """|grad_X u| vanished at an evaluation point with p < 2; the flux is
    continued by 0 there."""


@dataclass(frozen=True)
class ScalarField:
    """An evaluatable real function on the group.

    eval takes batches (Z, T) -> (n,).  euclid_grad, when present, returns
    the n x (m + q) matrix of Euclidean partials (d/dz_j then d/dt_i) and
    must agree with central differences of eval.  fd_scales optionally
    supplies per-point characteristic lengths (s_z, s_t) used to scale
    finite-difference steps.
    """

    eval: Callable[[np.ndarray, np.ndarray], np.ndarray]
    euclid_grad: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    label: str = ""
    fd_scales: Optional[Callable[[np.ndarray, np.ndarray], tuple]] = None

    def at(self, g: GroupPoint) -> float:
        return float(self.eval(g.z[None, :], g.t[None, :])[0])


@dataclass(frozen=True)
class HorizontalVectorField:
    """m component functions on the group; components[j] maps batches
    (Z, T) -> (n,)."""

    components: tuple
    fd_scales: Optional[Callable[[np.ndarray, np.ndarray], tuple]] = None

    def values(self, Z: np.ndarray, T: np.ndarray) -> np.ndarray:
        return np.stack([c(Z, T) for c in self.components], axis=-1)

    @classmethod
    def from_values(cls, fn: Callable, m: int, fd_scales=None) -> "HorizontalVectorField":
        comps = tuple((lambda Z, T, _j=j: fn(Z, T)[:, _j]) for j in range(m))
        obj = cls(components=comps, fd_scales=fd_scales)
        object.__setattr__(obj, "_values_fn", fn)
        return obj


@dataclass(frozen=True)
class DiffBackend:
    """Differentiation mode and central-difference steps.

    mode: "analytic" (use analytic gradients when a field has them) or
    "central-fd" (always differentiate numerically).  h1 is the relative
    step for first derivatives, h2 for the outer derivative of nested
    fluxes.
    """

    mode: str = "analytic"
    h1: float = 6e-6
    h2: float = 1e-4

    def __post_init__(self):
        if self.mode not in ("analytic", "central-fd"):
            raise ValueError(f"unknown backend mode {self.mode!r}")
        if not (self.h1 > 0 and self.h2 > 0):
            raise ValueError("finite-difference steps must be positive")


@dataclass(frozen=True)
class RadialProfile:
    """A profile f of one real variable with derivatives, used to build
    radial fields f(d_eps)."""

    f: Callable[[np.ndarray], np.ndarray]
    df: Callable[[np.ndarray], np.ndarray]
    d2f: Callable[[np.ndarray], np.ndarray]
    label: str = ""


def aniso_scales(params: OperatorParams) -> Callable:
    """Characteristic finite-difference lengths for functions of the gauge
    norm: ~d in the horizontal directions, ~d^{2k}/4 along the center."""

    def scales(Z: np.ndarray, T: np.ndarray):
        d = norm_d(params, (Z, T))
        sz = np.maximum(d, 1e-8)
        st = np.maximum(d ** (2.0 * params.k) / 4.0, 1e-12)
        return sz, st

    return scales


# ---------------------------------------------------------------------------
# batching helpers


def _as_batch(Z, T, m: int, q: int):
    Z = np.asarray(Z, dtype=float)
    T = np.asarray(T, dtype=float)
    single = Z.ndim == 1
    if single:
        Z = Z[None, :]
        T = T[None, :]
    if Z.shape[-1] != m or T.shape[-1] != q:
        raise ValueError(f"coordinate blocks must have widths m={m}, q={q}")
    return Z, T, single


def _field_scales(f, Z, T):
    if f is not None and getattr(f, "fd_scales", None) is not None:
        sz, st = f.fd_scales(Z, T)
        return np.broadcast_to(sz, Z.shape[:1]), np.broadcast_to(st, Z.shape[:1])
    n = Z.shape[0]
    return np.ones(n), np.ones(n)


def _near_singular_check(params: OperatorParams, Z: np.ndarray) -> None:
    # |z|^{2k-2} is real-analytic for integer k; otherwise it is not smooth
    # across {z = 0} (and not even Lipschitz for 1 < k < 3/2).
    k = params.k
    if k == np.floor(k):
        return
    zn = np.sqrt(np.einsum("ni,ni->n", Z, Z))
    if np.any(zn < DELTA_Z):
        warnings.warn(
            f"evaluation within |z| < {DELTA_Z} with non-integer k={k}: "
            "field coefficients are non-smooth there, accuracy reduced",
            NearSingularWarning,
            stacklevel=3,
        )


def _fd_euclid_grad(f: ScalarField, Z: np.ndarray, T: np.ndarray, h: float) -> np.ndarray:
    """Central differences of f.eval in all m + q coordinates."""
    n, m = Z.shape
    q = T.shape[1]
    sz, st = _field_scales(f, Z, T)
    out = np.empty((n, m + q))
    for j in range(m):
        hj = h * (sz + np.abs(Z[:, j]))
        zp = Z.copy()
        zp[:, j] = Z[:, j] + hj
        hj_eff_p = zp[:, j] - Z[:, j]  # representable step
        zm = Z.copy()
        zm[:, j] = Z[:, j] - hj
        hj_eff = hj_eff_p + (Z[:, j] - zm[:, j])
        out[:, j] = (f.eval(zp, T) - f.eval(zm, T)) / hj_eff
    for i in range(q):
        hi = h * (st + np.abs(T[:, i]))
        tp = T.copy()
        tp[:, i] = T[:, i] + hi
        hi_eff_p = tp[:, i] - T[:, i]
        tm = T.copy()
        tm[:, i] = T[:, i] - hi
        hi_eff = hi_eff_p + (T[:, i] - tm[:, i])
        out[:, m + i] = (f.eval(Z, tp) - f.eval(Z, tm)) / hi_eff
    return out


def euclid_gradient(
    backend: DiffBackend, f: ScalarField, Z: np.ndarray, T: np.ndarray
) -> np.ndarray:
    """All Euclidean partials of f, shape (n, m + q)."""
    if backend.mode == "analytic" and f.euclid_grad is not None:
        return np.asarray(f.euclid_grad(Z, T), dtype=float)
    return _fd_euclid_grad(f, Z, T, backend.h1)


def _x_from_euclid(
    alg: HTypeAlgebra, params: OperatorParams, Z: np.ndarray, G: np.ndarray
) -> np.ndarray:
    """Contract Euclidean partials (n, m+q) into the X-gradient (n, m)."""
    m, k = alg.m, params.k
    Gz, Gt = G[:, :m], G[:, m:]
    zn2 = np.einsum("ni,ni->n", Z, Z)
    # |z|^{2k-2}; the k = 1 case is the constant 1 including at z = 0
    coef = 0.5 * k * zn2 ** (k - 1.0)
    Jz = np.einsum("iab,nb->nia", alg.J, Z)  # (n, q, m): (J_i z)_a
    return Gz + coef[:, None] * np.einsum("nia,ni->na", Jz, Gt)


def horizontal_gradient_batch(
    alg: HTypeAlgebra,
    params: OperatorParams,
    backend: DiffBackend,
    f: ScalarField,
    Z: np.ndarray,
    T: np.ndarray,
) -> np.ndarray:
    """grad_X f at a batch of points, shape (n, m)."""
    Z, T, single = _as_batch(Z, T, alg.m, alg.q)
    _near_singular_check(params, Z)
    G = euclid_gradient(backend, f, Z, T)
    out = _x_from_euclid(alg, params, Z, G)
    return out[0] if single else out


def apply_X_batch(alg, params, backend, f, Z, T, j: int) -> np.ndarray:
    """X_j f at a batch of points; j is one-based as in X_1 .. X_m."""
    if not 1 <= j <= alg.m:
        raise ValueError(f"field index j must satisfy 1 <= j <= m={alg.m}")
    single = np.asarray(Z).ndim == 1
    out = horizontal_gradient_batch(alg, params, backend, f, Z, T)[..., j - 1]
    return float(out) if single else out


def apply_X(alg, params, backend, f, g: GroupPoint, j: int) -> float:
    return apply_X_batch(alg, params, backend, f, g.z, g.t, j)


def horizontal_gradient(alg, params, backend, f, g: GroupPoint) -> np.ndarray:
    return horizontal_gradient_batch(alg, params, backend, f, g.z, g.t)


# ---------------------------------------------------------------------------
# divergence and p-Laplacians


def _divergence_fd(
    alg: HTypeAlgebra,
    params: OperatorParams,
    values_fn: Callable,
    Z: np.ndarray,
    T: np.ndarray,
    h: float,
    sz: np.ndarray,
    st: np.ndarray,
) -> np.ndarray:
    """div_X of a batch vector field given by values_fn(Z, T) -> (n, m),
    by central differences with per-coordinate steps h * (scale + |c|)."""
    n, m = Z.shape
    q = T.shape[1]
    k = params.k
    zn2 = np.einsum("ni,ni->n", Z, Z)
    coef = 0.5 * k * zn2 ** (k - 1.0)
    Jz = np.einsum("iab,nb->nia", alg.J, Z)
    out = np.zeros(n)
    for j in range(m):
        hj = h * (sz + np.abs(Z[:, j]))
        zp = Z.copy()
        zp[:, j] = Z[:, j] + hj
        zm = Z.copy()
        zm[:, j] = Z[:, j] - hj
        hj_eff = (zp[:, j] - Z[:, j]) + (Z[:, j] - zm[:, j])
        out += (values_fn(zp, T)[:, j] - values_fn(zm, T)[:, j]) / hj_eff
    for i in range(q):
        hi = h * (st + np.abs(T[:, i]))
        tp = T.copy()
        tp[:, i] = T[:, i] + hi
        tm = T.copy()
        tm[:, i] = T[:, i] - hi
        hi_eff = (tp[:, i] - T[:, i]) + (T[:, i] - tm[:, i])
        dF = (values_fn(Z, tp) - values_fn(Z, tm)) / hi_eff[:, None]  # (n, m)
        out += coef * np.einsum("nj,nj->n", Jz[:, i, :], dF)
    return out


def fd_x_gradient(alg, params, f: ScalarField, Z, T, h: float) -> np.ndarray:
    """Forced central-difference X-gradient with an explicit step factor,
    regardless of whether f carries an analytic gradient."""
    Z, T, single = _as_batch(Z, T, alg.m, alg.q)
    G = _fd_euclid_grad(f, Z, T, h)
    out = _x_from_euclid(alg, params, Z, G)
    return out[0] if single else out


def divergence_of_values(alg, params, values_fn, Z, T, h: float, scales=None) -> np.ndarray:
    """div_X of a batch vector function values_fn(Z, T) -> (n, m) by
    central differences with step factor h; scales = (s_z, s_t) arrays or
    a callable (Z, T) -> (s_z, s_t)."""
    Z, T, single = _as_batch(Z, T, alg.m, alg.q)
    if scales is None:
        sz, st = np.ones(Z.shape[0]), np.ones(Z.shape[0])
    elif callable(scales):
        sz, st = scales(Z, T)
    else:
        sz, st = scales
    out = _divergence_fd(alg, params, values_fn, Z, T, h, sz, st)
    return out[0] if single else out


def horizontal_divergence_batch(
    alg, params, backend, F: HorizontalVectorField, Z, T
) -> np.ndarray:
    """div_X F = sum_j X_j F_j at a batch of points."""
    if len(F.components) != alg.m:
        raise ValueError(f"vector field must have m={alg.m} components")
    Z, T, single = _as_batch(Z, T, alg.m, alg.q)
    _near_singular_check(params, Z)
    sz, st = _field_scales(F, Z, T)
    vf = getattr(F, "_values_fn", None) or F.values
    out = _divergence_fd(alg, params, vf, Z, T, backend.h2, sz, st)
    return out[0] if single else out


def horizontal_divergence(alg, params, backend, F, g: GroupPoint) -> float:
    return float(horizontal_divergence_batch(alg, params, backend, F, g.z, g.t))


def _flux_factor(G: np.ndarray, p: float) -> np.ndarray:
    """|grad|^{p-2} with the continuous-by-zero extension at critical points
    for p < 2 (flagged)."""
    nrm = np.sqrt(np.einsum("nj,nj->n", G, G))
    if p >= 2.0:
        return nrm ** (p - 2.0)
    degenerate = nrm < DEGENERATE_FLUX_TOL
    if np.any(degenerate):
        warnings.warn(
            "degenerate flux: |grad_X u| ~ 0 with p < 2; continuing flux by 0",
            DegenerateFluxWarning,
            stacklevel=4,
        )
    safe = np.where(degenerate, 1.0, nrm)
    return np.where(degenerate, 0.0, safe ** (p - 2.0))


def gradient_weight_batch(params: OperatorParams, Z: np.ndarray, T: np.ndarray) -> np.ndarray:
    """The weight w = d^alpha |grad_X d|^beta, using the closed form
    |grad_X d| = (|z|/d)^{2k-1} valid away from the origin."""
    d = norm_d(params, (Z, T))
    zn = np.sqrt(np.einsum("ni,ni->n", Z, Z))
    with np.errstate(divide="ignore", invalid="ignore"):
        w = d ** params.alpha
        if params.beta != 0.0:
            w = w * (zn / d) ** ((2.0 * params.k - 1.0) * params.beta)
    return w


def _p_laplacian_impl(alg, params, backend, f, Z, T, weighted: bool) -> np.ndarray:
    p = params.p

    def flux(Zp, Tp):
        G = euclid_gradient(backend, f, Zp, Tp)
        Xg = _x_from_euclid(alg, params, Zp, G)
        fac = _flux_factor(Xg, p)
        if weighted:
            fac = fac * gradient_weight_batch(params, Zp, Tp)
        return fac[:, None] * Xg

    sz, st = _field_scales(f, Z, T)
    return _divergence_fd(alg, params, flux, Z, T, backend.h2, sz, st)


def p_laplacian_batch(alg, params, backend, f, Z, T) -> np.ndarray:
    """L_{p,k} f = div_X(|grad_X f|^{p-2} grad_X f) at a batch of points,
    by outer central differences of the flux with step h2."""
    Z, T, single = _as_batch(Z, T, alg.m, alg.q)
    _near_singular_check(params, Z)
    out = _p_laplacian_impl(alg, params, backend, f, Z, T, weighted=False)
    return out[0] if single else out


def p_laplacian(alg, params, backend, f, g: GroupPoint) -> float:
    return float(p_laplacian_batch(alg, params, backend, f, g.z, g.t))


def weighted_p_laplacian_batch(alg, params, backend, f, Z, T) -> np.ndarray:
    """div_X(w |grad_X f|^{p-2} grad_X f) with w = d^alpha |grad_X d|^beta."""
    params.validate_weighted()
    Z, T, single = _as_batch(Z, T, alg.m, alg.q)
    _near_singular_check(params, Z)
    d = norm_d(params, (Z, T))
    zn = np.sqrt(np.einsum("ni,ni->n", Z, Z))
    if np.any(d < DELTA_Z) or (params.beta != 0.0 and np.any(zn < DELTA_Z)):
        warnings.warn(
            "weighted operator evaluated near the singular locus of the weight",
            NearSingularWarning,
            stacklevel=2,
        )
    out = _p_laplacian_impl(alg, params, backend, f, Z, T, weighted=True)
    return out[0] if single else out


def weighted_p_laplacian(alg, params, backend, f, g: GroupPoint) -> float:
    return float(weighted_p_laplacian_batch(alg, params, backend, f, g.z, g.t))


# ---------------------------------------------------------------------------
# test corpus: anisotropic Gaussians, coordinate monomials, profiles of d


def gaussian_field(a: float, b: float, m: int, q: int) -> ScalarField:
    """exp(-a |z|^2 - b |t|^2) with analytic gradient."""

    def ev(Z, T):
        return np.exp(-a * np.einsum("ni,ni->n", Z, Z) - b * np.einsum("ni,ni->n", T, T))

    def gr(Z, T):
        v = ev(Z, T)
        return np.concatenate([-2.0 * a * Z * v[:, None], -2.0 * b * T * v[:, None]], axis=1)

    return ScalarField(eval=ev, euclid_grad=gr, label=f"gauss(a={a},b={b})")


def monomial_field(z_pows: Sequence[int], t_pows: Sequence[int]) -> ScalarField:
    """prod_j z_j^{a_j} * prod_i t_i^{b_i} with analytic gradient."""
    za = np.asarray(z_pows, dtype=int)
    tb = np.asarray(t_pows, dtype=int)

    def ev(Z, T):
        return np.prod(Z**za, axis=1) * np.prod(T**tb, axis=1)

    def gr(Z, T):
        n = Z.shape[0]
        out = np.zeros((n, len(za) + len(tb)))
        base = ev(Z, T)
        for j, a in enumerate(za):
            if a:
                col = a * Z[:, j] ** (a - 1) * np.prod(np.delete(Z, j, axis=1) ** np.delete(za, j), axis=1)
                out[:, j] = col * np.prod(T**tb, axis=1)
        for i, b in enumerate(tb):
            if b:
                col = b * T[:, i] ** (b - 1) * np.prod(np.delete(T, i, axis=1) ** np.delete(tb, i), axis=1)
                out[:, len(za) + i] = col * np.prod(Z**za, axis=1)
        return out

    lbl = "*".join(
        [f"z{j + 1}^{a}" for j, a in enumerate(za) if a]
        + [f"t{i + 1}^{b}" for i, b in enumerate(tb) if b]
    )
    return ScalarField(eval=ev, euclid_grad=gr, label=lbl or "1")


def linear_combination_field(coeffs: Sequence[float], fields: Sequence[ScalarField]) -> ScalarField:
    cs = [float(c) for c in coeffs]

    def ev(Z, T):
        return sum(c * f.eval(Z, T) for c, f in zip(cs, fields))

    grads = [f.euclid_grad for f in fields]
    gr = None
    if all(g is not None for g in grads):

        def gr(Z, T):
            return sum(c * g(Z, T) for c, g in zip(cs, grads))

    scales = next((f.fd_scales for f in fields if f.fd_scales is not None), None)
    return ScalarField(eval=ev, euclid_grad=gr, label="+".join(f.label for f in fields), fd_scales=scales)


def scale_field(c: float, f: ScalarField) -> ScalarField:
    return linear_combination_field([c], [f])


def profile_field(params: OperatorParams, profile: RadialProfile, eps: float) -> ScalarField:
    """f(d_eps) as a scalar field with analytic gradient.

    The Euclidean partials of the regularized norm are
    d(d_eps)/dz_j = |z|^{4k-2} z_j / d_eps^{4k-1} and
    d(d_eps)/dt_i = 8 t_i / (k d_eps^{4k-1}).  eps = 0 gives f(d), whose
    gradient is singular at the origin only.
    """
    k = params.k
    e4k = float(eps) ** (4.0 * k) if eps > 0 else 0.0

    def _d_eps(Z, T):
        z2 = np.einsum("ni,ni->n", Z, Z)
        t2 = np.einsum("ni,ni->n", T, T)
        return (z2 ** (2.0 * k) + 16.0 * t2 + e4k) ** (0.25 / k)

    def ev(Z, T):
        return profile.f(_d_eps(Z, T))

    def gr(Z, T):
        de = _d_eps(Z, T)
        zn2 = np.einsum("ni,ni->n", Z, Z)
        fac = profile.df(de) / de ** (4.0 * k - 1.0)
        gz = (fac * zn2 ** (2.0 * k - 1.0))[:, None] * Z
        gt = (fac * 8.0 / k)[:, None] * T
        return np.concatenate([gz, gt], axis=1)

    return ScalarField(
        eval=ev,
        euclid_grad=gr,
        label=f"{profile.label or 'f'}(d_eps={eps})",
        fd_scales=aniso_scales(params),
    )
