"""Verification suites: every closed-form identity, constant and
inequality of the library confronted with an independent numerical
oracle, producing structured :class:`~hplap.report.VerificationReport`s.

Suites
------
lemma1
    The three gradient/Laplacian identities of the regularized norm
    against pure finite-difference evaluation of the fields.
fundamental_solution
    Off-singularity harmonicity of the fundamental solution, the total
    integral of the scaling density (Monte Carlo vs Gamma-function
    constant), and the mollifier sweep showing the scaling identity
    concentrates to a point mass.
moments
    Gauge ball/sphere moments: Monte Carlo vs closed forms, and the
    arithmetic consistency chain between the moment constants.
hardy
    Rayleigh quotients of a frozen 50-function corpus against the sharp
    constant ((Q + alpha - p)/p)^p over a (p, alpha) grid.
sharpness
    The dyadic extremizing sequence u_j = d^{(p-Q-alpha)/p - 1/j} psi_j(d):
    quotient monotonicity, proximity to the sharp constant, and the
    linear-in-j growth of the leading term with its moment coefficient.
lemma2
    The explicit witness (w, v, g, lambda) that produces the sharp Hardy
    inequality: pointwise -div_X(w |grad_X v|^{p-2} grad_X v)
    = lambda g v^{p-1}, the integral conclusion on the corpus, and a
    wide-annulus witness showing a 5%-inflated constant fails.
uncertainty
    The product-of-norms lower bound (uncertainty principle) with its
    Hoelder factorization diagnostics.

Determinism: every random stream is derived from the suite seed with a
distinct spawn key, so re-running a suite with the same configuration
reproduces its report bit-identically.

Sampling note: pointwise identity checks draw points with d log-uniform
in a range and direction bounded away from the center tube {z = 0}
(|z| >= 0.3 d by default).  Both sides of each identity vanish to high
order as z -> 0, so relative comparison there is ill-posed and
finite differences cannot resolve it; the identities are homogeneous, so
bounded-angle sampling already exercises their full content.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .algebra import (
    HTypeAlgebra,
    OperatorParams,
    gauge4k,
    norm_d,
    norm_d_eps,
    resolve_group,
)
from . import closedform as cf
from .fields import (
    DiffBackend,
    ScalarField,
    aniso_scales,
    divergence_of_values,
    fd_x_gradient,
    horizontal_gradient_batch,
    p_laplacian_batch,
    profile_field,
    weighted_p_laplacian_batch,
)
from .quadrature import (
    Sampler,
    ShellRegion,
    grid_integral_1d,
    mc_ball_integral,
    mc_region_multi,
)
from .report import VerificationReport

__all__ = [
    "SuiteConfig",
    "HardyTestFunction",
    "AngularModulation",
    "SharpnessSequenceSpec",
    "HardyRatioResult",
    "hardy_ratio",
    "build_hardy_corpus",
    "sharpness_test_function",
    "verify_lemma1",
    "verify_fundamental_solution",
    "verify_moments",
    "verify_hardy",
    "verify_sharpness",
    "verify_lemma2",
    "verify_uncertainty",
    "SUITES",
    "run_suite",
]

_ANALYTIC = DiffBackend(mode="analytic")


# ---------------------------------------------------------------------------
# configuration


@dataclass
class SuiteConfig:
    """Knobs shared by all suites; tolerances can be overridden per check
    id through the ``tolerances`` mapping."""

    group: str = "heisenberg:1"
    k: float = 1.0
    p: float = 2.0
    alpha: float = 0.0
    beta: float = 0.0
    n_points: int = 500
    n_samples: int = 1_000_000
    corpus_samples: int = 60_000
    seed: int = 20240
    j_max: int = 8
    eps_sweep: tuple = tuple(0.5**a for a in range(9))
    tolerances: dict = field(default_factory=dict)

    def algebra(self) -> HTypeAlgebra:
        return resolve_group(self.group)

    def params(self, alg: Optional[HTypeAlgebra] = None, **over) -> OperatorParams:
        alg = alg if alg is not None else self.algebra()
        kw = dict(k=self.k, p=self.p, alpha=self.alpha, beta=self.beta)
        kw.update(over)
        return OperatorParams.of(alg, **kw)

    def tol(self, key: str, default: float) -> float:
        return float(self.tolerances.get(key, default))

    def rng(self, *key: int) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(1000,) + key)
        return np.random.Generator(np.random.Philox(ss))

    def mc_nsigma(self) -> float:
        """Monte Carlo pass band: 3 sigma at desk dimensions, relaxed to
        5 sigma for m + q >= 7 where rejection sampling is leaner."""
        alg = self.algebra()
        return 5.0 if alg.m + alg.q >= 7 else 3.0

    def corpus_n(self) -> int:
        """Per-test-function sample count; quadrupled for m + q >= 7,
        where the concentrated |z|-power integrands need more samples
        before their variance estimates are trustworthy."""
        alg = self.algebra()
        return self.corpus_samples * (4 if alg.m + alg.q >= 7 else 1)

    def sweep_tol(self) -> float:
        return float(self.tolerances.get("sweep-final", 0.02 if self.mc_nsigma() > 3.0 else 0.01))

    def echo(self) -> dict:
        return {
            "k": float(self.k),
            "p": float(self.p),
            "alpha": float(self.alpha),
            "beta": float(self.beta),
            "n_points": int(self.n_points),
            "n_samples": int(self.n_samples),
            "corpus_samples": int(self.corpus_samples),
            "seed": int(self.seed),
            "j_max": int(self.j_max),
            "eps_sweep": ",".join(repr(e) for e in self.eps_sweep),
            "mc_nsigma": float(self.mc_nsigma()),
        }


def _new_report(suite: str, config: SuiteConfig) -> tuple[VerificationReport, float]:
    return VerificationReport(suite=suite, group=config.group, config=config.echo()), time.perf_counter()


def _finish(report: VerificationReport, t0: float) -> VerificationReport:
    report.wall_time_s = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------------------
# point sampling


def sample_gauge_points(
    alg: HTypeAlgebra,
    params: OperatorParams,
    n: int,
    rng: np.random.Generator,
    d_range=(0.1, 10.0),
    zfrac_min: float = 0.3,
):
    """n points with d log-uniform in d_range and |z| >= zfrac_min * d."""
    m, q, k = alg.m, alg.q, params.k
    Zs = np.empty((0, m))
    Ts = np.empty((0, q))
    while Zs.shape[0] < n:
        c = 4 * (n - Zs.shape[0]) + 64
        z = rng.standard_normal((c, m))
        t = rng.standard_normal((c, q)) * 0.25
        d0 = norm_d(params, (z, t))
        z = z / d0[:, None]
        t = t / (d0 ** (2.0 * k))[:, None]
        zn = np.sqrt(np.einsum("ni,ni->n", z, z))
        keep = zn >= zfrac_min
        Zs = np.concatenate([Zs, z[keep]])
        Ts = np.concatenate([Ts, t[keep]])
    Zs, Ts = Zs[:n], Ts[:n]
    d = np.exp(rng.uniform(math.log(d_range[0]), math.log(d_range[1]), size=n))
    return Zs * d[:, None], Ts * (d ** (2.0 * k))[:, None]


def _max_rel_err(observed: np.ndarray, reference: np.ndarray) -> float:
    ref = np.maximum(np.abs(reference), 1e-300)
    return float(np.max(np.abs(observed - reference) / ref))


# ---------------------------------------------------------------------------
# lemma1 suite


def _gauge_field(params: OperatorParams) -> ScalarField:
    def ev(Z, T):
        return gauge4k(params, Z, T)

    return ScalarField(eval=ev, euclid_grad=None, label="d^4k", fd_scales=aniso_scales(params))


def fd_grad_d_eps(alg, params, Z, T, eps: float, h: float = 6e-6) -> np.ndarray:
    """Finite-difference X-gradient of d_eps, differentiated through the
    polynomial gauge: X_j d_eps = d_eps^{1-4k}/(4k) * X_j(d^{4k}) exactly,
    since the eps term of d_eps^{4k} is constant.  Differencing d_eps
    itself is hopelessly ill-conditioned when eps >> d (the derivative of
    an O(1) function smaller by a factor (d/d_eps)^{4k})."""
    k = params.k
    Xv = fd_x_gradient(alg, params, _gauge_field(params), Z, T, h)
    de = norm_d_eps(params, (Z, T), eps)
    return (de ** (1.0 - 4.0 * k) / (4.0 * k))[:, None] * Xv


def verify_lemma1(config: SuiteConfig, eps_list=(1.0, 0.1, 0.01)) -> VerificationReport:
    """Gradient/Laplacian identities of d_eps vs the finite-difference
    oracle: squared gradient to 1e-6, gauge Laplacian to 1e-5, norm
    Laplacian to 1e-4 (max relative error over points and eps)."""
    report, t0 = _new_report("lemma1", config)
    alg = config.algebra()
    params = config.params(alg)
    Z, T = sample_gauge_points(alg, params, config.n_points, config.rng(1))
    scales = aniso_scales(params)

    err_grad = 0.0
    for eps in eps_list:
        G = fd_grad_d_eps(alg, params, Z, T, eps)
        fd = np.einsum("nj,nj->n", G, G)
        ref = cf.grad_d_eps_sq(params, (Z, T), eps)
        err_grad = max(err_grad, _max_rel_err(fd, ref))
    report.add_deterministic("grad-sq", err_grad, config.tol("grad-sq", 1e-6))

    # eps-independent Laplacian of the gauge: nested FD, inner step near
    # eps_machine^{1/4} because its output is differenced again
    gfield = _gauge_field(params)
    inner = lambda Zp, Tp: fd_x_gradient(alg, params, gfield, Zp, Tp, 1e-4)
    fd_lap4k = divergence_of_values(alg, params, inner, Z, T, 3e-4, scales)
    report.add_deterministic(
        "lap-gauge", _max_rel_err(fd_lap4k, cf.lap_d4k(params, (Z, T))), config.tol("lap-gauge", 1e-5)
    )

    err_lap = 0.0
    for eps in eps_list:
        inner_eps = lambda Zp, Tp, e=eps: fd_grad_d_eps(alg, params, Zp, Tp, e)
        fd_lap = divergence_of_values(alg, params, inner_eps, Z, T, 3e-4, scales)
        err_lap = max(err_lap, _max_rel_err(fd_lap, cf.lap_d_eps(params, (Z, T), eps)))
    report.add_deterministic("lap-norm", err_lap, config.tol("lap-norm", 1e-4))
    return _finish(report, t0)


# ---------------------------------------------------------------------------
# Hardy test functions


def _quintic(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, 1.0)
    return x**3 * (10.0 - 15.0 * x + 6.0 * x**2)


def _quintic_d(x: np.ndarray) -> np.ndarray:
    return np.where((x <= 0.0) | (x >= 1.0), 0.0, 30.0 * x**2 * (1.0 - x) ** 2)


def _shape(kind: str):
    """Bump shapes on [0, 1], vanishing with vanishing derivative at both
    endpoints; returns (F, dF)."""
    if kind == "window":

        def F(x):
            return _quintic(x / 0.35) * _quintic((1.0 - x) / 0.35)

        def dF(x):
            return (
                _quintic_d(x / 0.35) / 0.35 * _quintic((1.0 - x) / 0.35)
                - _quintic(x / 0.35) * _quintic_d((1.0 - x) / 0.35) / 0.35
            )

    elif kind == "sin2":

        def F(x):
            return np.sin(np.pi * x) ** 2

        def dF(x):
            return np.pi * np.sin(2.0 * np.pi * x)

    elif kind == "poly3":

        def F(x):
            return (4.0 * x * (1.0 - x)) ** 3

        def dF(x):
            return 3.0 * (4.0 * x * (1.0 - x)) ** 2 * 4.0 * (1.0 - 2.0 * x)

    elif kind == "asym":
        c = 729.0 / 16.0

        def F(x):
            return c * x**2 * (1.0 - x) ** 4

        def dF(x):
            return c * (2.0 * x * (1.0 - x) ** 4 - 4.0 * x**2 * (1.0 - x) ** 3)

    elif kind == "plateau":

        def F(x):
            return _quintic(x / 0.2) * _quintic((1.0 - x) / 0.4)

        def dF(x):
            return (
                _quintic_d(x / 0.2) / 0.2 * _quintic((1.0 - x) / 0.4)
                - _quintic(x / 0.2) * _quintic_d((1.0 - x) / 0.4) / 0.4
            )

    else:
        raise ValueError(f"unknown shape {kind!r}")
    return F, dF


@dataclass(frozen=True)
class AngularModulation:
    """Bounded smooth non-radial factor 1 + c * u where u is one of the
    degree-zero homogeneous coordinates z_1/d or 8 t_1/d^{2k}.

    Both are bounded by 1 resp. 2 with bounded derivatives on every
    annulus {d >= r0} (unlike z/|z|, whose derivatives blow up near the
    center tube, which meets every annulus).
    """

    kind: str  # "z1" or "t1"
    c: float

    def _d_and_grad(self, params, Z, T):
        k = params.k
        zn2 = np.einsum("ni,ni->n", Z, Z)
        d = norm_d(params, (Z, T))
        gz = (zn2 ** (2.0 * k - 1.0) / d ** (4.0 * k - 1.0))[:, None] * Z
        gt = (8.0 / (k * d ** (4.0 * k - 1.0)))[:, None] * T
        return d, gz, gt

    def value(self, params, Z, T):
        d = norm_d(params, (Z, T))
        if self.kind == "z1":
            return 1.0 + self.c * Z[:, 0] / d
        return 1.0 + self.c * 8.0 * T[:, 0] / d ** (2.0 * params.k)

    def grad(self, params, Z, T):
        n, m = Z.shape
        q = T.shape[1]
        d, gz, gt = self._d_and_grad(params, Z, T)
        out = np.zeros((n, m + q))
        if self.kind == "z1":
            out[:, :m] = -self.c * (Z[:, 0] / d**2)[:, None] * gz
            out[:, 0] += self.c / d
            out[:, m:] = -self.c * (Z[:, 0] / d**2)[:, None] * gt
        else:
            tk = 2.0 * params.k
            fac = -8.0 * self.c * tk * (T[:, 0] / d ** (tk + 1.0))
            out[:, :m] = fac[:, None] * gz
            out[:, m:] = fac[:, None] * gt
            out[:, m] += 8.0 * self.c / d**tk
        return out


@dataclass(frozen=True)
class HardyTestFunction:
    """A smooth test function Phi = profile(d) * modulation supported on an
    annulus r0 <= d <= r1 with r0 > 0 (compactly supported away from the
    identity, as the inequality requires)."""

    f: Callable[[np.ndarray], np.ndarray]
    df: Callable[[np.ndarray], np.ndarray]
    support: tuple
    modulation: Optional[AngularModulation] = None
    label: str = ""

    def __post_init__(self):
        r0, r1 = self.support
        if not (0.0 < r0 < r1):
            raise ValueError("test-function support must be an annulus [r0, r1] with r0 > 0")

    @property
    def radial(self) -> bool:
        return self.modulation is None

    def as_scalar_field(self, alg: HTypeAlgebra, params: OperatorParams) -> ScalarField:
        mod = self.modulation
        k = params.k

        def ev(Z, T):
            d = norm_d(params, (Z, T))
            out = self.f(d)
            if mod is not None:
                out = out * mod.value(params, Z, T)
            return out

        def gr(Z, T):
            zn2 = np.einsum("ni,ni->n", Z, Z)
            d = norm_d(params, (Z, T))
            safe = np.maximum(d, 1e-300)
            gz = (zn2 ** (2.0 * k - 1.0) / safe ** (4.0 * k - 1.0))[:, None] * Z
            gt = (8.0 / (k * safe ** (4.0 * k - 1.0)))[:, None] * T
            grad_d = np.concatenate([gz, gt], axis=1)
            out = self.df(d)[:, None] * grad_d
            if mod is not None:
                out = out * mod.value(params, Z, T)[:, None]
                out = out + (self.f(d))[:, None] * mod.grad(params, Z, T)
            return out

        return ScalarField(eval=ev, euclid_grad=gr, label=self.label, fd_scales=aniso_scales(params))


def annulus_bump(r0: float, r1: float, kind: str = "window", modulation=None, label: str = "") -> HardyTestFunction:
    F, dF = _shape(kind)
    w = r1 - r0

    def f(r):
        xi = (r - r0) / w
        return np.where((xi > 0.0) & (xi < 1.0), F(np.clip(xi, 0.0, 1.0)), 0.0)

    def df(r):
        xi = (r - r0) / w
        return np.where((xi > 0.0) & (xi < 1.0), dF(np.clip(xi, 0.0, 1.0)) / w, 0.0)

    return HardyTestFunction(
        f=f, df=df, support=(r0, r1), modulation=modulation, label=label or f"{kind}[{r0},{r1}]"
    )


def build_hardy_corpus(count: int = 50) -> list:
    """The frozen test-function corpus: 5 annuli x 5 profile shapes x
    {radial, modulated}, modulation kind alternating between the two
    homogeneous coordinates."""
    annuli = [(0.5, 2.0), (0.25, 1.0), (1.0, 4.0), (0.5, 4.0), (2.0, 8.0)]
    kinds = ["window", "sin2", "poly3", "asym", "plateau"]
    corpus = []
    i = 0
    for r0, r1 in annuli:
        for kind in kinds:
            for modded in (False, True):
                mod = None
                if modded:
                    mod = AngularModulation("z1", 0.5) if i % 2 == 0 else AngularModulation("t1", 0.4)
                corpus.append(
                    annulus_bump(
                        r0,
                        r1,
                        kind,
                        modulation=mod,
                        label=f"{kind}[{r0},{r1}]" + (f"*{mod.kind}" if mod else ""),
                    )
                )
                i += 1
    return corpus[:count]


# ---------------------------------------------------------------------------
# Rayleigh quotients


@dataclass(frozen=True)
class HardyRatioResult:
    lhs: float
    rhs: float
    ratio: float
    stderr: float
    lhs_stderr: float
    rhs_stderr: float
    n_samples: int
    lhs_1d: float = math.nan
    rhs_1d: float = math.nan
    radial_consistent: bool = True


def _support_shells(r0: float, r1: float) -> list:
    """Dyadic split of [r0, r1] (last shell partial)."""
    shells = []
    a = r0
    while a < r1:
        b = min(2.0 * a, r1)
        shells.append((a, b))
        a = b
    return shells


def _radial_1d_integrals(params: OperatorParams, phi: HardyTestFunction):
    """Polar reduction for radial Phi: both sides factor through the
    sphere moment of |z|^{(2k-1)p}:

        lhs = S * int r^{Q-1+alpha} |phi'(r)|^p dr
        rhs = S * int r^{Q-1+alpha-p} |phi(r)|^p dr.
    """
    p, Q, a = params.p, params.Q, params.alpha
    S = cf.sphere_moment(params, (2.0 * params.k - 1.0) * p)
    lhs = rhs = 0.0
    for lo, hi in _support_shells(*phi.support):
        lhs += grid_integral_1d(lambda r: r ** (Q - 1.0 + a) * np.abs(phi.df(r)) ** p, lo, hi, 4096)
        rhs += grid_integral_1d(lambda r: r ** (Q - 1.0 + a - p) * np.abs(phi.f(r)) ** p, lo, hi, 4096)
    return S * lhs, S * rhs


def hardy_ratio(
    alg: HTypeAlgebra,
    params: OperatorParams,
    phi: HardyTestFunction,
    n: int,
    seed: int,
    spawn_key: tuple = (),
) -> HardyRatioResult:
    """Monte Carlo Rayleigh quotient

        ratio = int d^alpha |grad_X Phi|^p  /  int d^{alpha-p} |grad_X d|^p |Phi|^p

    by shell sampling restricted to the support, with a delta-method
    standard error using the shared-sample covariance.  For radial Phi the
    1-D polar reduction is evaluated too and must agree with the Monte
    Carlo values within 3 standard errors (built-in self-check).
    """
    p, a, k = params.p, params.alpha, params.k
    if not p < params.Q + a:
        raise ValueError(f"Rayleigh quotient requires p < Q + alpha = {params.Q + a}, got p={p}")
    fld = phi.as_scalar_field(alg, params)

    def multi(Z, T):
        d = norm_d(params, (Z, T))
        zn = np.sqrt(np.einsum("ni,ni->n", Z, Z))
        G = horizontal_gradient_batch(alg, params, _ANALYTIC, fld, Z, T)
        gn = np.sqrt(np.einsum("nj,nj->n", G, G))
        val = fld.eval(Z, T)
        gd = np.where(d > 0.0, (zn / np.maximum(d, 1e-300)) ** (2.0 * k - 1.0), 0.0)
        lhs = d**a * gn**p
        rhs = d ** (a - p) * gd**p * np.abs(val) ** p
        return np.stack([lhs, rhs])

    shells = _support_shells(*phi.support)
    n_per = max(2048, int(np.ceil(n / len(shells))))
    L = R = varL = varR = covLR = 0.0
    n_tot = 0
    for si, (lo, hi) in enumerate(shells):
        sampler = Sampler(alg, params, ShellRegion(lo, hi), seed, spawn_key=spawn_key + (si,))
        vals, cov, n_used, _ = mc_region_multi(sampler, multi, 2, n_per)
        L += vals[0]
        R += vals[1]
        varL += cov[0, 0]
        varR += cov[1, 1]
        covLR += cov[0, 1]
        n_tot += n_used
    ratio = L / R
    var_ratio = varL / R**2 + L**2 * varR / R**4 - 2.0 * L * covLR / R**3
    stderr = math.sqrt(max(var_ratio, 0.0))
    res = dict(
        lhs=float(L),
        rhs=float(R),
        ratio=float(ratio),
        stderr=float(stderr),
        lhs_stderr=float(math.sqrt(max(varL, 0.0))),
        rhs_stderr=float(math.sqrt(max(varR, 0.0))),
        n_samples=n_tot,
    )
    if phi.radial:
        lhs1, rhs1 = _radial_1d_integrals(params, phi)
        # 5 sigma: this self-check runs hundreds of times per suite, so a
        # 3 sigma band would trip on sampling noise alone (family-wise),
        # while genuine factor errors sit at z >> 100
        ok = (
            abs(L - lhs1) <= 5.0 * res["lhs_stderr"] + 1e-9 * abs(lhs1)
            and abs(R - rhs1) <= 5.0 * res["rhs_stderr"] + 1e-9 * abs(rhs1)
        )
        res.update(lhs_1d=float(lhs1), rhs_1d=float(rhs1), radial_consistent=bool(ok))
    return HardyRatioResult(**res)


def sharp_hardy_constant(params: OperatorParams) -> float:
    return ((params.Q + params.alpha - params.p) / params.p) ** params.p


# ---------------------------------------------------------------------------
# fundamental-solution suite


def verify_fundamental_solution(config: SuiteConfig) -> VerificationReport:
    """(a) off-singularity harmonicity of the fundamental solution;
    (b) total integral of the scaling density vs its closed form;
    (c) mollifier sweep of the scaled pairing, with common random numbers
    across the sweep so the limit is isolated from sampling noise."""
    report, t0 = _new_report("fundamental_solution", config)
    alg = config.algebra()
    params = config.params(alg)
    p, k, Q = params.p, params.k, params.Q

    # (a) harmonicity, 200 points with d in [0.5, 5]
    spec = cf.fundamental_solution(params)
    gamma_field = spec.as_field(params)
    n_h = min(200, config.n_points)
    Z, T = sample_gauge_points(alg, params, n_h, config.rng(2), d_range=(0.5, 5.0), zfrac_min=0.2)
    resid = np.abs(p_laplacian_batch(alg, params, _ANALYTIC, gamma_field, Z, T))
    G = horizontal_gradient_batch(alg, params, _ANALYTIC, gamma_field, Z, T)
    gn = np.sqrt(np.einsum("nj,nj->n", G, G))
    d = norm_d(params, (Z, T))
    scale = gn ** (p - 1.0) / d
    report.add_deterministic(
        "harmonicity", float(np.max(resid / scale)), config.tol("harmonicity", 1e-4)
    )

    if abs(p - Q) < 1e-12:
        # the scaling density and its sweep are defined for p != Q only
        return _finish(report, t0)

    # (b) + (c): one pass over dyadic shells with shared samples
    eps_list = tuple(config.eps_sweep)
    pref = cf.psi_prefactor(params)
    target = (pref / (4.0 * k * p - 4.0 * k + Q - p)) * cf.sigma_p(params)

    def multi(Zs, Ts):
        psi_v = cf.psi(params, (Zs, Ts))
        zn2 = np.einsum("ni,ni->n", Zs, Zs)
        tn2 = np.einsum("ni,ni->n", Ts, Ts)
        cols = [psi_v]
        for e in eps_list:
            cols.append(psi_v * np.exp(-(e**2) * zn2 - e ** (4.0 * k) * tn2))
        return np.stack(cols)

    nf = 1 + len(eps_list)
    r_min, r_max = 2.0**-12, 2.0**12
    n_per = config.n_samples
    vals = np.zeros(nf)
    var0 = 0.0
    # innermost ball
    from .quadrature import BallRegion

    sampler = Sampler(alg, params, BallRegion(r_min), config.seed, spawn_key=(2, 0))
    v, c, _, _ = mc_region_multi(sampler, multi, nf, n_per)
    vals += v
    var0 += c[0, 0]
    shells = [(2.0**a, 2.0 ** (a + 1)) for a in range(-12, 12)]
    last = 0.0
    for si, (lo, hi) in enumerate(shells):
        sampler = Sampler(alg, params, ShellRegion(lo, hi), config.seed, spawn_key=(2, si + 1))
        v, c, _, _ = mc_region_multi(sampler, multi, nf, n_per)
        vals += v
        var0 += c[0, 0]
        last = v[0]
    if abs(last) > 0.01 * abs(vals[0]):
        raise RuntimeError("scaling-density integral: non-decaying tail at the outermost shell")
    est0 = vals[0]
    report.add_stochastic("density-total", est0, target, math.sqrt(max(var0, 0.0)), nsigma=config.mc_nsigma())

    # (c) observed pairing error |int psi * phi(delta_eps .) - phi(0) int psi|
    # on the same samples; per-sample monotone for this bump, so the
    # sequence must decrease up to float jitter
    errs = np.abs(vals[1:] - est0)
    mono_slack = float(np.max(errs[1:] - errs[:-1])) if len(errs) > 1 else -1.0
    report.add_bound("sweep-monotone", mono_slack, 1e-9 * abs(est0), "below")
    report.add_deterministic("sweep-final", float(errs[-1] / abs(est0)), config.sweep_tol())
    return _finish(report, t0)


# ---------------------------------------------------------------------------
# moments suite


def verify_moments(config: SuiteConfig) -> VerificationReport:
    """Monte Carlo gauge-ball moments vs Gamma closed forms (3 sigma) and
    the arithmetic consistency chain between the constants (1e-12)."""
    report, t0 = _new_report("moments", config)
    alg = config.algebra()
    params = config.params(alg)
    k, p, beta, Q = params.k, params.p, params.beta, params.Q
    gammas = []
    for g in (0.0, 1.0, (2.0 * k - 1.0) * p, (2.0 * k - 1.0) * (p + beta)):
        if g not in gammas:
            gammas.append(g)
    for gi, gamma in enumerate(gammas):

        def f(Z, T, g=gamma):
            zn2 = np.einsum("ni,ni->n", Z, Z)
            return zn2 ** (g / 2.0)

        est = mc_ball_integral(alg, params, f, 1.0, config.n_samples, config.seed)
        report.add_stochastic(
            f"ball-moment-{gamma:g}", est.value, cf.ball_moment(params, gamma), est.stderr,
            nsigma=config.mc_nsigma(),
        )
    gam_p = (2.0 * k - 1.0) * p
    sp = cf.sigma_p(params)
    report.add_deterministic(
        "sigma-vs-sphere", abs(sp - cf.sphere_moment(params, gam_p)) / sp, 1e-12
    )
    spb = cf.sigma_p_beta(params)
    report.add_deterministic(
        "sigma-beta-vs-sphere",
        abs(spb - cf.sphere_moment(params, (2.0 * k - 1.0) * (p + beta))) / spb,
        1e-12,
    )
    return _finish(report, t0)


# ---------------------------------------------------------------------------
# Hardy suite


def verify_hardy(config: SuiteConfig, p_list=(1.5, 2.0, 3.0), alpha_list=(-1.0, 0.0, 1.0)) -> VerificationReport:
    """Every corpus Rayleigh quotient must sit above the sharp constant
    minus 3 standard errors, for each admissible (p, alpha); radial
    quotients must also agree with their 1-D polar reduction."""
    report, t0 = _new_report("hardy", config)
    alg = config.algebra()
    corpus = build_hardy_corpus()
    ns = config.mc_nsigma()
    radial_flags = []
    radial_devs = []
    combo = 0
    for p in p_list:
        for a in alpha_list:
            params = config.params(alg, p=p, alpha=a)
            if not p < params.Q + a:
                continue
            sharp = sharp_hardy_constant(params)
            worst = math.inf
            worst_ratio = math.nan
            worst_se = 0.0
            for fi, phi in enumerate(corpus):
                res = hardy_ratio(
                    alg, params, phi, config.corpus_n(), config.seed, spawn_key=(4, combo, fi)
                )
                margin = res.ratio - (sharp - ns * res.stderr)
                if margin < worst:
                    worst, worst_ratio, worst_se = margin, res.ratio, res.stderr
                if phi.radial:
                    radial_flags.append(res.radial_consistent)
                    radial_devs.append(
                        max(
                            abs(res.lhs - res.lhs_1d) / max(res.lhs_stderr, 1e-300),
                            abs(res.rhs - res.rhs_1d) / max(res.rhs_stderr, 1e-300),
                        )
                    )
            report.add_bound(
                f"hardy-p{p:g}-a{a:g}", worst_ratio, sharp, "above", stderr=worst_se, nsigma=ns
            )
            combo += 1
    # self-check of the 1-D polar reduction, aggregated robustly: a wrong
    # moment factor or weight power shifts every radial quotient by the
    # same systematic amount (the median z explodes and every flag
    # fails), whereas the angularly concentrated |z|-power integrands
    # occasionally defeat the small-sample variance estimate on a single
    # function; honest sampling noise keeps the median z near 1
    report.add_deterministic(
        "radial-reduction-median-z", float(np.median(radial_devs)), config.tol("radial-reduction-median-z", 3.0)
    )
    report.add_bound(
        "radial-reduction-consistent-fraction", float(np.mean(radial_flags)), 0.9, "above"
    )
    return _finish(report, t0)


# ---------------------------------------------------------------------------
# sharpness suite


@dataclass(frozen=True)
class SharpnessSequenceSpec:
    """The dyadic extremizing sequence: u_j = d^{exponent} psi_j(d) with
    psi_j = 1 on [2^-j, 1], supported on [2^{-j-1}, 2], C^2 quintic
    transitions, |psi_j'| <= C 2^j on the inner band."""

    j: int
    cutoff_order: int = 2
    exponent: float = 0.0

    @classmethod
    def for_params(cls, params: OperatorParams, j: int) -> "SharpnessSequenceSpec":
        if j < 1:
            raise ValueError("sequence index j must be >= 1")
        expo = (params.p - params.Q - params.alpha) / params.p - 1.0 / j
        return cls(j=j, cutoff_order=2, exponent=expo)


def sharpness_test_function(params: OperatorParams, j: int) -> HardyTestFunction:
    spec = SharpnessSequenceSpec.for_params(params, j)
    a = -spec.exponent
    r_in0, r_in1 = 2.0 ** (-j - 1), 2.0**-j
    r_out0, r_out1 = 1.0, 2.0
    w_in = r_in1 - r_in0

    def psi(r):
        out = np.ones_like(r)
        out = np.where(r < r_in1, _quintic((r - r_in0) / w_in), out)
        out = np.where(r > r_out0, _quintic(r_out1 - r), out)
        return np.where((r <= r_in0) | (r >= r_out1), 0.0, out)

    def dpsi(r):
        out = np.zeros_like(r)
        out = np.where(r < r_in1, _quintic_d((r - r_in0) / w_in) / w_in, out)
        out = np.where(r > r_out0, -_quintic_d(r_out1 - r), out)
        return np.where((r <= r_in0) | (r >= r_out1), 0.0, out)

    def f(r):
        with np.errstate(divide="ignore"):
            return np.where(r > 0.0, r ** (-a), 0.0) * psi(r)

    def df(r):
        with np.errstate(divide="ignore"):
            rp = np.where(r > 0.0, r ** (-a), 0.0)
            rpm = np.where(r > 0.0, r ** (-a - 1.0), 0.0)
        return -a * rpm * psi(r) + rp * dpsi(r)

    return HardyTestFunction(f=f, df=df, support=(r_in0, r_out1), label=f"u_{j}")


def verify_sharpness(config: SuiteConfig) -> VerificationReport:
    """Rayleigh quotients of the extremizing sequence u_j, j = 1..j_max:

    * every quotient sits above the sharp constant (3 sigma slack),
    * the sequence is nonincreasing within statistical error,
    * ratio(j_max) <= 1.10 x sharp constant,
    * the leading term of the numerator grows linearly in j with slope
      (2^p - 1)/p x sphere_moment((2k-1)p); the fit is compared against
      this coefficient and against the alternative exponent (2k+1)p, and
      must match the former.
    """
    report, t0 = _new_report("sharpness", config)
    alg = config.algebra()
    params = config.params(alg)
    p, k = params.p, params.k
    sharp = sharp_hardy_constant(params)
    ns = config.mc_nsigma()
    a0 = (params.Q + params.alpha - p) / p
    ratios, stderrs, lhs1d = [], [], []
    worst_above = math.inf
    worst_ratio, worst_se = math.nan, 0.0
    for j in range(1, config.j_max + 1):
        phi = sharpness_test_function(params, j)
        res = hardy_ratio(alg, params, phi, config.corpus_n(), config.seed, spawn_key=(5, j))
        ratios.append(res.ratio)
        stderrs.append(res.stderr)
        lhs1d.append(res.lhs_1d)
        margin = res.ratio - (sharp - ns * res.stderr)
        if margin < worst_above:
            worst_above, worst_ratio, worst_se = margin, res.ratio, res.stderr
    report.add_bound("ratios-above-sharp", worst_ratio, sharp, "above", stderr=worst_se, nsigma=ns)

    # monotone nonincreasing within combined sigma
    mono_viol = -math.inf
    for i in range(1, len(ratios)):
        pair_se = math.sqrt(stderrs[i] ** 2 + stderrs[i - 1] ** 2)
        mono_viol = max(mono_viol, ratios[i] - ratios[i - 1] - ns * pair_se)
    report.add_bound("ratios-nonincreasing", mono_viol, 0.0, "below")

    report.add_bound(
        "final-ratio", ratios[-1], 1.10 * sharp, "below", stderr=stderrs[-1], nsigma=ns
    )

    # slope of the dominant term: regress the deterministic 1-D numerator
    # on x_j = (a0 + 1/j)^p * j
    js = np.arange(1, config.j_max + 1, dtype=float)
    xs = (a0 + 1.0 / js) ** p * js
    ys = np.asarray(lhs1d)
    tail = js >= max(config.j_max - 4, 2)
    slope = float(np.polyfit(xs[tail], ys[tail], 1)[0])
    c0_main = (2.0**p - 1.0) / p * cf.sphere_moment(params, (2.0 * k - 1.0) * p)
    c0_alt = (2.0**p - 1.0) / p * cf.sphere_moment(params, (2.0 * k + 1.0) * p)
    rel_main = abs(slope - c0_main) / c0_main
    rel_alt = abs(slope - c0_alt) / c0_alt
    report.add_deterministic("growth-slope-vs-moment", rel_main, config.tol("growth-slope-vs-moment", 0.1))
    report.add_bound("growth-slope-discriminates", rel_alt - rel_main, 0.0, "above")
    return _finish(report, t0)


# ---------------------------------------------------------------------------
# lemma2 suite


def _log_space_ratio(params: OperatorParams, y0: float, y1: float) -> float:
    """Rayleigh quotient of the near-optimal wide-annulus witness
    u = r^{-(Q+alpha-p)/p} sin^2(pi (log r - y0)/(y1 - y0)): in
    y = log r coordinates the quotient is exactly
    int |phi' - a0 phi|^p dy / int |phi|^p dy."""
    p = params.p
    a0 = (params.Q + params.alpha - p) / p
    L = y1 - y0

    def num(y):
        s = np.sin(np.pi * (y - y0) / L)
        c = np.cos(np.pi * (y - y0) / L)
        dphi = 2.0 * s * c * np.pi / L
        return np.abs(dphi - a0 * s**2) ** p

    def den(y):
        return np.abs(np.sin(np.pi * (y - y0) / L)) ** (2.0 * p)

    return grid_integral_1d(num, y0, y1, 8192) / grid_integral_1d(den, y0, y1, 8192)


def verify_lemma2(config: SuiteConfig) -> VerificationReport:
    """The witness behind the sharp Hardy inequality, with w = d^alpha,
    v = d^{(p-Q-alpha)/p}, g = d^alpha |z|^{(2k-1)p}/d^{2kp} and
    lambda = ((Q+alpha-p)/p)^p:

    (i) pointwise -div_X(w |grad_X v|^{p-2} grad_X v) = lambda g v^{p-1}
        away from the origin, to 1e-4 relative against nested FD;
    (ii) the integral conclusion on corpus functions (quotients >= lambda);
    (iii) a 1.05-inflated lambda is violated by a wide-annulus witness
        (the dyadic sequence needs j in the hundreds to get that close,
        so the demonstration uses the near-optimal log-sinusoidal bump).
    """
    report, t0 = _new_report("lemma2", config)
    alg = config.algebra()
    params = config.params(alg, beta=0.0)
    p, k, Q, a = params.p, params.k, params.Q, params.alpha
    lam = sharp_hardy_constant(params)
    mu = (p - Q - a) / p

    # (i) pointwise witness identity
    n_pts = min(200, config.n_points)
    Z, T = sample_gauge_points(alg, params, n_pts, config.rng(6), d_range=(0.1, 10.0), zfrac_min=0.2)
    v_field = profile_field(params, cf.power_profile(mu), eps=0.0)
    Lv = weighted_p_laplacian_batch(alg, params, _ANALYTIC, v_field, Z, T)
    d = norm_d(params, (Z, T))
    zn = np.sqrt(np.einsum("ni,ni->n", Z, Z))
    rhs = lam * d**a * zn ** ((2.0 * k - 1.0) * p) / d ** (2.0 * k * p) * d ** (mu * (p - 1.0))
    report.add_deterministic("witness-pointwise", _max_rel_err(-Lv, rhs), config.tol("witness-pointwise", 1e-4))

    # (ii) conclusion on a corpus slice
    ns = config.mc_nsigma()
    worst = math.inf
    worst_ratio, worst_se = math.nan, 0.0
    for fi, phi in enumerate(build_hardy_corpus()[:10]):
        res = hardy_ratio(alg, params, phi, config.corpus_n(), config.seed, spawn_key=(6, fi))
        margin = res.ratio - (lam - ns * res.stderr)
        if margin < worst:
            worst, worst_ratio, worst_se = margin, res.ratio, res.stderr
    report.add_bound("conclusion-on-corpus", worst_ratio, lam, "above", stderr=worst_se, nsigma=ns)

    # (iii) inflated constant fails
    witness_ratio = _log_space_ratio(params, -61.0 * math.log(2.0), math.log(2.0))
    report.add_bound("inflated-lambda-violated", witness_ratio, 1.05 * lam, "below")
    return _finish(report, t0)


# ---------------------------------------------------------------------------
# uncertainty suite


def verify_uncertainty(config: SuiteConfig) -> VerificationReport:
    """Product-of-norms bound: with 1/s + 1/t = 1 and 1 < s < Q,

        (int |z|^t |u|^t)^{1/t} (int |grad_X u|^s)^{1/s}
            >= (Q - s)/s * int (|z|^{2k}/d^{2k}) |u|^2.

    Checked on corpus functions with s = config.p, recording the Hoelder
    factorization (middle quantity B = int (|z|/d)^{(2k-1)s} d^{-s} |u|^s)
    for diagnosis: RHS <= I1^{1/t} B^{1/s} and B^{1/s} <= s/(Q-s) I2^{1/s}.
    """
    report, t0 = _new_report("uncertainty", config)
    alg = config.algebra()
    params = config.params(alg, alpha=0.0, beta=0.0)
    s, k, Q = params.p, params.k, params.Q
    if not 1.0 < s < Q:
        raise ValueError(f"uncertainty suite requires 1 < s < Q = {Q}, got s={s}")
    t_exp = s / (s - 1.0)
    corpus = build_hardy_corpus()[::3][:16]
    worst_main = math.inf
    obs_main = (math.nan, 0.0, 0.0)
    worst_holder = math.inf
    worst_hardy_b = math.inf
    for fi, phi in enumerate(corpus):
        fld = phi.as_scalar_field(alg, params)

        def multi(Z, T):
            d = norm_d(params, (Z, T))
            zn = np.sqrt(np.einsum("ni,ni->n", Z, Z))
            u = fld.eval(Z, T)
            G = horizontal_gradient_batch(alg, params, _ANALYTIC, fld, Z, T)
            gn = np.sqrt(np.einsum("nj,nj->n", G, G))
            gd = np.where(d > 0.0, (zn / np.maximum(d, 1e-300)) ** (2.0 * k - 1.0), 0.0)
            i1 = zn**t_exp * np.abs(u) ** t_exp
            i2 = gn**s
            i3 = (zn / np.maximum(d, 1e-300)) ** (2.0 * k) * u**2
            bmid = gd**s * d ** (-s) * np.abs(u) ** s
            return np.stack([i1, i2, i3, bmid])

        shells = _support_shells(*phi.support)
        n_per = max(2048, int(np.ceil(config.corpus_n() / len(shells))))
        sums = np.zeros(4)
        variances = np.zeros(4)
        for si, (lo, hi) in enumerate(shells):
            sampler = Sampler(alg, params, ShellRegion(lo, hi), config.seed, spawn_key=(7, fi, si))
            vals, cov, _, _ = mc_region_multi(sampler, multi, 4, n_per)
            sums += vals
            variances += np.diag(cov)
        i1, i2, i3, bmid = sums
        se = np.sqrt(np.maximum(variances, 0.0))
        lhs = i1 ** (1.0 / t_exp) * i2 ** (1.0 / s)
        rhs = (Q - s) / s * i3
        se_lhs = lhs * math.sqrt((se[0] / (t_exp * i1)) ** 2 + (se[1] / (s * i2)) ** 2)
        se_rhs = (Q - s) / s * se[2]
        se_tot = math.sqrt(se_lhs**2 + se_rhs**2)
        margin = lhs - (rhs - config.mc_nsigma() * se_tot)
        if margin < worst_main:
            worst_main = margin
            obs_main = (lhs, rhs, se_tot)
        # Hoelder: i3 <= i1^{1/t} bmid^{1/s};  Hardy: bmid^{1/s} <= s/(Q-s) i2^{1/s}
        worst_holder = min(worst_holder, i1 ** (1.0 / t_exp) * bmid ** (1.0 / s) - i3 + 3.0 * se[2])
        worst_hardy_b = min(
            worst_hardy_b, (s / (Q - s)) * i2 ** (1.0 / s) - bmid ** (1.0 / s) + 3.0 * se[3] / (s * max(bmid, 1e-300) ** (1 - 1 / s))
        )
    lhs_w, rhs_w, se_w = obs_main
    report.add_bound("uncertainty-main", lhs_w, rhs_w, "above", stderr=se_w, nsigma=config.mc_nsigma())
    report.add_bound("holder-step", worst_holder, 0.0, "above")
    report.add_bound("hardy-step", worst_hardy_b, 0.0, "above")
    return _finish(report, t0)


# ---------------------------------------------------------------------------
# registry

SUITES = {
    "lemma1": verify_lemma1,
    "fundamental_solution": verify_fundamental_solution,
    "moments": verify_moments,
    "hardy": verify_hardy,
    "sharpness": verify_sharpness,
    "lemma2": verify_lemma2,
    "uncertainty": verify_uncertainty,
}


def run_suite(name: str, config: SuiteConfig) -> VerificationReport:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; available: {', '.join(sorted(SUITES))}")
    return SUITES[name](config)
