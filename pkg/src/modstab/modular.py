"""Modulars on a finite-dimensional coefficient space.

A modular rho generalizes a norm: rho(x) = 0 iff x = 0, rho is invariant
under unimodular scalars, and rho(a*x + b*y) <= rho(x) + rho(y) whenever
a, b >= 0 and a + b = 1 (convex modulars sharpen the right side to
a*rho(x) + b*rho(y)).  Three families are built in:

    norm         rho(x) = ||x||_2
    power(p>=1)  rho(x) = sum_i |x_i|^p
    orlicz(phi)  rho(x) = sum_i phi(|x_i|), phi a named scalar preset

The Luxemburg norm of a convex modular, inf{lam > 0 : rho(x/lam) <= 1},
is computed by bracketing bisection; the monotonicity of lam -> rho(x/lam)
makes the predicate exact to bisect.

Everything here is sampled verification: the checkers quantify over
caller-supplied finite sample sets and report worst margins, never over
the full space.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    BracketDivergenceError,
    ConfigError,
    InvalidModularError,
    PreconditionError,
    UnsupportedModularError,
)

PHI_PRESETS = {
    "square": _kernels.PHI_SQUARE,
    "exp_minus_one": _kernels.PHI_EXP_MINUS_ONE,
    "linear": _kernels.PHI_LINEAR,
    # dead_zone is deliberately *not* a modular: phi(t) = max(t-1, 0)
    # vanishes on a neighbourhood of 0, so rho(x) = 0 for small x != 0.
    # It exists as the broken fixture the axiom checker must catch.
    "dead_zone": _kernels.PHI_DEAD_ZONE,
}

_MODULAR_KINDS = ("norm", "power", "orlicz")


@dataclass(frozen=True)
class ModularSpec:
    """A named modular plus its claimed doubling constant kappa.

    kappa is the claimed constant in rho(2x) <= kappa*rho(x) and must lie
    in (0, 2]; check_delta2 measures the actual constant against it.  A
    built-in whose true doubling constant exceeds 2 (power p > 1, orlicz
    "square") simply fails check_delta2 and is thereby excluded from
    iteration scenarios while remaining usable in unit fixtures.
    """

    kind: str
    p: float = 2.0
    phi: str = "square"
    convex: bool = True
    kappa: float = 2.0

    def __post_init__(self):
        if self.kind not in _MODULAR_KINDS:
            raise ConfigError(f"unknown modular kind {self.kind!r}")
        if self.kind == "power" and self.p < 1.0:
            raise ConfigError("power modular requires p >= 1")
        if self.kind in ("norm", "power") and not self.convex:
            raise ConfigError(f"{self.kind} modular is convex; convex=False is inconsistent")
        if self.kind == "orlicz" and self.phi not in PHI_PRESETS:
            raise ConfigError(f"unknown orlicz preset {self.phi!r}; options: {sorted(PHI_PRESETS)}")
        if not (0.0 < self.kappa <= 2.0):
            raise ConfigError("kappa must lie in (0, 2]")


def _as_rows(x):
    """Coerce a vector or a stack of vectors to (n, dim) complex128."""
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim == 1:
        return a.reshape(1, -1), True
    if a.ndim == 2:
        return a, False
    raise ConfigError(f"expected a vector or a batch of vectors, got ndim={a.ndim}")


def eval_modular(m, x, dim=None):
    """rho(x); accepts a single vector or an (n, dim) batch.

    Returns 0 exactly iff x = 0 for the honest kinds.  Orlicz presets with
    unbounded phi may overflow to +inf; downstream sweeps treat that as an
    abort condition.
    """
    rows, squeeze = _as_rows(x)
    if dim is not None and rows.shape[1] != dim:
        raise ConfigError(f"dimension mismatch: expected {dim}, got {rows.shape[1]}")
    if m.kind == "norm":
        out = _kernels.rho_norm(rows)
    elif m.kind == "power":
        out = _kernels.rho_power(rows, m.p)
    else:
        out = _kernels.rho_orlicz(rows, PHI_PRESETS[m.phi])
        if np.any(out < 0):
            raise InvalidModularError("orlicz phi produced a negative value")
    return float(out[0]) if squeeze else out


def coeff_norm_fn(m):
    """Row-wise Luxemburg norm of ``m`` as a fast batch callable.

    norm and power kinds have closed forms (the l2 / lp norms, which the
    bisection oracle reproduces); orlicz kinds fall back to per-row
    bisection.
    """
    if m.kind == "norm":
        return lambda rows: _kernels.rho_norm(np.asarray(rows, dtype=np.complex128).reshape(len(rows), -1))
    if m.kind == "power":
        p = m.p

        def _lp(rows):
            rows = np.asarray(rows, dtype=np.complex128)
            return _kernels.rho_power(rows, p) ** (1.0 / p)

        return _lp

    def _bisected(rows):
        rows = np.asarray(rows, dtype=np.complex128)
        return np.array([luxemburg_norm(m, r) for r in rows])

    return _bisected


def luxemburg_norm(m, x, tol=1e-12):
    """inf{lam > 0 : rho(x/lam) <= 1} by bracketing bisection.

    Requires a convex modular.  The bracket search doubles/halves lam from
    1 and gives up past 2**64, which only happens for pathological inputs.
    """
    if not m.convex:
        raise UnsupportedModularError("Luxemburg norm requires a convex modular")
    if tol <= 0:
        raise ConfigError("tol must be positive")
    vec = np.asarray(x, dtype=np.complex128).reshape(1, -1)
    if not np.any(vec):
        return 0.0

    def under(lam):
        return float(eval_modular(m, vec / lam)[0]) <= 1.0

    cap = 2.0**64
    hi = 1.0
    while not under(hi):
        hi *= 2.0
        if hi > cap:
            raise BracketDivergenceError("no upper bracket for the Luxemburg norm below 2**64")
    lo = hi / 2.0
    while under(lo):
        hi = lo
        lo /= 2.0
        if lo < 1.0 / cap:
            # rho(x/lam) <= 1 persists down to tiny lam: infimum is 0
            return 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if under(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# sampled checkers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AxiomSamples:
    """Struct-of-arrays sample set for the axiom checker.

    x, y: (n, dim) complex; alpha, beta: (n,) nonnegative with
    alpha + beta = 1; zeta: (n,) unimodular scalars for the invariance
    axiom.
    """

    x: np.ndarray
    y: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    zeta: np.ndarray

    def __post_init__(self):
        if np.any(self.alpha < 0) or np.any(self.beta < 0):
            raise PreconditionError("alpha, beta must be nonnegative")
        if np.max(np.abs(self.alpha + self.beta - 1.0)) > 1e-12:
            raise PreconditionError("alpha + beta must equal 1")
        if np.max(np.abs(np.abs(self.zeta) - 1.0)) > 1e-12:
            raise PreconditionError("zeta must be unimodular")

    def __len__(self):
        return self.x.shape[0]


def draw_axiom_samples(dim, count, seed, radius=1.0):
    rng = np.random.default_rng(seed)
    half = radius / np.sqrt(2.0)
    x = rng.uniform(-half, half, (count, dim)) + 1j * rng.uniform(-half, half, (count, dim))
    y = rng.uniform(-half, half, (count, dim)) + 1j * rng.uniform(-half, half, (count, dim))
    alpha = rng.uniform(0.0, 1.0, count)
    theta = rng.uniform(0.0, 2.0 * np.pi, count)
    zeta = np.cos(theta) + 1j * np.sin(theta)
    return AxiomSamples(x=x, y=y, alpha=alpha, beta=1.0 - alpha, zeta=zeta)


@dataclass(frozen=True)
class AxiomCheck:
    margin: float
    witness: int
    passed: bool


@dataclass(frozen=True)
class AxiomReport:
    checks: dict
    passed: bool

    def __getitem__(self, name):
        return self.checks[name]


def _worst(margins, tol):
    i = int(np.argmax(margins))
    worst = float(margins[i])
    return AxiomCheck(margin=worst, witness=i, passed=worst <= tol)


def check_modular_axioms(m, samples, tol=1e-12):
    """Worst violation margin per axiom over the sample set; <= tol passes.

    For the definiteness axiom the margin is an indicator: 1.0 for a
    sampled x != 0 with rho(x) = 0 (or rho(0) for a zero sample), negative
    otherwise, so any strict violation dominates.
    """
    rx = eval_modular(m, samples.x)
    ry = eval_modular(m, samples.y)

    nonzero = np.any(samples.x != 0, axis=1)
    definite = np.where(nonzero, np.where(rx > 0.0, -rx, 1.0), rx)

    invariance = np.abs(eval_modular(m, samples.zeta[:, None] * samples.x) - rx)

    combo = samples.alpha[:, None] * samples.x + samples.beta[:, None] * samples.y
    rc = eval_modular(m, combo)
    subadd = rc - (rx + ry)

    checks = {
        "i": _worst(definite, tol),
        "ii": _worst(invariance, tol),
        "iii": _worst(subadd, tol),
    }
    if m.convex:
        convex_margin = rc - (samples.alpha * rx + samples.beta * ry)
        checks["iii_convex"] = _worst(convex_margin, tol)
    return AxiomReport(checks=checks, passed=all(c.passed for c in checks.values()))


@dataclass(frozen=True)
class Delta2Result:
    kappa_hat: float
    passed: bool


def check_delta2(m, samples):
    """Measured doubling constant max rho(2x)/rho(x) against the claimed kappa."""
    rows, _ = _as_rows(samples)
    if rows.shape[0] == 0:
        raise PreconditionError("need at least one sample")
    nonzero = np.any(rows != 0, axis=1)
    if not np.all(nonzero):
        raise PreconditionError("delta2 samples must be nonzero")
    r1 = eval_modular(m, rows)
    if np.any(r1 == 0.0):
        raise InvalidModularError("rho(x) = 0 for a nonzero sample: not a modular")
    r2 = eval_modular(m, 2.0 * rows)
    kappa_hat = float(np.max(r2 / r1))
    return Delta2Result(kappa_hat=kappa_hat, passed=kappa_hat <= m.kappa + 1e-9)


@dataclass(frozen=True)
class RemarkSamples:
    """x: (n, dim); 0 < a < b scaling pairs; |alpha| <= 1 scalars."""

    x: np.ndarray
    a: np.ndarray
    b: np.ndarray
    alpha: np.ndarray

    def __post_init__(self):
        if np.any(self.a <= 0) or np.any(self.a >= self.b):
            raise PreconditionError("need 0 < a < b")
        if np.any(np.abs(self.alpha) > 1.0 + 1e-12):
            raise PreconditionError("need |alpha| <= 1")


def draw_remark_samples(dim, count, seed, radius=1.0):
    rng = np.random.default_rng(seed)
    half = radius / np.sqrt(2.0)
    x = rng.uniform(-half, half, (count, dim)) + 1j * rng.uniform(-half, half, (count, dim))
    a = rng.uniform(0.05, 0.95, count)
    b = a + rng.uniform(0.05, 1.0, count)
    alpha = rng.uniform(-1.0, 1.0, count)
    return RemarkSamples(x=x, a=a, b=b, alpha=alpha)


@dataclass(frozen=True)
class RemarkReport:
    increasing: AxiomCheck
    scalar_bound: AxiomCheck | None
    half_double: AxiomCheck | None
    passed: bool


def check_remark_properties(m, samples, tol=1e-12):
    """Monotonicity in the scalar; for convex modulars also
    rho(alpha*x) <= |alpha| rho(x) and rho(x) <= rho(2x)/2."""
    rx = eval_modular(m, samples.x)
    inc = eval_modular(m, samples.a[:, None] * samples.x) - eval_modular(
        m, samples.b[:, None] * samples.x
    )
    increasing = _worst(inc, tol)
    scalar_bound = half_double = None
    if m.convex:
        sc = eval_modular(m, samples.alpha[:, None] * samples.x) - np.abs(samples.alpha) * rx
        scalar_bound = _worst(sc, tol)
        hd = rx - 0.5 * eval_modular(m, 2.0 * samples.x)
        half_double = _worst(hd, tol)
    ok = increasing.passed and all(
        c.passed for c in (scalar_bound, half_double) if c is not None
    )
    return RemarkReport(
        increasing=increasing, scalar_bound=scalar_bound, half_double=half_double, passed=ok
    )


def check_fatou(m, seq, limit, tol=1e-9):
    """rho(limit) <= min of rho over the stored tail of a convergent sequence.

    The caller guarantees convergence; the testable surrogate asks the
    distances rho(x_n - limit) to be nonincreasing over the tail.
    """
    rows, _ = _as_rows(np.asarray(seq))
    lim = np.asarray(limit, dtype=np.complex128).reshape(1, -1)
    if rows.shape[0] < 2:
        raise PreconditionError("need at least two sequence entries")
    deltas = eval_modular(m, rows - lim)
    tail_start = rows.shape[0] // 2
    tail = deltas[tail_start:]
    if np.any(np.diff(tail) > 1e-12):
        raise PreconditionError("sequence tail is not rho-decreasing towards the limit")
    tail_rho = eval_modular(m, rows[tail_start:])
    return bool(eval_modular(m, lim)[0] <= float(np.min(tail_rho)) + tol)
