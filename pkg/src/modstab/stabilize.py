"""Direct-method engine: iterate the scaled map until the probe-sup
modular distance between successive candidates drops below tolerance,
freeze the bi-additive limit, and instrument every quantitative claim
made about the iteration on the way."""

from dataclasses import dataclass, field

import numpy as np

from .bimaps import (
    DIRECTIONS,
    ProbeSet,
    RhoTildeWeight,
    check_psi_law,
    iterate_evaluator,
    rho_tilde_tabulated,
)
from .errors import (
    ConfigError,
    NonFiniteValueError,
    OverflowAbort,
    PreconditionError,
)


@dataclass(frozen=True)
class StabilizeConfig:
    direction: str
    probes: ProbeSet
    n_max: int = 40
    tol: float = 1e-10
    # 2^40 * radius-1 coordinates reach ~1.1e12, so the cap sits well above
    # that while still guarding squared/relu'd evaluations against overflow
    magnitude_cap: float = 1e15

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ConfigError(f"direction must be one of {DIRECTIONS}")
        if self.n_max < 1:
            raise ConfigError("n_max must be >= 1")
        if self.tol <= 0:
            raise ConfigError("tol must be positive")


@dataclass(frozen=True)
class LevelDiag:
    level: int
    sup_rho_delta: float
    rho_tilde_delta: float
    telescoping_kappa_margin: float | None
    telescoping_final_margin: float | None


@dataclass
class StabilizeOutcome:
    D: object
    N_converged: int
    converged: bool
    per_iter_deltas: list = field(default_factory=list)
    sup_rho_deltas: list = field(default_factory=list)
    contraction_estimate: float = 0.0
    bound_margin: float = float("nan")
    levels: list = field(default_factory=list)
    iterates: np.ndarray | None = None
    weights: np.ndarray | None = None
    hyers_values: np.ndarray | None = None


def hyers_bound(psi, x, z):
    """psi(x,x) psi(z,0) / (2 (1 - L)): the a-priori distance between the
    perturbed map and its extracted bi-additive limit."""
    if not (0.0 < psi.L < 1.0):
        raise ConfigError("hyers bound needs L in (0, 1)")
    x = np.asarray(x, dtype=np.complex128)
    zero = np.zeros_like(np.asarray(z, dtype=np.complex128))
    return psi(x, x) * psi(z, zero) / (2.0 * (1.0 - psi.L))


def estimate_contraction(history):
    """Geometric-mean ratio of successive nonzero deltas; 0 when the
    iteration sat at a fixed point the whole time."""
    if len(history) < 3:
        raise PreconditionError("need at least 3 recorded deltas")
    h = [float(v) for v in history if np.isfinite(v)]
    ratios = [b / a for a, b in zip(h, h[1:]) if a > 0.0 and b > 0.0]
    if not ratios:
        return 0.0
    return float(np.exp(np.mean(np.log(ratios))))


class _Telescope:
    """Per-level majorants for the defect against the level-0 map.

    Ascending uses the geometric partial sum
        sum_{i<=n} 2^-i psi(2^(i-1) x, 2^(i-1) x) psi(z, 0),
    whose full sum is bounded by psi(x,x) psi(z,0)/(2(1-L)).
    Descending uses the kappa-weighted table (two variants, one keyed by
    psi at the halved diagonal, one by psi(. , 0)); at kappa = 2 the table
    coincides with the honest unrolled recursion.
    """

    def __init__(self, form, psi, X, Z, kappa):
        self.form = form
        self.psi = psi
        self.X = X
        self.kappa = kappa
        zero = np.zeros_like(Z)
        self.psi_z0 = psi(Z, zero)
        self.final = psi(X, X) * self.psi_z0 / (2.0 * (1.0 - psi.L))
        self._cum = np.zeros(X.shape[0])
        self._terms = {}

    def _term(self, i):
        if i not in self._terms:
            X = self.X
            zero = np.zeros_like(X)
            if self.form == "ascending":
                s = 2.0 ** (i - 1)
                self._terms[i] = self.psi(s * X, s * X)
            elif self.form == "kappa_both_slots":
                s = 2.0 if i == 1 else 2.0**i
                self._terms[i] = self.psi(X / s, X / s)
            elif self.form == "kappa_first_zero":
                s = 1.0 if i == 1 else 2.0 ** (i - 1)
                self._terms[i] = self.psi(X / s, zero)
            else:
                raise ConfigError(f"unknown telescoping form {self.form!r}")
        return self._terms[i]

    def majorant(self, n):
        if self.form == "ascending":
            self._cum = self._cum + 2.0 ** (-n) * self._term(n)
            return self._cum * self.psi_z0
        k = self.kappa
        acc = k ** (n - 1) / 2.0 ** (n - 1) * self._term(1)
        for i in range(2, n + 1):
            acc = acc + k**n / 2.0 ** (n - i + 1) * self._term(i)
        return acc * self.psi_z0


def _auto_telescope_form(direction, weight_kind):
    if direction == "ascending":
        return "ascending"
    return "kappa_first_zero" if weight_kind == "psi_x0_z0" else "kappa_both_slots"


def _tabulate(d, X, Z, direction, level, cap, max_abs_x):
    scale = 2.0**level
    if direction == "ascending":
        if scale * max_abs_x > cap:
            probe = int(np.argmax(np.abs(X).max(axis=1)))
            raise OverflowAbort(
                f"2^{level} scaling exceeds the magnitude cap {cap:g}",
                level=level,
                probe_id=probe,
            )
        vals = d(scale * X, Z) / scale
    else:
        vals = d(X / scale, Z) * scale
    if not np.isfinite(vals).all():
        bad = int(np.argmax(~np.isfinite(vals).all(axis=1)))
        raise NonFiniteValueError(
            f"non-finite iterate value at level {level}", probe_id=bad, level=level
        )
    return vals


def stabilize(
    d,
    psi,
    rho_fn,
    cfg,
    weight_kind="psi_xx_z0",
    kappa=2.0,
    telescoping=True,
    start_level=0,
    skip_psi_check=False,
):
    """Run the scaled iteration and freeze the limit candidate.

    rho_fn maps an (n, value_dim) batch to its (n,) modular values.
    Stops when the probe-sup modular distance between successive
    candidates drops below cfg.tol (convergence) or at cfg.n_max.
    per_iter_deltas records the probe-restricted function-space modular
    of successive differences; the stopping rule deliberately uses the
    plain probe-sup so zero-weight boundary probes cannot produce 0/0.
    """
    if not getattr(d, "zero_boundary", True):
        raise PreconditionError("the map must vanish on the axes (zero_boundary)")
    if psi.direction != cfg.direction:
        raise PreconditionError("psi scaling direction disagrees with the iteration direction")
    if not skip_psi_check:
        law = check_psi_law(psi, cfg.probes)
        if not law.passed:
            raise PreconditionError(
                f"psi scaling law fails on the probe set (margin {law.law_margin:.3e})"
            )

    X, Z = cfg.probes.x, cfg.probes.z
    weight = RhoTildeWeight(psi=psi, kind=weight_kind)
    weights = weight.values(X, Z)
    max_abs_x = float(np.abs(X).max()) if X.size else 0.0

    v_origin = d(X, Z)  # the unscaled map, reference for bound/telescoping
    hyers_vals = hyers_bound(psi, X, Z)

    telescope = None
    if telescoping and start_level == 0:
        telescope = _Telescope(
            _auto_telescope_form(cfg.direction, weight_kind), psi, X, Z, kappa
        )

    v_prev = (
        v_origin
        if start_level == 0
        else _tabulate(d, X, Z, cfg.direction, start_level, cfg.magnitude_cap, max_abs_x)
    )
    iterates = [v_prev]
    levels = []
    sup_deltas = []
    rt_deltas = []
    converged = False
    frozen = start_level

    for n in range(start_level + 1, cfg.n_max + 1):
        v = _tabulate(d, X, Z, cfg.direction, n, cfg.magnitude_cap, max_abs_x)
        diff_rho = rho_fn(v - v_prev)
        if not np.isfinite(diff_rho).all():
            raise NonFiniteValueError("non-finite modular value", level=n)
        sup_delta = float(np.max(diff_rho))
        rt_delta = rho_tilde_tabulated(diff_rho, weights)
        tel_kappa = tel_final = None
        if telescope is not None:
            defect = rho_fn(v - v_origin)
            tel_kappa = float(np.max(defect - telescope.majorant(n)))
            tel_final = float(np.max(defect - telescope.final))
        iterates.append(v)
        sup_deltas.append(sup_delta)
        rt_deltas.append(rt_delta)
        levels.append(
            LevelDiag(
                level=n,
                sup_rho_delta=sup_delta,
                rho_tilde_delta=rt_delta,
                telescoping_kappa_margin=tel_kappa,
                telescoping_final_margin=tel_final,
            )
        )
        v_prev = v
        frozen = n
        if sup_delta < cfg.tol:
            converged = True
            break

    bound_margin = float(np.max(rho_fn(v_prev - v_origin) - hyers_vals))
    contraction = estimate_contraction(rt_deltas) if len(rt_deltas) >= 3 else 0.0
    return StabilizeOutcome(
        D=iterate_evaluator(d, cfg.direction, frozen),
        N_converged=frozen,
        converged=converged,
        per_iter_deltas=rt_deltas,
        sup_rho_deltas=sup_deltas,
        contraction_estimate=contraction,
        bound_margin=bound_margin,
        levels=levels,
        iterates=np.array(iterates),
        weights=weights,
        hyers_values=hyers_vals,
    )


@dataclass(frozen=True)
class UniquenessReport:
    max_disagreement: float
    passed: bool
    variants: tuple


def check_uniqueness(d, psi, rho_fn, cfg, trials=3, weight_kind="psi_xx_z0"):
    """Re-run the extraction from shifted starting levels and perturbed
    level caps; all limit candidates must agree on the probes."""
    base = stabilize(d, psi, rho_fn, cfg, weight_kind=weight_kind, telescoping=False)
    X, Z = cfg.probes.x, cfg.probes.z
    base_vals = base.D(X, Z)
    variants = []
    runs = [("start", s) for s in range(1, trials + 1)]
    runs += [("n_max", cfg.n_max - 5), ("n_max", cfg.n_max + 5)]
    worst = 0.0
    for tag, value in runs:
        if tag == "start":
            out = stabilize(
                d, psi, rho_fn, cfg,
                weight_kind=weight_kind, telescoping=False,
                start_level=value, skip_psi_check=True,
            )
        else:
            alt = StabilizeConfig(
                direction=cfg.direction,
                probes=cfg.probes,
                n_max=max(1, value),
                tol=cfg.tol,
                magnitude_cap=cfg.magnitude_cap,
            )
            out = stabilize(
                d, psi, rho_fn, alt,
                weight_kind=weight_kind, telescoping=False, skip_psi_check=True,
            )
        gap = float(np.max(rho_fn(out.D(X, Z) - base_vals)))
        worst = max(worst, gap)
        variants.append((f"{tag}={value}", out.N_converged, gap))
    return UniquenessReport(
        max_disagreement=worst, passed=worst <= 10.0 * cfg.tol, variants=tuple(variants)
    )


def bounded_orbit_estimate(iterates, weights, rho_fn, weight_tol=1e-15, defect_tol=1e-12):
    """Probe estimate of sup over level pairs of the induced-modular
    distance between iterates; finite orbits are what licence the
    fixed-point extraction."""
    m = len(iterates)
    active = weights > weight_tol
    best = 0.0
    for i in range(m):
        for j in range(i + 1, m):
            vals = rho_fn(iterates[i] - iterates[j])
            if np.any(~active & (vals > defect_tol)):
                return float("inf")
            if np.any(active):
                best = max(best, float(np.max(vals[active] / weights[active])))
    return best
