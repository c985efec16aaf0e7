"""Fits and scaling analysis of connectivity curves and metrics tables.

The connectivity law is the logistic solution of
``d eta / d sigma = g eta (1 - eta)`` with ``eta(0) = eta0``::

    eta(sigma) = eta0 / (eta0 + (1 - eta0) exp(-g sigma))

Internally it is parametrised by the midpoint ``sigma_mid`` and ``log g``,
which are far better conditioned than ``(eta0, g)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

import numpy as np
from scipy import optimize
from scipy.special import expit

from .ensemble import ConnectivityCurve
from .errors import FitError, InsufficientDataError, InsufficientSpanError, NoOverlapError
from .netmetrics import MetricsTable

__all__ = [
    "LogisticFit",
    "CollapseResult",
    "KnnLinearity",
    "logistic",
    "fit_logistic",
    "estimate_sigma_c",
    "sigma_at_level",
    "empirical_crossing",
    "range_proportionality",
    "mixing_rate",
    "mixing_law_deviation",
    "rescaled_abscissa",
    "collapse_objective",
    "find_beta",
    "check_knn_linearity",
    "fit_report",
]


def logistic(sigma, eta0: float, g: float):
    sigma = np.asarray(sigma, dtype=float)
    return expit(g * sigma + math.log(eta0 / (1.0 - eta0)))


@dataclass(frozen=True)
class LogisticFit:
    eta0: float
    g: float
    rss: float  # weighted when ``weighted`` is true
    z: int
    n_points: int = 0
    weighted: bool = False
    grad_norm: float = 0.0

    @property
    def chi2_reduced(self) -> float:
        dof = self.n_points - 2
        return self.rss / dof if dof > 0 else float("nan")

    def predict(self, sigma):
        return logistic(sigma, self.eta0, self.g)


def _residuals(theta, s, e, w):
    mid, logg = theta
    return w * (expit(math.exp(logg) * (s - mid)) - e)


def _jacobian(theta, s, e, w):
    mid, logg = theta
    g = math.exp(logg)
    m = expit(g * (s - mid))
    d = m * (1.0 - m)
    return np.column_stack([-g * d * w, g * (s - mid) * d * w])


def fit_logistic(curve: ConnectivityCurve, eta_window: tuple[float, float] | None = None,
                 max_iter: int = 4000) -> LogisticFit:
    """Weighted least-squares fit of the logistic law to one curve.

    Points are weighted by ``1 / stderr**2``; if any selected point has zero
    stderr the fit is unweighted.  ``eta_window`` restricts the fit to
    points with ``lo <= eta <= hi``.
    """
    s_all, e_all, se_all = curve.sigma, curve.eta, curve.stderr
    ok = np.isfinite(e_all)
    s_all, e_all, se_all = s_all[ok], e_all[ok], se_all[ok]
    if len(s_all) < 5 or e_all.min() >= 0.2 or e_all.max() <= 0.8:
        raise InsufficientSpanError(
            f"curve z={curve.z} must have >= 5 points spanning eta < 0.2 to eta > 0.8")
    if eta_window is not None:
        lo, hi = eta_window
        keep = (e_all >= lo) & (e_all <= hi)
        s_all, e_all, se_all = s_all[keep], e_all[keep], se_all[keep]
        if len(s_all) < 3:
            raise InsufficientSpanError(
                f"only {len(s_all)} points of curve z={curve.z} inside window {eta_window}")
    s, e, se = s_all, e_all, se_all
    weighted = bool(np.all(se > 0))
    w = 1.0 / se if weighted else np.ones_like(s)

    # coarse grid over (midpoint, log g)
    span = s.max() - s.min()
    mids = np.linspace(s.min(), s.max(), 41)
    loggs = np.linspace(math.log(0.5 / max(span, 1e-12)), math.log(400.0 / max(span, 1e-12)), 41)
    best, start = math.inf, None
    for m in mids:
        for lg in loggs:
            val = float(np.sum(_residuals((m, lg), s, e, w) ** 2))
            if val < best:
                best, start = val, (m, lg)

    def wrss(theta):
        return float(np.sum(_residuals(theta, s, e, w) ** 2))

    simplex = optimize.minimize(wrss, np.array(start), method="Nelder-Mead",
                                options={"xatol": 1e-12, "fatol": 1e-15,
                                         "maxiter": max_iter, "maxfev": 2 * max_iter})
    polish = optimize.least_squares(_residuals, simplex.x, jac=_jacobian, args=(s, e, w),
                                    method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15,
                                    max_nfev=max_iter)
    theta = polish.x if polish.cost * 2 <= simplex.fun else simplex.x
    rss = wrss(theta)
    J = _jacobian(theta, s, e, w)
    grad = 2.0 * J.T @ _residuals(theta, s, e, w)
    grad_norm = float(np.linalg.norm(grad))
    if not np.all(np.isfinite(theta)) or not (polish.success or simplex.success):
        raise FitError(f"logistic fit for z={curve.z} did not converge",
                       {"simplex": simplex.message, "polish": polish.message,
                        "rss": rss, "theta": theta.tolist()})
    mid, logg = theta
    g = math.exp(logg)
    eta0 = float(expit(-g * mid))
    if not 0.0 < eta0 < 1.0:
        raise FitError(f"fitted eta0={eta0} for z={curve.z} left (0, 1)",
                       {"midpoint": mid, "g": g})
    return LogisticFit(eta0, g, rss, curve.z, len(s), weighted, grad_norm)


def estimate_sigma_c(fit: LogisticFit) -> float:
    """Logistic midpoint, where the fitted eta equals 1/2."""
    return math.log((1.0 - fit.eta0) / fit.eta0) / fit.g


def sigma_at_level(fit: LogisticFit, level: float) -> float:
    """Occupancy at which the fitted curve reaches ``level`` (0.99 gives sigma_99)."""
    return math.log(level / (1.0 - level) * (1.0 - fit.eta0) / fit.eta0) / fit.g


def empirical_crossing(curve: ConnectivityCurve, level: float, field: str = "eta") -> float:
    """First occupancy at which the measured curve reaches ``level``.

    ``field="p_global"`` uses the fraction of realizations in which every
    node is connected instead of eta.  Linear interpolation between the
    bracketing grid points; NaN if the curve never gets there.
    """
    s = curve.sigma
    if field == "eta":
        e = curve.eta
    else:
        e = np.array([getattr(p, field) for p in curve.points])
    idx = np.flatnonzero(e >= level)
    if len(idx) == 0:
        return float("nan")
    i = int(idx[0])
    if i == 0:
        return float(s[0])
    t = (level - e[i - 1]) / (e[i] - e[i - 1])
    return float(s[i - 1] + t * (s[i] - s[i - 1]))


def range_proportionality(fits: Sequence[LogisticFit]) -> tuple[float, float]:
    """Best ``g = c z`` fit; returns ``(c, max relative deviation)``."""
    z = np.array([f.z for f in fits], dtype=float)
    g = np.array([f.g for f in fits])
    c = float(np.dot(g, z) / np.dot(z, z))
    return c, float(np.max(np.abs(g - c * z) / (c * z)))


def mixing_rate(fit: LogisticFit, sigma, h: float = 1e-6):
    """Central-difference ``d eta/d sigma / (eta (1 - eta))`` of the fitted curve."""
    sigma = np.asarray(sigma, dtype=float)
    d = (fit.predict(sigma + h) - fit.predict(sigma - h)) / (2 * h)
    eta = fit.predict(sigma)
    return d / (eta * (1.0 - eta))


def mixing_law_deviation(fit: LogisticFit, eta_range=(0.2, 0.8), n: int = 201) -> float:
    """Largest relative spread of the mixing rate over ``eta_range``."""
    lo = sigma_at_level(fit, eta_range[0])
    hi = sigma_at_level(fit, eta_range[1])
    rate = mixing_rate(fit, np.linspace(lo, hi, n), h=1e-6 * max(hi - lo, 1e-12))
    mean = float(np.mean(rate))
    return float(np.max(np.abs(rate - mean)) / abs(mean))


# -- scaling collapse ---------------------------------------------------------

REFERENCE_Z = 2


def rescaled_abscissa(sigma, z: int, beta: float, variable: str = "log"):
    """Collapse coordinate of occupancies on the curve for range ``z``.

    ``variable="log"`` gives ``R**beta * ln(sigma)``; ``variable="shift"``
    gives ``ln(R**beta * sigma)``.  ``R = z - 1`` is the reduced range.
    """
    R = z - 1
    if R <= 0:
        raise InsufficientDataError(f"reduced range undefined for z={z}")
    ls = np.log(np.asarray(sigma, dtype=float))
    if variable == "log":
        return R ** beta * ls
    if variable == "shift":
        return beta * math.log(R) + ls
    raise ValueError(f"unknown collapse variable {variable!r}")


def _split_reference(curves, reference_z):
    ref = next((c for c in curves if c.z == reference_z), None)
    if ref is None:
        raise InsufficientDataError(f"reference curve z={reference_z} missing")
    others = [c for c in curves if c is not ref]
    return ref, others


def collapse_objective(beta: float, curves: Sequence[ConnectivityCurve],
                       variable: str = "log", reference_z: int = REFERENCE_Z) -> float:
    """Mean squared eta mismatch between rescaled curves and the reference.

    Each non-reference curve is interpolated (piecewise linear in the
    collapse coordinate) at the reference points that fall inside its range.
    """
    ref, others = _split_reference(curves, reference_z)
    x_ref = rescaled_abscissa(ref.sigma, ref.z, beta, variable)
    e_ref = ref.eta
    total, count = 0.0, 0
    for c in others:
        x = rescaled_abscissa(c.sigma, c.z, beta, variable)
        inside = (x_ref >= x[0]) & (x_ref <= x[-1])
        if not inside.any():
            raise NoOverlapError(f"curve z={c.z} does not overlap the reference at beta={beta}")
        diff = np.interp(x_ref[inside], x, c.eta) - e_ref[inside]
        total += float(np.sum(diff ** 2))
        count += int(inside.sum())
    return total / count if count else 0.0


@dataclass(frozen=True)
class CollapseResult:
    beta: float
    residual: float
    reference_z: int = REFERENCE_Z
    variable: str = "log"
    grid: np.ndarray = field(default=None, repr=False)
    profile: np.ndarray = field(default=None, repr=False)


def _safe_objective(beta, curves, variable, reference_z):
    try:
        return collapse_objective(beta, curves, variable, reference_z)
    except NoOverlapError:
        return math.inf


def find_beta(curves: Sequence[ConnectivityCurve], interval=(-1.5, 0.0), step: float = 0.01,
              tol: float = 1e-6, variable: str = "log",
              reference_z: int = REFERENCE_Z) -> CollapseResult:
    """Collapse exponent by grid scan followed by golden-section refinement."""
    ref, others = _split_reference(curves, reference_z)
    if not others:
        raise InsufficientDataError("collapse needs at least one non-reference curve")
    lo, hi = interval
    n = int(round((hi - lo) / step))
    grid = lo + step * np.arange(n + 1)
    profile = np.array([_safe_objective(b, curves, variable, reference_z) for b in grid])
    if not np.isfinite(profile).any():
        raise NoOverlapError(f"no beta in {interval} overlaps all curves with the reference")
    i = int(np.argmin(profile))
    best_b, best_f = float(grid[i]), float(profile[i])
    if 0 < i < n:
        f = lambda b: _safe_objective(b, curves, variable, reference_z)  # noqa: E731
        a, c = float(grid[i - 1]), float(grid[i + 1])
        invphi = (math.sqrt(5) - 1) / 2
        x1, x2 = c - invphi * (c - a), a + invphi * (c - a)
        f1, f2 = f(x1), f(x2)
        while c - a > tol:
            if f1 <= f2:
                c, x2, f2 = x2, x1, f1
                x1 = c - invphi * (c - a)
                f1 = f(x1)
            else:
                a, x1, f1 = x1, x2, f2
                x2 = a + invphi * (c - a)
                f2 = f(x2)
        b_star = (a + c) / 2
        f_star = f(b_star)
        if f_star <= best_f:
            best_b, best_f = b_star, f_star
    return CollapseResult(best_b, best_f, reference_z, variable, grid, profile)


# -- degree correlations ------------------------------------------------------

class KnnLinearity(NamedTuple):
    b: float
    slope: float
    r_squared: float


def check_knn_linearity(table: MetricsTable | Mapping[int, float],
                        k_max: int | None = None, k_min: int = 2) -> KnnLinearity:
    """Ordinary least squares of k_nn(k) on k over ``k_min <= k <= k_max``.

    ``k_max`` defaults to the table's cutoff degree.
    """
    if isinstance(table, MetricsTable):
        knn = table.knn
        k_max = table.k_c if k_max is None else k_max
    else:
        knn = dict(table)
        k_max = max(knn) if k_max is None else k_max
    ks = np.array([k for k in sorted(knn) if k_min <= k <= k_max], dtype=float)
    if len(ks) < 4:
        raise InsufficientDataError(f"need >= 4 degrees in [{k_min}, {k_max}], have {len(ks)}")
    y = np.array([knn[int(k)] for k in ks])
    slope, b = np.polyfit(ks, y, 1)
    ss_res = float(np.sum((y - (b + slope * ks)) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return KnnLinearity(float(b), float(slope), r2)


def fit_report(fits: Sequence[LogisticFit], collapse: CollapseResult | None = None,
               curves: Sequence[ConnectivityCurve] | None = None) -> dict:
    report = {"fits": {}}
    by_z = {c.z: c for c in curves} if curves else {}
    for f in fits:
        entry = {
            "eta0": f.eta0,
            "g": f.g,
            "rss": f.rss,
            "chi2_reduced": f.chi2_reduced,
            "n_points": f.n_points,
            "sigma_c_mid": estimate_sigma_c(f),
            "sigma_c_99": sigma_at_level(f, 0.99),
        }
        if f.z in by_z:
            entry["sigma_eta_0.999"] = empirical_crossing(by_z[f.z], 0.999)
            entry["sigma_global_half"] = empirical_crossing(by_z[f.z], 0.5, "p_global")
        report["fits"][str(f.z)] = entry
    if len(fits) >= 2:
        c, dev = range_proportionality(fits)
        report["g_vs_z"] = {"coefficient": c, "max_relative_deviation": dev}
    if collapse is not None:
        report["beta"] = collapse.beta
        report["residual"] = collapse.residual
        report["variable"] = collapse.variable
    return report
