"""Density of the spectrally positive alpha-stable law L_1, 1 < alpha < 2.

L_1 is normalised by its Laplace transform E[exp(-s L_1)] = exp(s**alpha), so
the Levy measure is C_alpha x**(-alpha-1) dx on (0, inf) and the
characteristic function is exp(G(iu)) with G(z) = (-z)**alpha on the
principal branch.

Evaluation strategy for p:

* |x| <= x_switch: composite Gauss-Legendre quadrature of the Fourier
  inversion integral (vectorised over x);
* x > x_switch: the right-tail asymptotic series, truncated at its smallest
  term;
* x < -x_log (log scale) or x < -x_switch (linear scale): the Laplace
  inversion integral along the vertical line through the saddle point, which
  keeps full relative accuracy deep in the light left tail.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate, optimize, special
from scipy.interpolate import CubicSpline
from sklearn.linear_model import LinearRegression
from sklearn.metrics import r2_score

from stable_trees.config import DEFAULT_X_SWITCH
from stable_trees.errors import DomainError, ParameterError, QuadratureError

logger = logging.getLogger(__name__)

_DOMAIN_TOLERANCE = 1e-12
_DECAY_EXPONENT = 40.0
_FAR_LOG_DENSITY = -800.0
_ROW_BLOCK = 256
_SERIES_TERMS = 400


def _validate_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 1.0 < alpha < 2.0:
        raise ParameterError(f"alpha must be between 1 and 2 (exclusive), got {alpha}.")
    return alpha


def levy_constant(alpha: float) -> float:
    """C_alpha = alpha (alpha - 1) / Gamma(2 - alpha), equal to 1/Gamma(-alpha)."""

    alpha = _validate_alpha(alpha)
    return alpha * (alpha - 1.0) / special.gamma(2.0 - alpha)


def density_at_zero(alpha: float) -> float:
    """p(0) = 1 / (alpha Gamma(1 - 1/alpha))."""

    alpha = _validate_alpha(alpha)
    return 1.0 / (alpha * special.gamma(1.0 - 1.0 / alpha))


def exponent_g(z: ArrayLike, alpha: float) -> complex | NDArray[np.complex128]:
    """G(z) = (-z)**alpha on the closed left half-plane.

    Computed as exp(alpha * Log(-z)) with the principal logarithm, so that
    |exp(G(i lam))| <= 1 for every real lam.
    """

    alpha = _validate_alpha(alpha)
    values = np.asarray(z, dtype=np.complex128)
    if np.any(values.real > _DOMAIN_TOLERANCE):
        raise DomainError("G(z) is only defined for Re(z) <= 0.")
    negated = -values
    result = np.zeros_like(negated)
    nonzero = negated != 0
    result[nonzero] = np.exp(alpha * np.log(negated[nonzero]))
    if result.ndim == 0:
        return complex(result)
    return result


@dataclass(frozen=True)
class QuadratureConfig:
    """Numerical settings of a density evaluator."""

    max_frequency: float | None = None
    panels: int = 256
    nodes_per_panel: int = 16
    x_switch: float = DEFAULT_X_SWITCH
    x_log: float = 1.5
    table_step: float = 0.02
    left_table_step: float = 0.05
    left_tail: Literal["contour", "fit"] = "contour"

    def __post_init__(self) -> None:
        if self.panels < 1 or self.nodes_per_panel < 2:
            raise ParameterError("quadrature needs at least one panel of two nodes.")
        if not 0.0 < self.x_log <= self.x_switch:
            raise ParameterError("x_log must be between 0 and x_switch.")
        if self.left_tail not in ("contour", "fit"):
            raise ParameterError("left_tail must be 'contour' or 'fit'.")


@dataclass(frozen=True)
class LeftTailFit:
    """Least-squares fit of log p(-x) on x**(alpha/(alpha-1)) (and log x)."""

    intercept: float
    coefficients: tuple[float, ...]
    r2: float
    tail_exponent: float
    include_log_term: bool

    @property
    def slope(self) -> float:
        return self.coefficients[-1]

    def predict(self, x: ArrayLike) -> NDArray[np.float64]:
        x_arr = np.asarray(x, dtype=float)
        return self.intercept + _left_tail_features(
            x_arr, self.tail_exponent, self.include_log_term
        ) @ np.asarray(self.coefficients)


def _left_tail_features(
    x: NDArray[np.float64], tail_exponent: float, include_log_term: bool
) -> NDArray[np.float64]:
    columns = [np.log(x)] if include_log_term else []
    columns.append(x**tail_exponent)
    return np.column_stack(columns)


@dataclass(frozen=True)
class StableModel:
    """The spectrally positive alpha-stable law and its density evaluators.

    Instances are immutable; derived grids and tables are built lazily on
    first use and are then safe to share between readers.
    """

    alpha: float
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", _validate_alpha(self.alpha))

    @property
    def c_alpha(self) -> float:
        return levy_constant(self.alpha)

    @property
    def p_zero(self) -> float:
        return density_at_zero(self.alpha)

    @property
    def tail_exponent(self) -> float:
        return self.alpha / (self.alpha - 1.0)

    @property
    def max_frequency(self) -> float:
        if self.quadrature.max_frequency is not None:
            return self.quadrature.max_frequency
        decay = abs(math.cos(math.pi * self.alpha / 2.0))
        return (_DECAY_EXPONENT / decay) ** (1.0 / self.alpha)

    @property
    def x_far(self) -> float:
        """Distance into the left tail where log p drops below -800."""

        a = self.alpha
        return a * (-_FAR_LOG_DENSITY / (a - 1.0)) ** ((a - 1.0) / a)

    def exponent_g(self, z: ArrayLike) -> complex | NDArray[np.complex128]:
        return exponent_g(z, self.alpha)

    # -- frequency-domain quadrature -------------------------------------

    @cached_property
    def _frequency_grid(
        self,
    ) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
        cfg = self.quadrature
        edges = self.max_frequency * (np.arange(cfg.panels + 1) / cfg.panels) ** 2
        nodes, weights = np.polynomial.legendre.leggauss(cfg.nodes_per_panel)
        left = edges[:-1, None]
        half = 0.5 * (edges[1:, None] - left)
        u = (left + half * (nodes[None, :] + 1.0)).ravel()
        w = (half * weights[None, :]).ravel()
        power = u**self.alpha
        re_g = math.cos(math.pi * self.alpha / 2.0) * power
        im_g = -math.sin(math.pi * self.alpha / 2.0) * power
        return u, w * np.exp(re_g) / math.pi, im_g

    def _fourier_density(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        u, damped, im_g = self._frequency_grid
        out = np.empty(x.shape, dtype=float)
        for start in range(0, x.size, _ROW_BLOCK):
            block = x[start : start + _ROW_BLOCK]
            out[start : start + _ROW_BLOCK] = np.cos(np.outer(block, u) - im_g) @ damped
        return out

    def _fourier_cdf(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        u, damped, im_g = self._frequency_grid
        weights = damped / u
        out = np.empty(x.shape, dtype=float)
        for start in range(0, x.size, _ROW_BLOCK):
            block = x[start : start + _ROW_BLOCK]
            out[start : start + _ROW_BLOCK] = (
                0.5 + np.sin(np.outer(block, u) - im_g) @ weights
            )
        return out

    # -- asymptotic pieces -------------------------------------------------

    def _right_tail_series(
        self, x: NDArray[np.float64], *, mass: bool
    ) -> NDArray[np.float64]:
        a = self.alpha
        n = np.arange(1, _SERIES_TERMS + 1, dtype=float)
        log_x = np.log(x)[:, None]
        if mass:
            log_coef = special.gammaln(n * a) - special.gammaln(n + 1.0)
            log_mag = log_coef[None, :] - n[None, :] * a * log_x
        else:
            log_coef = special.gammaln(n * a + 1.0) - special.gammaln(n + 1.0)
            log_mag = log_coef[None, :] - (n[None, :] * a + 1.0) * log_x
        smallest = np.argmin(log_mag, axis=1)
        keep = n[None, :] <= (smallest[:, None] + 1)
        signs = -np.sin(math.pi * a * n)[None, :]
        terms = np.where(keep, signs * np.exp(log_mag), 0.0)
        return terms.sum(axis=1) / math.pi

    def right_tail_mass(self, x: ArrayLike) -> NDArray[np.float64] | float:
        """P(L_1 > x) for x >= x_switch from the asymptotic series."""

        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(x_arr <= 0):
            raise ParameterError("right_tail_mass needs x > 0.")
        out = self._right_tail_series(x_arr, mass=True)
        return float(out[0]) if np.ndim(x) == 0 else out

    def saddle_point_log_density(self, x: ArrayLike) -> NDArray[np.float64] | float:
        """Leading-order asymptotic of log p(-x) for x > 0."""

        x_arr = np.asarray(x, dtype=float)
        a = self.alpha
        c = (x_arr / a) ** (1.0 / (a - 1.0))
        out = -(a - 1.0) * c**a - 0.5 * np.log(
            2.0 * math.pi * a * (a - 1.0) * c ** (a - 2.0)
        )
        return float(out) if out.ndim == 0 else out

    def _contour_log_density(self, y: float, tilt: float = 1.0) -> float:
        a = self.alpha
        c = tilt * (-y / a) ** (1.0 / (a - 1.0))
        shift = c**a

        def integrand(u: float) -> float:
            return cmath.exp(1j * u * y + (c + 1j * u) ** a - shift).real

        upper = 10.0 / math.sqrt(a * (a - 1.0) * c ** (a - 2.0))
        while ((c + 1j * upper) ** a).real - shift > -_DECAY_EXPONENT:
            upper *= 1.5
        value, error = integrate.quad(
            integrand, 0.0, upper, limit=400, epsabs=0.0, epsrel=1e-10
        )
        if not value > 0.0 or error > 1e-6 * abs(value):
            raise QuadratureError(
                f"saddle-point contour integral failed at x={y}", value, error
            )
        return c * y + shift + math.log(value / math.pi)

    @cached_property
    def _left_tail_extrapolation(self) -> LeftTailFit:
        x_switch = self.quadrature.x_switch
        return self.fit_left_tail(x_switch - 2.0, x_switch, include_log_term=True)

    # -- public evaluators ---------------------------------------------------

    def log_density(self, x: ArrayLike) -> NDArray[np.float64] | float:
        """Exact log p(x), accurate in relative terms deep in the left tail."""

        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        if not np.all(np.isfinite(x_arr)):
            raise ParameterError("log_density needs finite arguments.")
        cfg = self.quadrature
        out = np.empty(x_arr.shape, dtype=float)

        middle = (x_arr >= -cfg.x_log) & (x_arr <= cfg.x_switch)
        if np.any(middle):
            values = self._fourier_density(x_arr[middle])
            if np.any(values <= 0.0):
                raise QuadratureError(
                    "Fourier quadrature returned a non-positive density",
                    float(values.min()),
                    float("nan"),
                )
            out[middle] = np.log(values)

        right = x_arr > cfg.x_switch
        if np.any(right):
            out[right] = np.log(self._right_tail_series(x_arr[right], mass=False))

        left = x_arr < -cfg.x_log
        if np.any(left):
            for index in np.flatnonzero(left):
                y = float(x_arr[index])
                if cfg.left_tail == "fit" and y < -cfg.x_switch:
                    out[index] = float(self._left_tail_extrapolation.predict([-y])[0])
                else:
                    out[index] = self._contour_log_density(y)
        return float(out[0]) if np.ndim(x) == 0 else out

    def density(self, x: ArrayLike) -> NDArray[np.float64] | float:
        """p(x) for finite real x."""

        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        cfg = self.quadrature
        out = np.empty(x_arr.shape, dtype=float)
        middle = np.abs(x_arr) <= cfg.x_switch
        if np.any(middle):
            out[middle] = np.clip(self._fourier_density(x_arr[middle]), 0.0, None)
        outside = ~middle
        if np.any(outside):
            out[outside] = np.exp(self.log_density(x_arr[outside]))
        return float(out[0]) if np.ndim(x) == 0 else out

    @cached_property
    def _log_density_table(self) -> CubicSpline:
        cfg = self.quadrature
        left = np.arange(-self.x_far, -cfg.x_log, cfg.left_table_step)
        right = np.arange(-cfg.x_log, cfg.x_switch + cfg.table_step, cfg.table_step)
        grid = np.concatenate([left, right])
        grid = grid[grid <= cfg.x_switch]
        logger.debug(
            "building log-density table for alpha=%s on %d nodes", self.alpha, grid.size
        )
        return CubicSpline(grid, self.log_density(grid))

    def fast_log_density(self, x: ArrayLike) -> NDArray[np.float64] | float:
        """Table-interpolated log p for bulk Monte Carlo use (about 1e-7 relative)."""

        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        table = self._log_density_table
        lower, upper = float(table.x[0]), float(table.x[-1])
        out = np.empty(x_arr.shape, dtype=float)
        inside = (x_arr >= lower) & (x_arr <= upper)
        out[inside] = table(x_arr[inside])
        far = x_arr < lower
        if np.any(far):
            offset = float(table(lower)) - float(self.saddle_point_log_density(-lower))
            out[far] = self.saddle_point_log_density(-x_arr[far]) + offset
        right = x_arr > upper
        if np.any(right):
            out[right] = np.log(self._right_tail_series(x_arr[right], mass=False))
        return float(out[0]) if np.ndim(x) == 0 else out

    def density_ratio(self, y: ArrayLike, x: ArrayLike) -> NDArray[np.float64] | float:
        """p(-x-y) / p(-x) for x, y >= 0, evaluated in log space."""

        y_arr = np.asarray(y, dtype=float)
        x_arr = np.asarray(x, dtype=float)
        if np.any(y_arr < 0) or np.any(x_arr < 0):
            raise ParameterError("density_ratio needs x >= 0 and y >= 0.")
        out = np.exp(
            self.fast_log_density(-x_arr - y_arr) - self.fast_log_density(-x_arr)
        )
        return float(out) if np.ndim(out) == 0 else out

    def density_ratio_bound(self, limit: float = 10.0, step: float = 0.25) -> float:
        """Supremum of density_ratio over the grid [0, limit]**2."""

        grid = np.arange(0.0, limit + step / 2, step)
        yy, xx = np.meshgrid(grid, grid)
        return float(np.max(self.density_ratio(yy, xx)))

    def cdf(self, x: ArrayLike) -> NDArray[np.float64] | float:
        """P(L_1 <= x) by Gil-Pelaez inversion."""

        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        cfg = self.quadrature
        out = np.empty(x_arr.shape, dtype=float)
        middle = np.abs(x_arr) <= cfg.x_switch
        if np.any(middle):
            out[middle] = self._fourier_cdf(x_arr[middle])
        right = x_arr > cfg.x_switch
        if np.any(right):
            out[right] = 1.0 - self._right_tail_series(x_arr[right], mass=True)
        for index in np.flatnonzero(x_arr < -cfg.x_switch):
            out[index] = self._left_tail_mass(float(x_arr[index]))
        out = np.clip(out, 0.0, 1.0)
        return float(out[0]) if np.ndim(x) == 0 else out

    def _left_tail_mass(self, upper: float) -> float:
        lower = -self.x_far
        if upper <= lower:
            return 0.0
        value, _ = integrate.quad(
            lambda y: math.exp(self.fast_log_density(y)), lower, upper, limit=200
        )
        return value

    def total_mass(self, panel_width: float = 0.25) -> float:
        """Numerical integral of p over the real line."""

        x_switch = self.quadrature.x_switch
        panels = int(math.ceil(2 * x_switch / panel_width))
        edges = np.linspace(-x_switch, x_switch, panels + 1)
        nodes, weights = np.polynomial.legendre.leggauss(16)
        half = 0.5 * np.diff(edges)[:, None]
        points = (edges[:-1, None] + half * (nodes[None, :] + 1.0)).ravel()
        central = float(
            (self.density(points) * (half * weights[None, :]).ravel()).sum()
        )
        left = self._left_tail_mass(-x_switch)
        right = float(self.right_tail_mass(x_switch))
        return central + left + right

    def fit_left_tail(
        self,
        x_min: float = 3.0,
        x_max: float = 6.0,
        points: int = 31,
        include_log_term: bool = True,
    ) -> LeftTailFit:
        """Regress log p(-x) on x**(alpha/(alpha-1)) over [x_min, x_max]."""

        if not 0.0 < x_min < x_max:
            raise ParameterError("fit_left_tail needs 0 < x_min < x_max.")
        x = np.linspace(x_min, x_max, points)
        target = np.asarray(self.log_density(-x))
        features = _left_tail_features(x, self.tail_exponent, include_log_term)
        regression = LinearRegression().fit(features, target)
        r2 = float(r2_score(target, regression.predict(features)))
        return LeftTailFit(
            intercept=float(regression.intercept_),
            coefficients=tuple(float(c) for c in regression.coef_),
            r2=r2,
            tail_exponent=self.tail_exponent,
            include_log_term=include_log_term,
        )

    def mode(self) -> float:
        result = optimize.minimize_scalar(
            lambda y: -self.log_density(y), bounds=(-3.0, 1.0), method="bounded"
        )
        return float(result.x)

    # -- independent oracles -------------------------------------------------

    def oracle_density(self, x: float) -> float:
        """Adaptive-quadrature evaluation of p(x), independent of the main grid."""

        x = float(x)
        a = self.alpha
        cos_a = math.cos(math.pi * a / 2.0)
        sin_a = math.sin(math.pi * a / 2.0)
        cfg = self.quadrature
        if x < -cfg.x_switch:
            return math.exp(self._contour_log_density(x, tilt=1.05))
        if x > cfg.x_switch:
            cos_part, cos_err = integrate.quad(
                lambda u: math.exp(cos_a * u**a) * math.cos(-sin_a * u**a),
                0.0,
                np.inf,
                weight="cos",
                wvar=x,
                limlst=200,
            )
            sin_part, sin_err = integrate.quad(
                lambda u: math.exp(cos_a * u**a) * math.sin(-sin_a * u**a),
                0.0,
                np.inf,
                weight="sin",
                wvar=x,
                limlst=200,
            )
            return (cos_part + sin_part) / math.pi

        def integrand(u: float) -> float:
            power = u**a
            return math.exp(cos_a * power) * math.cos(u * x + sin_a * power)

        value, error = integrate.quad(
            integrand,
            0.0,
            self.max_frequency,
            limit=2000,
            epsabs=1e-13,
            epsrel=1e-12,
        )
        if error > 1e-9:
            raise QuadratureError(
                "oracle Fourier integral did not converge", value, error
            )
        return value / math.pi

    def series_density(
        self, x: ArrayLike, terms: int = 160
    ) -> NDArray[np.float64] | float:
        """Convergent power series of p about 0; reliable for |x| <= 2."""

        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        a = self.alpha
        n = np.arange(terms, dtype=float)
        coefficients = np.exp(
            special.gammaln((n + 1.0) / a) - special.gammaln(n + 1.0)
        ) * np.sin((n + 1.0) * math.pi / a)
        out = np.power.outer(x_arr, n) @ coefficients / (math.pi * a)
        return float(out[0]) if np.ndim(x) == 0 else out


@lru_cache(maxsize=16)
def get_model(alpha: float, quadrature: QuadratureConfig | None = None) -> StableModel:
    """Shared, lazily tabulated model per (alpha, quadrature settings)."""

    return StableModel(alpha, quadrature or QuadratureConfig())
