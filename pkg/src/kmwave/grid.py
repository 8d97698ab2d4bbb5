"""Uniform periodic grid and spectral primitives.

The domain is [-L, L) with n equispaced nodes x_k = -L + 2L*k/n and the
Fourier convention

    f(x) = sum_j coeff(j) * exp(i * pi * j * x / L),    xi_j = pi*j/L,

with integer modes j in [-n/2, n/2).  Coefficients are stored in numpy
fft order (0, 1, ..., n/2-1, -n/2, ..., -1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CorruptedSpectrumError, InvalidFieldError

HERMITIAN_TOL = 1e-12


def _check_size(n: int) -> None:
    if n < 16 or (n & (n - 1)) != 0:
        raise InvalidFieldError(f"n_points must be a power of two >= 16, got {n}")


@dataclass
class GridField:
    """Real periodic grid function u(x) on [-L, L)."""

    half_length: float
    values: np.ndarray
    time_tag: float | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.half_length <= 0:
            raise InvalidFieldError("half_length must be positive")
        _check_size(self.values.size)
        if not np.all(np.isfinite(self.values)):
            raise InvalidFieldError("field values must be finite")

    @property
    def n_points(self) -> int:
        return self.values.size

    @property
    def dx(self) -> float:
        return 2.0 * self.half_length / self.n_points

    def nodes(self) -> np.ndarray:
        return grid_nodes(self.half_length, self.n_points)

    def with_values(self, values: np.ndarray, time_tag: float | None = None) -> "GridField":
        return GridField(self.half_length, values, time_tag)


@dataclass
class Spectrum:
    """Fourier coefficients of a GridField, fft mode order."""

    half_length: float
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=complex)
        _check_size(self.coefficients.size)

    @property
    def n_points(self) -> int:
        return self.coefficients.size

    def modes(self) -> np.ndarray:
        return mode_numbers(self.n_points)

    def frequencies(self) -> np.ndarray:
        return mode_numbers(self.n_points) * np.pi / self.half_length

    def coeff(self, j: int) -> complex:
        n = self.n_points
        if not -n // 2 <= j < n // 2:
            raise IndexError(f"mode {j} outside [-{n//2}, {n//2})")
        return self.coefficients[j % n]


def grid_nodes(half_length: float, n_points: int) -> np.ndarray:
    return -half_length + 2.0 * half_length * np.arange(n_points) / n_points


def mode_numbers(n_points: int) -> np.ndarray:
    return np.rint(np.fft.fftfreq(n_points) * n_points).astype(int)


def frequencies(half_length: float, n_points: int) -> np.ndarray:
    """Fourier frequencies xi_j = pi*j/L in fft order."""
    return mode_numbers(n_points) * np.pi / half_length


def _node_phase(n_points: int) -> np.ndarray:
    # exp(i*xi_j*x_0) for x_0 = -L is (-1)^j; relates fft output to the
    # coefficients of the exp(i*xi_j*x) basis.
    j = mode_numbers(n_points)
    return np.where(j % 2 == 0, 1.0, -1.0)


def transform(f: GridField) -> Spectrum:
    """Forward transform; coeff(0) is the mean of the values."""
    n = f.n_points
    c = np.fft.fft(f.values) / n
    c *= _node_phase(n)
    return Spectrum(f.half_length, c)


def hermitian_defect(spec: Spectrum) -> float:
    """Relative departure from coeff(-j) == conj(coeff(j))."""
    c = spec.coefficients
    n = c.size
    mirrored = np.conj(c[(-np.arange(n)) % n])
    scale = np.max(np.abs(c))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(c - mirrored)) / scale)


def inverse(spec: Spectrum, time_tag: float | None = None) -> GridField:
    """Inverse transform back to a real field.

    Raises CorruptedSpectrumError when Hermitian symmetry is violated
    beyond HERMITIAN_TOL relative.
    """
    defect = hermitian_defect(spec)
    if defect > HERMITIAN_TOL:
        raise CorruptedSpectrumError(
            f"spectrum violates Hermitian symmetry (relative defect {defect:.3e})"
        )
    n = spec.n_points
    vals = np.fft.ifft(spec.coefficients * _node_phase(n)) * n
    return GridField(spec.half_length, vals.real, time_tag)


def _apply_symbol_values(values: np.ndarray, symbol: np.ndarray) -> np.ndarray:
    """Multiply fft-order symbol against the spectrum of real samples.

    The node phase cancels for diagonal multipliers, so this works on raw
    fft output.
    """
    return np.fft.ifft(np.fft.fft(values) * symbol).real


def derivative(f: GridField, order: int) -> GridField:
    """Spectral derivative of the given order; odd orders zero the Nyquist mode."""
    if order < 1:
        raise ValueError("order must be >= 1")
    xi = frequencies(f.half_length, f.n_points)
    factor = (1j * xi) ** order
    if order % 2 == 1:
        factor[f.n_points // 2] = 0.0
    return f.with_values(_apply_symbol_values(f.values, factor), f.time_tag)


def dealias(spec: Spectrum) -> Spectrum:
    """Two-thirds rule: zero all modes with |j| > n/3."""
    j = spec.modes()
    keep = np.abs(j) <= spec.n_points // 3
    return Spectrum(spec.half_length, np.where(keep, spec.coefficients, 0.0))


def dealias_mask(n_points: int) -> np.ndarray:
    return np.abs(mode_numbers(n_points)) <= n_points // 3


def interpolate(f: GridField, positions: np.ndarray) -> np.ndarray:
    """Trigonometric interpolation of f at arbitrary positions.

    Positions are reduced modulo the period; exact at grid nodes up to
    round-off.
    """
    positions = np.atleast_1d(np.asarray(positions, dtype=float))
    if not np.all(np.isfinite(positions)):
        raise InvalidFieldError("interpolation positions must be finite")
    L = f.half_length
    x = np.mod(positions + L, 2.0 * L) - L
    spec = transform(f)
    c = spec.coefficients
    xi = spec.frequencies()
    n = f.n_points
    nyq = n // 2
    out = np.empty(x.size, dtype=float)
    # chunk the dense evaluation matrix to bound memory
    chunk = max(1, 2 ** 22 // n)
    main = np.ones(n, dtype=bool)
    main[nyq] = False
    for lo in range(0, x.size, chunk):
        xs = x[lo:lo + chunk]
        phases = np.exp(1j * np.outer(xs, xi[main]))
        vals = phases @ c[main]
        # Nyquist mode has no conjugate partner; interpolate it as a cosine
        vals += c[nyq] * np.cos(xi[nyq] * xs)
        out[lo:lo + chunk] = vals.real
    return out


def sobolev_norm(f: GridField, s: int) -> float:
    """H^s norm over one period as sum of derivative L^2 norms, s in 0..3."""
    if s not in (0, 1, 2, 3):
        raise ValueError("s must be one of 0, 1, 2, 3")
    spec = transform(f)
    xi = spec.frequencies()
    power = np.abs(spec.coefficients) ** 2
    weight = np.zeros_like(xi)
    for k in range(s + 1):
        weight += xi ** (2 * k)
    # Parseval: ||f||_{L^2}^2 = 2L * sum |c_j|^2
    return float(np.sqrt(2.0 * f.half_length * np.sum(power * weight)))


def l2_norm(f: GridField) -> float:
    return sobolev_norm(f, 0)


def spectral_tail_fraction(f: GridField, band_limit: int | None = None) -> float:
    """Fraction of spectral energy carried by the top third of modes.

    ``band_limit`` restricts attention to modes |j| <= band_limit (with the
    tail being the top third of that band); pass the dealiasing cutoff when
    diagnosing an evolved field whose upper third is held at zero by
    construction.
    """
    spec = transform(f)
    power = np.abs(spec.coefficients) ** 2
    power[0] = 0.0  # mean carries no smoothness information
    n = f.n_points
    modes = np.abs(mode_numbers(n))
    if band_limit is None:
        keep = modes <= n // 3
    else:
        power[modes > band_limit] = 0.0
        keep = modes <= (2 * band_limit) // 3
    total = np.sum(power)
    if total == 0.0:
        return 0.0
    tail = np.sum(power[~keep])
    return float(tail / total)


def field_from_function(func, half_length: float, n_points: int,
                        time_tag: float | None = None) -> GridField:
    x = grid_nodes(half_length, n_points)
    return GridField(half_length, func(x), time_tag)
