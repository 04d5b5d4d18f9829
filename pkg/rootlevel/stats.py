"""
Histogramas de clase y parámetros gaussianos θ₁, θ₂.

Los momentos (n, Σg, Σg²) se guardan como enteros de Python junto a los
bins, de modo que ``estimate`` es O(1) y cualquier secuencia de altas y bajas
coincide exactamente con una reconstrucción desde cero.
"""

import math

import numpy as np
from numba import njit
from pydantic import BaseModel, ConfigDict

from rootlevel.errors import BookkeepingError, InsufficientSamplesError

SIGMA_FLOOR = 1.0
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


class GaussianParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    mu: float
    sigma: float


class ClassHistogram:
    """
    Histograma de niveles de gris enteros de una clase.

    Args:
        levels: número de bins (2^depth)
        name: nombre de la clase, solo para mensajes
    """

    def __init__(self, levels: int, name: str = ""):
        self.bins = np.zeros(levels, dtype=np.int64)
        self.n = 0
        self.sum = 0
        self.sumsq = 0
        self.name = name

    @classmethod
    def from_samples(cls, samples, levels: int, name: str = "") -> "ClassHistogram":
        hist = cls(levels, name)
        hist.add_many(samples)
        return hist

    @property
    def levels(self) -> int:
        return self.bins.size

    def add_sample(self, g: int) -> None:
        g = int(g)
        self.bins[g] += 1
        self.n += 1
        self.sum += g
        self.sumsq += g * g

    def remove_sample(self, g: int) -> None:
        g = int(g)
        if self.bins[g] <= 0:
            raise BookkeepingError(f"histograma {self.name}: bin {g} vacío al retirar una muestra")
        self.bins[g] -= 1
        self.n -= 1
        self.sum -= g
        self.sumsq -= g * g

    def add_many(self, samples) -> None:
        counts = self._counts(samples)
        self.bins += counts
        self._shift_moments(counts, +1)

    def remove_many(self, samples) -> None:
        counts = self._counts(samples)
        short = np.flatnonzero(counts > self.bins)
        if short.size:
            raise BookkeepingError(
                f"histograma {self.name}: se retiran más muestras de las que hay en el bin {int(short[0])}"
            )
        self.bins -= counts
        self._shift_moments(counts, -1)

    def _counts(self, samples) -> np.ndarray:
        samples = np.asarray(samples).ravel()
        if samples.size == 0:
            return np.zeros(self.levels, dtype=np.int64)
        return np.bincount(samples.astype(np.int64), minlength=self.levels)[: self.levels]

    def _shift_moments(self, counts: np.ndarray, sign: int) -> None:
        used = np.flatnonzero(counts)
        c = counts[used].tolist()
        g = used.tolist()
        self.n += sign * sum(c)
        self.sum += sign * sum(ci * gi for ci, gi in zip(c, g))
        self.sumsq += sign * sum(ci * gi * gi for ci, gi in zip(c, g))

    def estimate(self, sigma_floor: float = SIGMA_FLOOR) -> GaussianParams:
        """
        Estima N(μ, σ²) a partir de los momentos.

        Raises:
            InsufficientSamplesError: si n < 2
        """
        if self.n < 2:
            raise InsufficientSamplesError(
                f"muestras insuficientes para la clase {self.name or '?'} (n={self.n})"
            )
        mu = self.sum / self.n
        # varianza con aritmética entera exacta antes de dividir
        var = (self.n * self.sumsq - self.sum * self.sum) / (self.n * self.n)
        return GaussianParams(mu=mu, sigma=math.sqrt(max(var, sigma_floor * sigma_floor)))

    def neg_log_likelihood(self, theta: GaussianParams) -> float:
        """Σ −log N(g; μ, σ²) sobre todas las muestras del histograma."""
        if self.n == 0:
            return 0.0
        centred = self.sumsq - 2.0 * theta.mu * self.sum + self.n * theta.mu * theta.mu
        return self.n * (math.log(theta.sigma) + LOG_SQRT_2PI) + centred / (2.0 * theta.sigma**2)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ClassHistogram):
            return NotImplemented
        return (
            self.n == other.n
            and self.sum == other.sum
            and self.sumsq == other.sumsq
            and np.array_equal(self.bins, other.bins)
        )

    def __repr__(self) -> str:
        return f"ClassHistogram({self.name!r}, n={self.n}, sum={self.sum}, sumsq={self.sumsq})"


@njit(cache=True)
def data_term(g, mu1, sigma1, mu2, sigma2):
    """(g−μ₂)²/2σ₂² − (g−μ₁)²/2σ₁² + log(σ₂/σ₁) para un nivel de gris."""
    return (
        (g - mu2) * (g - mu2) / (2.0 * sigma2 * sigma2)
        - (g - mu1) * (g - mu1) / (2.0 * sigma1 * sigma1)
        + math.log(sigma2 / sigma1)
    )


@njit(cache=True)
def _data_term_array(g, mu1, sigma1, mu2, sigma2, out):
    for i in range(g.size):
        out[i] = data_term(g[i], mu1, sigma1, mu2, sigma2)


def speed_term(g, th1: GaussianParams, th2: GaussianParams):
    """
    Término de datos del flujo de gradiente para el nivel de gris ``g``.

    Positivo cuando Ω₁ explica mejor el vóxel (φ crece hacia Ω₁). Acepta
    escalares o arrays.
    """
    if np.ndim(g) == 0:
        return float(data_term(float(g), th1.mu, th1.sigma, th2.mu, th2.sigma))
    g = np.asarray(g, dtype=np.float64)
    flat = np.ascontiguousarray(g).ravel()
    out = np.empty(flat.size, dtype=np.float64)
    _data_term_array(flat, th1.mu, th1.sigma, th2.mu, th2.sigma, out)
    return out.reshape(g.shape)
