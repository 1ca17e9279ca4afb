"""Truncated real Fourier series on [0, 2 pi)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_MODES = 64
TAIL_TOL = 1e-12


@dataclass(frozen=True)
class FourierSeries:
    """``a0 + sum_j a[j-1] cos(j t) + b[j-1] sin(j t)``."""

    a0: float
    a: np.ndarray = field(default_factory=lambda: np.zeros(0))
    b: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        m = max(a.size, b.size)
        a = np.pad(a, (0, m - a.size))
        b = np.pad(b, (0, m - b.size))
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def modes(self) -> int:
        return self.a.size

    @property
    def highest_mode(self) -> int:
        """Largest j with a non-negligible coefficient."""
        mag = np.hypot(self.a, self.b)
        big = np.nonzero(mag > 1e-15 * max(abs(self.a0), mag.max(initial=0.0)))[0]
        return int(big[-1] + 1) if big.size else 0

    def __call__(self, t, deriv: int = 0):
        t = np.asarray(t, dtype=float)
        j = np.arange(1, self.modes + 1)
        if self.modes == 0:
            return np.full(t.shape, self.a0 if deriv == 0 else 0.0)
        jt = np.multiply.outer(t, j)
        c, s = np.cos(jt), np.sin(jt)
        # d^k/dt^k of cos/sin cycles with period 4
        k = deriv % 4
        fac = j.astype(float) ** deriv
        if k == 0:
            val = c @ (fac * self.a) + s @ (fac * self.b)
        elif k == 1:
            val = -s @ (fac * self.a) + c @ (fac * self.b)
        elif k == 2:
            val = -c @ (fac * self.a) - s @ (fac * self.b)
        else:
            val = s @ (fac * self.a) - c @ (fac * self.b)
        if deriv == 0:
            val = val + self.a0
        return val

    def scaled(self, c: float) -> "FourierSeries":
        return FourierSeries(c * self.a0, c * self.a, c * self.b)

    @classmethod
    def constant(cls, value: float) -> "FourierSeries":
        return cls(value)

    @classmethod
    def cosine(cls, mean: float, amplitude: float, mode: int) -> "FourierSeries":
        a = np.zeros(mode)
        a[mode - 1] = amplitude
        return cls(mean, a)

    @classmethod
    def from_samples(cls, values, modes: int = DEFAULT_MODES, tail_tol: float = TAIL_TOL) -> "FourierSeries":
        """Coefficients from samples on the uniform grid ``2 pi k / M``.

        Raises ValueError when the discarded tail exceeds ``tail_tol`` of the
        leading coefficient.
        """
        v = np.asarray(values, dtype=float)
        M = v.size
        c = np.fft.rfft(v) / M
        a0 = c[0].real
        a = 2 * c[1:].real
        b = -2 * c[1:].imag
        if M % 2 == 0:
            a[-1] /= 2
            b[-1] = 0.0
        lead = max(abs(a0), np.abs(c[1:]).max(initial=0.0))
        tail = np.hypot(a[modes:], b[modes:])
        if tail.size and tail.max() > tail_tol * lead:
            raise ValueError(f"Fourier tail {tail.max():.3g} exceeds {tail_tol:g} of leading coefficient; "
                             f"increase modes above {modes}")
        return cls(a0, a[:modes], b[:modes])

    @classmethod
    def from_function(cls, f, modes: int = DEFAULT_MODES, oversample: int = 4,
                      tail_tol: float = TAIL_TOL) -> "FourierSeries":
        M = 2 * oversample * modes
        t = 2 * np.pi * np.arange(M) / M
        return cls.from_samples(f(t), modes, tail_tol)

    def trimmed(self) -> "FourierSeries":
        m = self.highest_mode
        return FourierSeries(self.a0, self.a[:m], self.b[:m])

    def to_dict(self) -> dict:
        t = self.trimmed()
        return {"a0": t.a0, "a": t.a.tolist(), "b": t.b.tolist()}

    @classmethod
    def from_dict(cls, obj: dict, max_modes: int = DEFAULT_MODES) -> "FourierSeries":
        fs = cls(obj["a0"], obj.get("a", []), obj.get("b", []))
        if fs.modes > max_modes:
            tail = np.hypot(fs.a[max_modes:], fs.b[max_modes:])
            if tail.max() > TAIL_TOL * abs(fs.a0):
                raise ValueError("Fourier data beyond the stored modes is not negligible")
            fs = cls(fs.a0, fs.a[:max_modes], fs.b[:max_modes])
        return fs
