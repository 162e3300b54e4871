"""FFT engine, complex polynomial arithmetic and graph circular convolution.

The FFT handles any length: powers of two go through an iterative radix-2
Cooley-Tukey pass, everything else through Bluestein's chirp-z reduction to
a power-of-two transform.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .graph_model import CharPoly, GraphSignal, Rep, SpectralDecomposition, apply_polynomial

TRIM_TOL = 1e-12
SCHOOLBOOK_MAX = 16

_cache_lock = threading.Lock()
_radix2_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}
_chirp_cache: dict[int, tuple[np.ndarray, np.ndarray, int]] = {}


def _radix2_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    tables = _radix2_cache.get(n)
    if tables is None:
        bits = n.bit_length() - 1
        idx = np.arange(n)
        rev = np.zeros(n, dtype=np.int64)
        for b in range(bits):
            rev |= ((idx >> b) & 1) << (bits - 1 - b)
        twiddle = np.exp(-2j * np.pi * np.arange(n // 2) / n)
        with _cache_lock:
            tables = _radix2_cache.setdefault(n, (rev, twiddle))
    return tables


def _fft_radix2(x: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    rev, twiddle = _radix2_tables(n)
    x = x[rev]
    half = 1
    while half < n:
        tw = twiddle[:: n // (2 * half)][:half]
        blocks = x.reshape(-1, 2 * half)
        even = blocks[:, :half]
        odd = blocks[:, half:] * tw
        x = np.concatenate((even + odd, even - odd), axis=1).reshape(-1)
        half *= 2
    return x


def _chirp_tables(n: int) -> tuple[np.ndarray, np.ndarray, int]:
    tables = _chirp_cache.get(n)
    if tables is None:
        m = 1 << (2 * n - 1).bit_length()
        k = np.arange(n)
        # reduce k^2 mod 2n before scaling to keep the phase accurate
        chirp = np.exp(-1j * np.pi * ((k * k) % (2 * n)) / n)
        kernel = np.zeros(m, dtype=complex)
        kernel[:n] = np.conj(chirp)
        if n > 1:
            kernel[-(n - 1):] = np.conj(chirp[1:])[::-1]
        kernel_hat = _fft_radix2(kernel)
        with _cache_lock:
            tables = _chirp_cache.setdefault(n, (chirp, kernel_hat, m))
    return tables


def _fft_bluestein(x: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    chirp, kernel_hat, m = _chirp_tables(n)
    a = np.zeros(m, dtype=complex)
    a[:n] = x * chirp
    conv = _fft_radix2(a) * kernel_hat
    # inverse radix-2 via conjugation
    conv = np.conj(_fft_radix2(np.conj(conv))) / m
    return conv[:n] * chirp


def fft(values, inverse: bool = False) -> np.ndarray:
    """Discrete Fourier transform ``X_k = sum_n x_n exp(-2j pi k n / L)``.

    ``inverse=True`` computes ``x_n = (1/L) sum_k X_k exp(+2j pi k n / L)``.
    """
    x = np.asarray(values, dtype=complex).reshape(-1)
    n = x.shape[0]
    if n == 0:
        raise InputError("fft needs at least one sample")
    if inverse:
        return np.conj(fft(np.conj(x))) / n
    if n & (n - 1) == 0:
        return _fft_radix2(x)
    return _fft_bluestein(x)


@dataclass(frozen=True)
class Poly:
    """Complex polynomial, ``coeffs[k]`` multiplies ``x**k``.

    Trailing coefficients below ``1e-12 * max|coeff|`` are trimmed; the zero
    polynomial has no coefficients and degree -1.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex, copy=True).reshape(-1)
        if c.size:
            cutoff = TRIM_TOL * np.max(np.abs(c))
            nz = np.nonzero(np.abs(c) > cutoff)[0]
            c = c[: nz[-1] + 1] if nz.size else c[:0]
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        out = np.zeros_like(x)
        for c in self.coeffs[::-1]:
            out = out * x + c
        return out

    def __mul__(self, other: "Poly") -> "Poly":
        return poly_mul(self, other)

    def __mod__(self, modulus) -> "Poly":
        return poly_mod(self, modulus)

    def padded(self, length: int) -> np.ndarray:
        out = np.zeros(max(length, self.coeffs.size), dtype=complex)
        out[: self.coeffs.size] = self.coeffs
        return out


def _as_poly(a) -> Poly:
    return a if isinstance(a, Poly) else Poly(a)


def poly_mul(a, b) -> Poly:
    """Product of two polynomials (schoolbook when small, FFT otherwise)."""
    a, b = _as_poly(a), _as_poly(b)
    if a.degree < 0 or b.degree < 0:
        return Poly([])
    length = a.coeffs.size + b.coeffs.size - 1
    if length < SCHOOLBOOK_MAX:
        return Poly(np.convolve(a.coeffs, b.coeffs))
    size = 1 << (length - 1).bit_length()
    fa = fft(np.concatenate((a.coeffs, np.zeros(size - a.coeffs.size))))
    fb = fft(np.concatenate((b.coeffs, np.zeros(size - b.coeffs.size))))
    return Poly(fft(fa * fb, inverse=True)[:length])


def poly_mod(a, modulus) -> Poly:
    """Remainder of ``a`` divided by a monic ``modulus`` (synthetic division)."""
    a = _as_poly(a)
    if isinstance(modulus, CharPoly):
        m = modulus.coeffs.astype(complex)
    else:
        m = np.asarray(modulus.coeffs if isinstance(modulus, Poly) else modulus, dtype=complex)
    if m.size < 2 or m[-1] != 1:
        raise InputError("modulus must be monic with degree >= 1")
    deg = m.size - 1
    if a.degree < deg:
        return a
    r = a.coeffs.copy()
    for k in range(r.size - 1, deg - 1, -1):
        lead = r[k]
        if lead != 0:
            r[k - deg : k] -= lead * m[:deg]
        r[k] = 0
    return Poly(r[:deg])


def _same_model(s: GraphSignal, t: GraphSignal) -> SpectralDecomposition:
    if s.model is not t.model:
        raise InputError("signals live on different models")
    return s.model


CONV_METHODS = ("fft", "matrix", "spectral")


def convolve(model, s: GraphSignal, t: GraphSignal, method: str = "fft") -> GraphSignal:
    """Graph circular convolution ``t (*) s = P_t(A) P_s(A) delta_0``.

    ``fft``: multiply the impulse representations with the FFT and reduce mod
    the characteristic polynomial.  ``matrix``: apply the two polynomial
    filters to ``delta_0`` by Horner's rule.  ``spectral``: inverse GFT of
    ``sqrt(N) t_hat * s_hat``.  Inputs may be in any representation; the
    result is a vertex signal.
    """
    from .companion import to_representation
    from .graph_model import vertex_impulse

    d = _same_model(s, t)
    if model is not None:
        md = getattr(model, "decomp", model)
        if md is not d:
            raise InputError("signals are not expressed against the given model")
    if method == "fft":
        ps = Poly(to_representation(s, Rep.IMPULSE).values)
        pt = Poly(to_representation(t, Rep.IMPULSE).values)
        pu = poly_mod(poly_mul(ps, pt), d.char_poly)
        out = to_representation(GraphSignal(pu.padded(d.n), Rep.IMPULSE, d), Rep.VERTEX)
        return GraphSignal(out.values, Rep.VERTEX, d, {"method": method})
    if method == "matrix":
        ps = to_representation(s, Rep.IMPULSE).values
        pt = to_representation(t, Rep.IMPULSE).values
        delta = vertex_impulse(d).values
        u = apply_polynomial(d.shift, pt, apply_polynomial(d.shift, ps, delta))
        return GraphSignal(u, Rep.VERTEX, d, {"method": method})
    if method == "spectral":
        sh = to_representation(s, Rep.SPECTRUM).values
        th = to_representation(t, Rep.SPECTRUM).values
        u = d.gft_inv @ (math.sqrt(d.n) * th * sh)
        return GraphSignal(u, Rep.VERTEX, d, {"method": method})
    raise InputError(f"unknown convolution method {method!r}; choose from {CONV_METHODS}")


def filter_from_signal(model, s: GraphSignal) -> np.ndarray:
    """Coefficients ``p`` of the LSI filter whose impulse response is ``s``."""
    from .companion import to_representation

    if model is not None and getattr(model, "decomp", model) is not s.model:
        raise InputError("signal is not expressed against the given model")
    if s.rep is not Rep.VERTEX:
        raise InputError("filter_from_signal expects a vertex signal")
    return to_representation(s, Rep.IMPULSE).values.copy()
