"""Exact dense reference: full spectra and spectral-sum ground truths.

Everything here is brute force on the 2^n-dimensional matrix.  The
filtered state ``sin^n(H*tau)|phi0>`` and all quantities derived from it
have closed spectral forms once the overlaps ``c_i = <Psi_i|phi0>`` are
known; these serve as the independent oracle for the circuit and
estimator paths.

Diagonalizations are cached per Hamiltonian digest (they are reused
across hundreds of evolution times and powers).
"""
from __future__ import annotations

import threading
from dataclasses import dataclass

import mpmath
import numpy as np

from .hamiltonian import Hamiltonian, dense_matrix
from .statevector import StateVector

# sin^{2n} underflows float64 for large powers; switch the norm
# accumulation to arbitrary precision beyond this power.
EXTENDED_NORM_POWER = 500

NORM_UNDERFLOW = mpmath.mpf("1e-300")


@dataclass(frozen=True)
class Spectrum:
    """Full eigendecomposition, ascending eigenvalues."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # orthonormal columns, eigenvectors[:, i]
    source_digest: str

    @property
    def dimension(self) -> int:
        return len(self.eigenvalues)


_CACHE: dict[str, Spectrum] = {}
_CACHE_LOCK = threading.Lock()
_CACHE_MAX = 4


def diagonalize(h: Hamiltonian, limit: int = 14) -> Spectrum:
    """Full dense eigendecomposition (cached by operator digest)."""
    digest = h.digest()
    with _CACHE_LOCK:
        if digest in _CACHE:
            return _CACHE[digest]
    mat = dense_matrix(h, limit=limit)
    eigenvalues, eigenvectors = np.linalg.eigh(mat)
    spectrum = Spectrum(eigenvalues, eigenvectors, digest)
    with _CACHE_LOCK:
        if len(_CACHE) >= _CACHE_MAX:
            _CACHE.pop(next(iter(_CACHE)))
        _CACHE[digest] = spectrum
    return spectrum


def clear_cache() -> None:
    with _CACHE_LOCK:
        _CACHE.clear()


def overlaps(phi0: StateVector, spectrum: Spectrum) -> np.ndarray:
    """Overlap coefficients c_i = <Psi_i|phi0>; Parseval: sum |c_i|^2 = 1."""
    if len(phi0.amplitudes) != spectrum.dimension:
        raise ValueError("state dimension does not match spectrum")
    return spectrum.eigenvectors.conj().T @ phi0.amplitudes


def _sin_weights(
    h: Hamiltonian, phi0: StateVector, tau: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray, Spectrum]:
    spectrum = diagonalize(h)
    c = overlaps(phi0, spectrum)
    w2 = np.abs(c) ** 2
    sines = np.sin(spectrum.eigenvalues * tau)
    return c, w2, sines, spectrum


def exact_phi_n(
    h: Hamiltonian, phi0: StateVector, tau: float, n: int
) -> tuple[StateVector, mpmath.mpf]:
    """Normalized ``sin^n(H*tau)|phi0>`` plus its squared norm.

    The norm ``sum |c_i|^2 sin^{2n}(E_i tau)`` is returned as an
    arbitrary-precision value so huge powers cannot underflow silently;
    a norm below 1e-300 is reported as an error.
    """
    if n < 0:
        raise ValueError("power must be nonnegative")
    c, w2, sines, spectrum = _sin_weights(h, phi0, tau)
    norm_sq = _spectral_norm_sq(w2, sines, n)
    if norm_sq < NORM_UNDERFLOW:
        raise ValueError(f"filtered state norm^2 underflow: {mpmath.nstr(norm_sq)}")
    # Scale by the dominant |sin| so the weights stay representable.
    if n == 0:
        scaled = c
    else:
        smax = np.abs(sines).max()  # > 0, else the norm check above fired
        scaled = c * (sines / smax) ** n
    amps = spectrum.eigenvectors @ scaled
    amps /= np.linalg.norm(amps)
    return StateVector(h.n_qubits, amps), norm_sq


def _spectral_norm_sq(w2: np.ndarray, sines: np.ndarray, n: int) -> mpmath.mpf:
    if n <= EXTENDED_NORM_POWER:
        value = float(np.dot(w2, sines ** (2 * n)))
        if value > 1e-280:
            return mpmath.mpf(value)
    with mpmath.workprec(128):
        total = mpmath.mpf(0)
        for weight, s in zip(w2, sines):
            if weight == 0.0 or s == 0.0:
                continue
            total += mpmath.mpf(weight) * mpmath.mpf(s) ** (2 * n)
        return total


def exact_energy_phi_n(h: Hamiltonian, phi0: StateVector, tau: float, n: int) -> float:
    """Energy of the filtered state: ratio of the two spectral sums.

    Evaluated with the dominant sine factored out, so arbitrarily large
    powers stay in range; the result is always inside [min E, max E].
    """
    if n < 0:
        raise ValueError("power must be nonnegative")
    _, w2, sines, spectrum = _sin_weights(h, phi0, tau)
    energies = spectrum.eigenvalues
    if n == 0:
        return float(np.dot(w2, energies))
    smax = np.abs(sines).max()
    if smax == 0.0:
        raise ValueError("sin(H*tau) annihilates every overlapped eigenstate")
    ratios = (sines / smax) ** (2 * n)
    denom = np.dot(w2, ratios)
    if denom < 1e-300:
        raise ValueError("filtered state norm underflow")
    return float(np.dot(w2 * energies, ratios) / denom)


def exact_moments(h: Hamiltonian, phi0: StateVector, tau: float, max_m: int):
    """Spectral-form moment table: c_m = sum |c_i|^2 cos(2 E_i tau m) and
    h_m likewise with an extra E_i factor, for m = 0..max_m."""
    from .sigma import ExactValue, MomentTable  # local: avoid import cycle

    if max_m < 0:
        raise ValueError("max_m must be nonnegative")
    _, w2, _, spectrum = _sin_weights(h, phi0, tau)
    energies = spectrum.eigenvalues
    m = np.arange(max_m + 1)
    cosines = np.cos(2.0 * tau * np.outer(m, energies))  # (m, eigenstate)
    c = cosines @ w2
    hmom = cosines @ (w2 * energies)
    c[0] = 1.0
    hmom[0] = float(np.dot(w2, energies))
    return MomentTable(
        tau=tau,
        c=c,
        h=hmom,
        noise=ExactValue(),
        evolution="oracle-spectral",
    )


def direct_success_probability_exact(
    h: Hamiltonian, phi0: StateVector, tau: float, n: int
) -> float:
    """Probability of n consecutive successful filter measurements:
    ``<phi0| sin^{2n}(H*tau) |phi0>``; equals the phi_n squared norm."""
    if n < 0:
        raise ValueError("power must be nonnegative")
    _, w2, sines, _ = _sin_weights(h, phi0, tau)
    return float(np.dot(w2, sines ** (2 * n)))
