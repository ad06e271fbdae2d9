"""Pauli-string Hamiltonians: algebra, file format, offsetting, dense form.

A Hamiltonian is a real-weighted sum of Pauli strings over ``n_qubits``
qubits.  Terms are kept in a canonical order (sorted by factor set) with
duplicates merged, so parse/serialize round-trips are byte-exact.

Bit-ordering convention, used everywhere in this package: basis state
index ``i`` has binary expansion ``b_{n-1} ... b_1 b_0`` where ``b_q`` is
the state of qubit ``q`` (qubit 0 = least significant bit).  A bitstring
such as ``"11110000"`` lists qubit 0 leftmost.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

AXES = ("X", "Y", "Z")

# Terms whose merged coefficient falls below this are dropped entirely.
COEFF_DROP_TOL = 1e-14

# Largest qubit count for which a dense matrix may be realized.
DEFAULT_ORACLE_LIMIT = 14


class ParseError(ValueError):
    """Malformed Hamiltonian document; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class OracleLimitError(ValueError):
    """Dense realization requested beyond the configured qubit limit."""


@dataclass(frozen=True)
class PauliTerm:
    """One weighted Pauli string, e.g. ``-0.25 * X0 Z2``.

    ``factors`` maps distinct qubit indices to an axis in {X, Y, Z};
    stored as a sorted tuple of (qubit, axis) pairs.  The empty factor
    tuple is the identity term.
    """

    factors: tuple[tuple[int, str], ...]
    coefficient: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.coefficient):
            raise ValueError(f"non-finite coefficient {self.coefficient!r}")
        qubits = [q for q, _ in self.factors]
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"duplicate qubit in factors {self.factors}")
        for q, axis in self.factors:
            if q < 0:
                raise ValueError(f"negative qubit index {q}")
            if axis not in AXES:
                raise ValueError(f"invalid axis {axis!r}")
        object.__setattr__(self, "factors", tuple(sorted(self.factors)))

    @property
    def is_identity(self) -> bool:
        return not self.factors

    def max_qubit(self) -> int:
        return max((q for q, _ in self.factors), default=-1)

    def __str__(self) -> str:
        if self.is_identity:
            return repr(self.coefficient)
        ops = " ".join(f"{axis}{q}" for q, axis in self.factors)
        return f"{self.coefficient!r} {ops}"


class Hamiltonian:
    """Immutable canonical sum of :class:`PauliTerm` over ``n_qubits`` qubits.

    Duplicate factor sets are merged on construction and near-zero terms
    dropped, so two structurally equal operators compare (and serialize)
    identically.  Real coefficients make the operator Hermitian.
    """

    __slots__ = ("n_qubits", "terms", "metadata")

    def __init__(self, n_qubits: int, terms, metadata: dict[str, str] | None = None):
        if n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        merged: dict[tuple, float] = {}
        for term in terms:
            if term.max_qubit() >= n_qubits:
                raise ValueError(
                    f"term {term} uses qubit {term.max_qubit()} "
                    f"but n_qubits={n_qubits}"
                )
            merged[term.factors] = merged.get(term.factors, 0.0) + term.coefficient
        canonical = tuple(
            PauliTerm(factors, coeff)
            for factors, coeff in sorted(merged.items())
            if abs(coeff) >= COEFF_DROP_TOL
        )
        object.__setattr__(self, "n_qubits", n_qubits)
        object.__setattr__(self, "terms", canonical)
        object.__setattr__(self, "metadata", dict(metadata or {}))

    def __setattr__(self, name, value):  # immutable after construction
        raise AttributeError("Hamiltonian is immutable")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Hamiltonian)
            and self.n_qubits == other.n_qubits
            and len(self.terms) == len(other.terms)
            and all(
                a.factors == b.factors and a.coefficient == b.coefficient
                for a, b in zip(self.terms, other.terms)
            )
            and self.metadata == other.metadata
        )

    def __hash__(self):
        return hash(self.digest())

    def __repr__(self):
        return f"Hamiltonian(n_qubits={self.n_qubits}, terms={len(self.terms)})"

    def identity_coefficient(self) -> float:
        for term in self.terms:
            if term.is_identity:
                return term.coefficient
        return 0.0

    def digest(self) -> str:
        """Stable content hash of the operator part (metadata excluded)."""
        blob = f"{self.n_qubits}\n" + "\n".join(str(t) for t in self.terms)
        return hashlib.sha256(blob.encode()).hexdigest()


def parse_hamiltonian(text: str) -> Hamiltonian:
    """Parse the ``.ham`` document format.

    Lines are either blank, metadata (``# key=value``) or a term
    (``<coefficient> [<axis><qubit>]*``); a bare coefficient is the
    identity term.  ``n_qubits`` metadata is required.  All problems are
    reported with their line number.
    """
    metadata: dict[str, str] = {}
    raw_terms: list[tuple[int, PauliTerm]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            body = stripped[1:].strip()
            if not body:
                continue
            if "=" not in body:
                raise ParseError(lineno, f"metadata line without '=': {stripped!r}")
            key, _, value = body.partition("=")
            key = key.strip()
            if key in metadata:
                raise ParseError(lineno, f"duplicate metadata key {key!r}")
            metadata[key] = value.strip()
            continue
        tokens = stripped.split()
        try:
            coeff = float(tokens[0])
        except ValueError:
            raise ParseError(
                lineno, f"coefficient is not a real number: {tokens[0]!r}"
            ) from None
        if not math.isfinite(coeff):
            raise ParseError(lineno, f"non-finite coefficient {tokens[0]!r}")
        factors = []
        for tok in tokens[1:]:
            axis = tok[0].upper()
            if axis not in AXES or len(tok) < 2 or not tok[1:].isdigit():
                raise ParseError(lineno, f"malformed Pauli factor {tok!r}")
            factors.append((int(tok[1:]), axis))
        try:
            raw_terms.append((lineno, PauliTerm(tuple(factors), coeff)))
        except ValueError as exc:
            raise ParseError(lineno, str(exc)) from None

    if "n_qubits" not in metadata:
        raise ParseError(0, "missing required metadata key 'n_qubits'")
    raw_n = metadata.pop("n_qubits")  # promoted to the structural field
    try:
        n_qubits = int(raw_n)
    except ValueError:
        raise ParseError(0, f"n_qubits is not an integer: {raw_n!r}")
    for lineno, term in raw_terms:
        if term.max_qubit() >= n_qubits:
            raise ParseError(
                lineno,
                f"qubit index {term.max_qubit()} out of range for n_qubits={n_qubits}",
            )
    return Hamiltonian(n_qubits, (t for _, t in raw_terms), metadata)


def serialize_hamiltonian(h: Hamiltonian) -> str:
    """Canonical text form; ``parse(serialize(h))`` equals ``h``.

    Coefficients use the shortest representation that round-trips the
    float64 value exactly.  Metadata is emitted with n_qubits first and
    the remaining keys sorted.
    """
    lines = [f"# n_qubits={h.n_qubits}"]
    for key in sorted(k for k in h.metadata if k != "n_qubits"):
        lines.append(f"# {key}={h.metadata[key]}")
    for term in h.terms:
        lines.append(str(term))
    return "\n".join(lines) + "\n"


def offset_hamiltonian(h: Hamiltonian, eps: float) -> Hamiltonian:
    """Add ``eps`` to the identity coefficient, shifting every eigenvalue
    by exactly ``eps`` and leaving all other terms unchanged."""
    if not math.isfinite(eps):
        raise ValueError("offset must be finite")
    terms = list(h.terms) + [PauliTerm((), eps)]
    return Hamiltonian(h.n_qubits, terms, h.metadata)


# Per-axis action on a basis state: X and Y flip the bit, Y and Z pick up
# a bit-dependent sign, Y contributes one factor of i.
def term_masks(term: PauliTerm) -> tuple[int, int, int]:
    """(flip_mask, sign_mask, n_y) encoding of a Pauli string's action:
    ``P|j> = i^n_y * (-1)^popcount(j & sign_mask) |j ^ flip_mask>``."""
    flip = sign = n_y = 0
    for q, axis in term.factors:
        if axis in ("X", "Y"):
            flip |= 1 << q
        if axis in ("Y", "Z"):
            sign |= 1 << q
        if axis == "Y":
            n_y += 1
    return flip, sign, n_y


def dense_matrix(h: Hamiltonian, limit: int = DEFAULT_ORACLE_LIMIT) -> np.ndarray:
    """Dense 2^n x 2^n realization of the operator.

    Each Pauli string has exactly one nonzero entry per column, so the
    matrix is assembled column-wise in O(terms * 2^n).  Hermitian by
    construction (real coefficients, Hermitian strings).
    """
    if h.n_qubits > limit:
        raise OracleLimitError(
            f"dense matrix for {h.n_qubits} qubits exceeds the limit of {limit}"
        )
    dim = 1 << h.n_qubits
    idx = np.arange(dim)
    mat = np.zeros((dim, dim), dtype=complex)
    for term in h.terms:
        flip, sign, n_y = term_masks(term)
        phases = (1j ** n_y) * np.where(
            np.bitwise_count(idx & sign) & 1, -1.0, 1.0
        )
        mat[idx ^ flip, idx] += term.coefficient * phases
    return mat
