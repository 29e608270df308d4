"""Sparse multi-photon pure states over labeled frequency/path modes.

A single-photon mode is a (spatial path, frequency index) pair; frequencies
live on an exact integer grid (index k means the photon carries the base
frequency plus k detuning steps), so mode labels compare exactly and can key
dictionaries. An n-photon basis ket is an ordered tuple of n labels, one slot
per photon; photons are distinguishable by slot. States are sparse complex
superpositions over such kets.

All values here are immutable once built; every operation returns a new
state.
"""

from __future__ import annotations

import math
from collections import namedtuple
from dataclasses import dataclass, field
from typing import Iterable

from .errors import (
    DimensionMismatchError,
    EmptyStateError,
    FormatError,
    NormalizationError,
)

# Amplitudes at or below this magnitude are dropped when states are built.
PRUNE_THRESHOLD = 1e-15
# A state counts as normalized when |<s|s> - 1| is at most this.
NORM_TOLERANCE = 1e-12


class ModeLabel(namedtuple("ModeLabel", ["spatial", "freq"])):
    """One single-photon mode: a spatial path token and a frequency index.

    Frequency indices are exact integers (index k means k detuning steps
    above the base frequency), so labels compare exactly and sort
    lexicographically by (spatial, freq).
    """

    __slots__ = ()

    def __new__(cls, spatial: str, freq: int):
        if not isinstance(spatial, str) or not spatial:
            raise FormatError(f"mode spatial token must be a nonempty string, got {spatial!r}")
        if isinstance(freq, bool) or not isinstance(freq, int):
            raise FormatError(f"mode frequency index must be an integer, got {freq!r}")
        return super().__new__(cls, spatial, freq)


Ket = tuple[ModeLabel, ...]


def _as_ket(ket: Iterable) -> Ket:
    """Coerce an iterable of labels / (spatial, freq) pairs into a Ket."""
    out = []
    for entry in ket:
        if isinstance(entry, ModeLabel):
            out.append(entry)
        else:
            spatial, freq = entry
            out.append(ModeLabel(spatial, freq))
    return tuple(out)


@dataclass(frozen=True)
class PhotonState:
    """Sparse superposition over fixed-length basis kets.

    ``amplitudes`` maps each ket to its complex amplitude; kets with
    magnitude at or below PRUNE_THRESHOLD are never stored. ``normalized``
    records whether the squared norm is 1 within NORM_TOLERANCE.
    """

    n_slots: int
    amplitudes: dict[Ket, complex] = field(repr=False)
    normalized: bool

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def terms(self) -> list[tuple[Ket, complex]]:
        """Amplitude terms in deterministic (lexicographic ket) order."""
        return sorted(self.amplitudes.items())

    def __len__(self) -> int:
        return len(self.amplitudes)


def _build(n_slots: int, raw: dict[Ket, complex]) -> PhotonState:
    amps = {k: complex(a) for k, a in raw.items() if abs(a) > PRUNE_THRESHOLD}
    if not amps:
        raise EmptyStateError("all amplitudes vanished; the state is empty")
    norm_sq = sum(abs(a) ** 2 for a in amps.values())
    return PhotonState(n_slots, amps, abs(norm_sq - 1.0) <= NORM_TOLERANCE)


def make_state(terms: Iterable[tuple[Iterable, complex]]) -> PhotonState:
    """Build a state from (ket, amplitude) pairs.

    Duplicate kets are merged by amplitude addition, near-zero amplitudes
    are pruned, and the normalized flag is computed. Raises
    DimensionMismatchError on mixed ket lengths and EmptyStateError if
    nothing survives.
    """
    accumulated: dict[Ket, complex] = {}
    n_slots = None
    for ket, amp in terms:
        key = _as_ket(ket)
        if n_slots is None:
            n_slots = len(key)
            if n_slots == 0:
                raise DimensionMismatchError("kets must contain at least one mode")
        elif len(key) != n_slots:
            raise DimensionMismatchError(
                f"mixed ket lengths: expected {n_slots} slots, got {len(key)}"
            )
        accumulated[key] = accumulated.get(key, 0j) + complex(amp)
    if n_slots is None:
        raise EmptyStateError("cannot build a state from no terms")
    return _build(n_slots, accumulated)


def single_ket(ket: Iterable, amplitude: complex = 1.0) -> PhotonState:
    """Convenience wrapper for a one-term state."""
    return make_state([(ket, amplitude)])


def tensor(a: PhotonState, b: PhotonState) -> PhotonState:
    """Tensor product: slots of ``b`` are appended after the slots of ``a``."""
    joined = {
        ka + kb: aa * ab
        for ka, aa in a.amplitudes.items()
        for kb, ab in b.amplitudes.items()
    }
    return _build(a.n_slots + b.n_slots, joined)


def inner_product(a: PhotonState, b: PhotonState) -> complex:
    """<a|b>, conjugate-linear in ``a``. Distinct basis kets are orthonormal."""
    if a.n_slots != b.n_slots:
        raise DimensionMismatchError(
            f"slot counts differ: {a.n_slots} vs {b.n_slots}"
        )
    small, large, conj_small = (
        (a, b, True) if len(a) <= len(b) else (b, a, False)
    )
    total = 0j
    for ket, amp in small.amplitudes.items():
        other = large.amplitudes.get(ket)
        if other is None:
            continue
        total += amp.conjugate() * other if conj_small else other.conjugate() * amp
    return total


def normalize(s: PhotonState) -> tuple[PhotonState, float]:
    """Scale to unit norm; returns (normalized state, original norm)."""
    norm = s.norm()
    if norm <= 1e-12:
        raise EmptyStateError("cannot normalize a state of near-zero norm")
    scaled = {k: a / norm for k, a in s.amplitudes.items()}
    return PhotonState(s.n_slots, scaled, True), norm


def equal_up_to_global_phase(a: PhotonState, b: PhotonState, tol: float = 1e-10) -> bool:
    """True when two normalized states differ only by a global phase."""
    if a.n_slots != b.n_slots:
        raise DimensionMismatchError(
            f"slot counts differ: {a.n_slots} vs {b.n_slots}"
        )
    if not (a.normalized and b.normalized):
        raise NormalizationError("both states must be normalized for phase comparison")
    return abs(inner_product(a, b)) >= 1.0 - tol


# --- notation helpers -------------------------------------------------------

def frequency_notation(freq: int) -> str:
    if freq == 0:
        return "ω"
    if freq == 1:
        return "ω+δ"
    if freq == -1:
        return "ω-δ"
    sign = "+" if freq > 0 else "-"
    return f"ω{sign}{abs(freq)}δ"


def ket_notation(ket: Iterable) -> str:
    """Render a ket in standard bra-ket notation, e.g. |ω+δ⟩_{1'}|ω⟩_{2}."""
    parts = []
    for label in _as_ket(ket):
        parts.append(f"|{frequency_notation(label.freq)}⟩_{{{label.spatial}}}")
    return "".join(parts)


def state_notation(s: PhotonState) -> str:
    """Render a full state as a signed sum of kets, sorted for determinism."""
    pieces = []
    for ket, amp in s.terms():
        pieces.append(f"({amp.real:+.6f}{amp.imag:+.6f}i) {ket_notation(ket)}")
    return "\n".join(pieces)


# --- JSON interchange -------------------------------------------------------

def state_to_dict(s: PhotonState) -> dict:
    """Serializable form: {"n_slots": n, "terms": [{"ket": ..., "amp": [re, im]}]}."""
    return {
        "n_slots": s.n_slots,
        "terms": [
            {
                "ket": [[lab.spatial, lab.freq] for lab in ket],
                "amp": [amp.real, amp.imag],
            }
            for ket, amp in s.terms()
        ],
    }


def _require_finite(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FormatError(f"{where}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise FormatError(f"{where}: amplitude components must be finite")
    return float(value)


def state_from_dict(doc: dict) -> PhotonState:
    """Parse the JSON state format, rejecting mixed ket lengths and NaNs."""
    if not isinstance(doc, dict):
        raise FormatError("state document: expected a JSON object")
    n_slots = doc.get("n_slots")
    if isinstance(n_slots, bool) or not isinstance(n_slots, int) or n_slots < 1:
        raise FormatError("n_slots: expected a positive integer")
    raw_terms = doc.get("terms")
    if not isinstance(raw_terms, list) or not raw_terms:
        raise FormatError("terms: expected a nonempty list")
    pairs = []
    for i, term in enumerate(raw_terms):
        if not isinstance(term, dict):
            raise FormatError(f"terms[{i}]: expected an object")
        ket = term.get("ket")
        if not isinstance(ket, list):
            raise FormatError(f"terms[{i}].ket: expected a list of [spatial, freq] pairs")
        if len(ket) != n_slots:
            raise FormatError(
                f"terms[{i}].ket: expected {n_slots} modes, found {len(ket)}"
            )
        labels = []
        for j, entry in enumerate(ket):
            if not isinstance(entry, list) or len(entry) != 2:
                raise FormatError(f"terms[{i}].ket[{j}]: expected [spatial, freq]")
            try:
                labels.append(ModeLabel(entry[0], entry[1]))
            except FormatError as exc:
                raise FormatError(f"terms[{i}].ket[{j}]: {exc}") from None
        amp = term.get("amp")
        if not isinstance(amp, list) or len(amp) != 2:
            raise FormatError(f"terms[{i}].amp: expected [re, im]")
        re = _require_finite(amp[0], f"terms[{i}].amp")
        im = _require_finite(amp[1], f"terms[{i}].amp")
        pairs.append((tuple(labels), complex(re, im)))
    return make_state(pairs)
