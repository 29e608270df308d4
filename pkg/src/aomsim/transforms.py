"""Mode transforms: the AOM rotation family, its flawed cousin, and audits.

An acousto-optic device couples a low-frequency input path to a
high-frequency one. With a classical (c-number) acoustic field the whole
interaction collapses to two parameters: a dimensionless pulse area theta
and a phase phi carried by the coupling. The device then rotates the two
input modes into two output modes:

    in_low  ->  cos(theta) out_low  - i e^{+i phi} sin(theta) out_high
    in_high ->  cos(theta) out_high - i e^{-i phi} sin(theta) out_low

which is unitary for every (theta, phi). The flawed variant that this
package exists to refute maps *both* inputs to the same equal superposition
of the outputs, which no unitary can do; ``isometry_report`` quantifies the
defect through the Gram matrix of the columns.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    CompositionError,
    EmptyStateError,
    FormatError,
    InvalidParamsError,
    ModeCollisionError,
)
from .states import Ket, ModeLabel, PhotonState, PRUNE_THRESHOLD, _as_ket, _build

Matrix = tuple[tuple[complex, ...], ...]

DEFAULT_AUDIT_TOLERANCE = 1e-12


def _validate_ports(in_low: ModeLabel, in_high: ModeLabel,
                    out_low: ModeLabel, out_high: ModeLabel) -> None:
    if in_high.freq != in_low.freq + 1:
        raise InvalidParamsError(
            "in_high must sit one frequency step above in_low "
            f"(got {in_low.freq} -> {in_high.freq})"
        )
    if out_high.freq != out_low.freq + 1:
        raise InvalidParamsError(
            "out_high must sit one frequency step above out_low "
            f"(got {out_low.freq} -> {out_high.freq})"
        )
    ports = (in_low, in_high, out_low, out_high)
    if len(set(ports)) != 4:
        raise InvalidParamsError(f"port labels must be pairwise distinct, got {ports}")


@dataclass(frozen=True)
class AOMParams:
    """Pulse area, coupling phase, and the four port labels of one device."""

    theta: float
    phi: float
    in_low: ModeLabel
    in_high: ModeLabel
    out_low: ModeLabel
    out_high: ModeLabel

    def __post_init__(self):
        _validate_ports(self.in_low, self.in_high, self.out_low, self.out_high)

    @classmethod
    def from_coupling(cls, g: complex, acoustic_amplitude: complex, t: float,
                      in_low: ModeLabel, in_high: ModeLabel,
                      out_low: ModeLabel, out_high: ModeLabel,
                      hbar: float = 1.0) -> "AOMParams":
        """Fold a coupling constant, acoustic amplitude, and interaction time
        into the two parameters that actually matter: theta = |g*b|*t/hbar
        and phi = arg(g*b)."""
        product = complex(g) * complex(acoustic_amplitude)
        return cls(
            theta=abs(product) * t / hbar,
            phi=cmath.phase(product),
            in_low=in_low, in_high=in_high,
            out_low=out_low, out_high=out_high,
        )


@dataclass(frozen=True)
class ModeTransform:
    """Linear map from input mode labels to superpositions of output labels.

    ``matrix`` is stored row-major with rows indexed by ``outputs`` and
    columns by ``inputs``; column j is the image of inputs[j].
    """

    inputs: tuple[ModeLabel, ...]
    outputs: tuple[ModeLabel, ...]
    matrix: Matrix

    def __post_init__(self):
        if len(set(self.inputs)) != len(self.inputs):
            raise InvalidParamsError(f"duplicate input labels: {self.inputs}")
        if len(set(self.outputs)) != len(self.outputs):
            raise InvalidParamsError(f"duplicate output labels: {self.outputs}")
        if len(self.matrix) != len(self.outputs):
            raise InvalidParamsError(
                f"matrix has {len(self.matrix)} rows, expected {len(self.outputs)}"
            )
        for row in self.matrix:
            if len(row) != len(self.inputs):
                raise InvalidParamsError(
                    f"matrix row has {len(row)} columns, expected {len(self.inputs)}"
                )

    def column(self, label: ModeLabel) -> list[complex]:
        j = self.inputs.index(label)
        return [row[j] for row in self.matrix]


@dataclass(frozen=True)
class IsometryReport:
    """Result of auditing a transform against M^dagger M = I."""

    gram_deviation: float
    is_isometry: bool
    is_unitary: bool
    worst_pair_overlap: complex

    def to_dict(self) -> dict:
        return {
            "gram_deviation": self.gram_deviation,
            "is_isometry": self.is_isometry,
            "is_unitary": self.is_unitary,
            "worst_pair_overlap": [
                self.worst_pair_overlap.real,
                self.worst_pair_overlap.imag,
            ],
        }


def _freeze(rows: Sequence[Sequence[complex]]) -> Matrix:
    return tuple(tuple(complex(v) for v in row) for row in rows)


def _adjoint(m: Sequence[Sequence[complex]]) -> list[list[complex]]:
    return [[m[i][j].conjugate() for i in range(len(m))] for j in range(len(m[0]))]


def _mat_mul(a: Sequence[Sequence[complex]], b: Sequence[Sequence[complex]]) -> list[list[complex]]:
    return [
        [sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
        for i in range(len(a))
    ]


def _identity_deviation(m: Sequence[Sequence[complex]]) -> float:
    return max(
        abs(m[i][j] - (1.0 if i == j else 0.0))
        for i in range(len(m))
        for j in range(len(m[0]))
    )


def aom_evolution(p: AOMParams) -> ModeTransform:
    """The finite-time device rotation for pulse area theta and phase phi."""
    c = math.cos(p.theta)
    s = math.sin(p.theta)
    phase = cmath.exp(1j * p.phi)
    matrix = _freeze([
        [c, -1j * s * phase.conjugate()],
        [-1j * s * phase, c],
    ])
    return ModeTransform(
        inputs=(p.in_low, p.in_high),
        outputs=(p.out_low, p.out_high),
        matrix=matrix,
    )


def balanced_aom(phi: float, second_leg_phase: float,
                 in_low: ModeLabel, in_high: ModeLabel,
                 out_low: ModeLabel, out_high: ModeLabel) -> ModeTransform:
    """50/50 device (theta = pi/4) with an extra phase on the in_high column.

    The column phase is a presentation convention, not physics: it cannot
    change the Gram matrix, so the result stays unitary for any value.
    """
    base = aom_evolution(AOMParams(math.pi / 4, phi, in_low, in_high, out_low, out_high))
    leg = cmath.exp(1j * second_leg_phase)
    matrix = _freeze([[row[0], row[1] * leg] for row in base.matrix])
    return ModeTransform(base.inputs, base.outputs, matrix)


def flawed_aom(in_low: ModeLabel, in_high: ModeLabel,
               out_low: ModeLabel, out_high: ModeLabel) -> ModeTransform:
    """The non-unitary map that sends both inputs to the same superposition.

    Kept solely as a refutation target: its two columns are identical, so
    orthogonal inputs land on the same output state.
    """
    _validate_ports(in_low, in_high, out_low, out_high)
    h = 1.0 / math.sqrt(2.0)
    return ModeTransform(
        inputs=(in_low, in_high),
        outputs=(out_low, out_high),
        matrix=_freeze([[h, h], [h, h]]),
    )


def identity_transform(labels: Iterable[ModeLabel],
                       outputs: Iterable[ModeLabel] | None = None) -> ModeTransform:
    """Identity map, optionally relabeling each input to a new output."""
    ins = tuple(_as_ket(labels))
    outs = ins if outputs is None else tuple(_as_ket(outputs))
    if len(outs) != len(ins):
        raise InvalidParamsError("identity relabeling needs one output per input")
    n = len(ins)
    matrix = _freeze([[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)])
    return ModeTransform(ins, outs, matrix)


def isometry_report(m: ModeTransform, tol: float = DEFAULT_AUDIT_TOLERANCE) -> IsometryReport:
    """Audit M^dagger M (and M M^dagger when square) against the identity."""
    if tol <= 0:
        raise InvalidParamsError("audit tolerance must be positive")
    gram = _mat_mul(_adjoint(m.matrix), list(map(list, m.matrix)))
    deviation = _identity_deviation(gram)
    k = len(gram)
    worst = 0j
    for i in range(k):
        for j in range(k):
            if i != j and abs(gram[i][j]) > abs(worst):
                worst = gram[i][j]
    is_isometry = deviation <= tol
    square = len(m.inputs) == len(m.outputs)
    is_unitary = False
    if square and is_isometry:
        completeness = _mat_mul(list(map(list, m.matrix)), _adjoint(m.matrix))
        is_unitary = _identity_deviation(completeness) <= tol
    return IsometryReport(
        gram_deviation=deviation,
        is_isometry=is_isometry,
        is_unitary=is_unitary,
        worst_pair_overlap=worst,
    )


def apply_transform(m: ModeTransform, s: PhotonState) -> PhotonState:
    """Substitute every slot whose label is an input of ``m``.

    The transform acts on modes, not on chosen photons: in each ket, every
    slot carrying an input label is expanded into the label's image
    superposition, and all other slots pass through. Output labels must not
    collide with labels the transform leaves untouched, since that would
    silently merge physically distinct modes.
    """
    column_of = {label: j for j, label in enumerate(m.inputs)}
    untouched = {
        label
        for ket in s.amplitudes
        for label in ket
        if label not in column_of
    }
    collisions = untouched.intersection(m.outputs)
    if collisions:
        raise ModeCollisionError(
            f"output labels {sorted(collisions)} already occur on slots the "
            "transform does not act on"
        )

    result: dict[Ket, complex] = {}

    def expand(ket: Ket, amp: complex, slot: int, prefix: list[ModeLabel]):
        if slot == len(ket):
            key = tuple(prefix)
            result[key] = result.get(key, 0j) + amp
            return
        label = ket[slot]
        j = column_of.get(label)
        if j is None:
            prefix.append(label)
            expand(ket, amp, slot + 1, prefix)
            prefix.pop()
            return
        for r, out_label in enumerate(m.outputs):
            coeff = m.matrix[r][j]
            if abs(coeff) <= PRUNE_THRESHOLD:
                continue
            prefix.append(out_label)
            expand(ket, amp * coeff, slot + 1, prefix)
            prefix.pop()

    for ket, amp in s.amplitudes.items():
        expand(ket, amp, 0, [])

    if not any(abs(a) > PRUNE_THRESHOLD for a in result.values()):
        raise EmptyStateError("transform annihilated the state")
    return _build(s.n_slots, result)


def compose(first: ModeTransform, second: ModeTransform) -> ModeTransform:
    """Chain two transforms; applying the result equals first-then-second."""
    if second.inputs != first.outputs:
        raise CompositionError(
            f"second transform expects inputs {second.inputs}, "
            f"but first produces {first.outputs}"
        )
    matrix = _freeze(_mat_mul(list(map(list, second.matrix)), list(map(list, first.matrix))))
    return ModeTransform(first.inputs, second.outputs, matrix)


# --- JSON interchange -------------------------------------------------------

def transform_to_dict(m: ModeTransform) -> dict:
    return {
        "inputs": [[lab.spatial, lab.freq] for lab in m.inputs],
        "outputs": [[lab.spatial, lab.freq] for lab in m.outputs],
        "matrix": [[[v.real, v.imag] for v in row] for row in m.matrix],
    }


def _parse_labels(raw, where: str) -> tuple[ModeLabel, ...]:
    if not isinstance(raw, list) or not raw:
        raise FormatError(f"{where}: expected a nonempty list of [spatial, freq] pairs")
    labels = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, list) or len(entry) != 2:
            raise FormatError(f"{where}[{i}]: expected [spatial, freq]")
        try:
            labels.append(ModeLabel(entry[0], entry[1]))
        except FormatError as exc:
            raise FormatError(f"{where}[{i}]: {exc}") from None
    return tuple(labels)


def transform_from_dict(doc: dict) -> ModeTransform:
    """Parse the JSON transform format (row-major, rows = outputs)."""
    if not isinstance(doc, dict):
        raise FormatError("transform document: expected a JSON object")
    inputs = _parse_labels(doc.get("inputs"), "inputs")
    outputs = _parse_labels(doc.get("outputs"), "outputs")
    raw_matrix = doc.get("matrix")
    if not isinstance(raw_matrix, list) or len(raw_matrix) != len(outputs):
        raise FormatError(f"matrix: expected {len(outputs)} rows")
    rows = []
    for i, raw_row in enumerate(raw_matrix):
        if not isinstance(raw_row, list) or len(raw_row) != len(inputs):
            raise FormatError(f"matrix[{i}]: expected {len(inputs)} entries")
        row = []
        for j, entry in enumerate(raw_row):
            if not isinstance(entry, list) or len(entry) != 2:
                raise FormatError(f"matrix[{i}][{j}]: expected [re, im]")
            re, im = entry
            for part in (re, im):
                if isinstance(part, bool) or not isinstance(part, (int, float)):
                    raise FormatError(f"matrix[{i}][{j}]: expected numbers")
                if not math.isfinite(part):
                    raise FormatError(f"matrix[{i}][{j}]: entries must be finite")
            row.append(complex(re, im))
        rows.append(row)
    try:
        return ModeTransform(inputs, outputs, _freeze(rows))
    except InvalidParamsError as exc:
        raise FormatError(str(exc)) from None
