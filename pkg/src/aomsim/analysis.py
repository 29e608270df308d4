"""Reduced density matrices and entanglement diagnostics for small systems.

Everything here runs on the sparse states of :mod:`aomsim.states`; matrices
stay tiny (the scheme this package audits never exceeds a 4x4 reduced
state), so the eigensolver is a self-contained cyclic Jacobi iteration and
no numerical library is required.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    BipartitionError,
    ComparisonError,
    NonHermitianError,
    NormalizationError,
)
from .states import Ket, PhotonState

MatrixRows = list[list[complex]]

HERMITIAN_TOLERANCE = 1e-10
# Jacobi sweeps stop once the off-diagonal Frobenius mass falls below this
# (scaled up for matrices with Frobenius norm above 1).
JACOBI_OFFDIAG_TARGET = 1e-14
_MAX_JACOBI_SWEEPS = 100
MAX_EIGEN_DIM = 64


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian trace-one operator on a kept subset of photon slots.

    ``basis`` lists only reduced kets with nonzero support, ordered
    lexicographically by (spatial token, frequency index), so serialized
    matrices are deterministic.
    """

    kept_slots: tuple[int, ...]
    basis: tuple[Ket, ...]
    matrix: tuple[tuple[complex, ...], ...]

    def trace(self) -> float:
        return sum(self.matrix[i][i].real for i in range(len(self.basis)))

    def to_dict(self) -> dict:
        return {
            "kept_slots": list(self.kept_slots),
            "basis": [[[lab.spatial, lab.freq] for lab in ket] for ket in self.basis],
            "matrix": [[[v.real, v.imag] for v in row] for row in self.matrix],
        }


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Descending singular values of a bipartite coefficient matrix."""

    values: tuple[float, ...]


def _check_bipartition(n_slots: int, subset: Iterable[int], what: str) -> tuple[int, ...]:
    chosen = tuple(sorted(set(subset)))
    if not chosen:
        raise BipartitionError(f"{what} must not be empty")
    if any(i < 0 or i >= n_slots for i in chosen):
        raise BipartitionError(f"{what} {chosen} names slots outside 0..{n_slots - 1}")
    if len(chosen) == n_slots:
        raise BipartitionError(f"{what} must leave at least one slot out")
    return chosen


def _require_normalized(s: PhotonState, what: str) -> None:
    if not s.normalized:
        raise NormalizationError(f"{what} requires a normalized state")


def pure_density_matrix(s: PhotonState) -> DensityMatrix:
    """|s><s| over all slots, for analyses that trace nothing out."""
    _require_normalized(s, "pure_density_matrix")
    basis = tuple(sorted(s.amplitudes))
    matrix = tuple(
        tuple(s.amplitudes[row] * s.amplitudes[col].conjugate() for col in basis)
        for row in basis
    )
    return DensityMatrix(tuple(range(s.n_slots)), basis, matrix)


def partial_trace(s: PhotonState, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every slot not in ``keep`` from the pure state |s><s|."""
    _require_normalized(s, "partial_trace")
    kept = _check_bipartition(s.n_slots, keep, "kept slot set")
    discarded = tuple(i for i in range(s.n_slots) if i not in kept)

    # group terms by the discarded part; only equal environments survive
    groups: dict[Ket, list[tuple[Ket, complex]]] = {}
    for ket, amp in s.amplitudes.items():
        env = tuple(ket[i] for i in discarded)
        reduced = tuple(ket[i] for i in kept)
        groups.setdefault(env, []).append((reduced, amp))

    support = sorted({reduced for terms in groups.values() for reduced, _ in terms})
    index = {ket: i for i, ket in enumerate(support)}
    n = len(support)
    rho: MatrixRows = [[0j] * n for _ in range(n)]
    for terms in groups.values():
        for ket_row, amp_row in terms:
            for ket_col, amp_col in terms:
                rho[index[ket_row]][index[ket_col]] += amp_row * amp_col.conjugate()
    return DensityMatrix(kept, tuple(support), tuple(tuple(row) for row in rho))


def schmidt(s: PhotonState, left: Iterable[int]) -> SchmidtSpectrum:
    """Singular values of the state's coefficient matrix across a bipartition."""
    _require_normalized(s, "schmidt")
    left_slots = _check_bipartition(s.n_slots, left, "left slot set")
    right_slots = tuple(i for i in range(s.n_slots) if i not in left_slots)

    rows = sorted({tuple(k[i] for i in left_slots) for k in s.amplitudes})
    cols = sorted({tuple(k[i] for i in right_slots) for k in s.amplitudes})
    row_of = {k: i for i, k in enumerate(rows)}
    col_of = {k: i for i, k in enumerate(cols)}
    coeff: MatrixRows = [[0j] * len(cols) for _ in rows]
    for ket, amp in s.amplitudes.items():
        r = row_of[tuple(ket[i] for i in left_slots)]
        c = col_of[tuple(ket[i] for i in right_slots)]
        coeff[r][c] += amp

    # singular values via the smaller Gram matrix
    if len(rows) <= len(cols):
        gram = [
            [
                sum(coeff[i][k] * coeff[j][k].conjugate() for k in range(len(cols)))
                for j in range(len(rows))
            ]
            for i in range(len(rows))
        ]
    else:
        gram = [
            [
                sum(coeff[k][i].conjugate() * coeff[k][j] for k in range(len(rows)))
                for j in range(len(cols))
            ]
            for i in range(len(cols))
        ]
    eigenvalues = hermitian_eigenvalues(gram)
    values = tuple(math.sqrt(max(ev, 0.0)) for ev in eigenvalues)
    return SchmidtSpectrum(values)


def entropy(sp: SchmidtSpectrum) -> float:
    """Entanglement entropy in bits, with 0 log 0 taken as 0."""
    total = 0.0
    for v in sp.values:
        p = v * v
        if p > 0.0:
            total -= p * math.log2(p)
    return total


def _split_positions(rho: DensityMatrix, transpose_side: Iterable[int]) -> tuple[list[int], list[int]]:
    side = tuple(sorted(set(transpose_side)))
    if not side:
        raise BipartitionError("transpose side must not be empty")
    if any(slot not in rho.kept_slots for slot in side):
        raise BipartitionError(
            f"transpose side {side} is not a subset of kept slots {rho.kept_slots}"
        )
    if len(side) == len(rho.kept_slots):
        raise BipartitionError("transpose side must leave at least one kept slot out")
    a_pos = [i for i, slot in enumerate(rho.kept_slots) if slot in side]
    b_pos = [i for i, slot in enumerate(rho.kept_slots) if slot not in side]
    return a_pos, b_pos


def partial_transpose(rho: DensityMatrix, transpose_side: Iterable[int]) -> MatrixRows:
    """Transpose the chosen side's indices; returns a Hermitian matrix.

    The output lives on the product of the side factors seen in the support
    basis, which may be larger than the support itself (off-support entries
    are zero).
    """
    a_pos, b_pos = _split_positions(rho, transpose_side)

    def split(ket: Ket) -> tuple[Ket, Ket]:
        return tuple(ket[i] for i in a_pos), tuple(ket[i] for i in b_pos)

    a_parts = sorted({split(k)[0] for k in rho.basis})
    b_parts = sorted({split(k)[1] for k in rho.basis})
    entry = {}
    for i, row_ket in enumerate(rho.basis):
        ra, rb = split(row_ket)
        for j, col_ket in enumerate(rho.basis):
            ca, cb = split(col_ket)
            entry[(ra, rb, ca, cb)] = rho.matrix[i][j]

    dim = len(a_parts) * len(b_parts)
    out: MatrixRows = [[0j] * dim for _ in range(dim)]
    for i, (ra, rb) in enumerate((a, b) for a in a_parts for b in b_parts):
        for j, (ca, cb) in enumerate((a, b) for a in a_parts for b in b_parts):
            # transposing the A side swaps its row and column indices
            out[i][j] = entry.get((ca, rb, ra, cb), 0j)
    return out


def negativity(rho: DensityMatrix, transpose_side: Iterable[int]) -> float:
    """Sum of |negative eigenvalues| of the partial transpose.

    Equal to (trace norm - 1)/2 and zero iff separable for 2x2 and 2x3
    dimensional bipartitions; for larger local dimensions a zero value is
    only a necessary separability condition, not proof.
    """
    eigenvalues = hermitian_eigenvalues(partial_transpose(rho, transpose_side))
    return -sum((ev for ev in eigenvalues if ev < 0.0), 0.0)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """(1/2) * sum |eigenvalues(a - b)| over the union of the two bases."""
    if a.kept_slots != b.kept_slots:
        raise ComparisonError(
            f"density matrices keep different slots: {a.kept_slots} vs {b.kept_slots}"
        )
    basis = sorted(set(a.basis) | set(b.basis))
    index = {ket: i for i, ket in enumerate(basis)}
    n = len(basis)
    diff: MatrixRows = [[0j] * n for _ in range(n)]
    for source, sign in ((a, 1.0), (b, -1.0)):
        for i, row_ket in enumerate(source.basis):
            for j, col_ket in enumerate(source.basis):
                diff[index[row_ket]][index[col_ket]] += sign * source.matrix[i][j]
    return 0.5 * sum(abs(ev) for ev in hermitian_eigenvalues(diff))


def hermitian_eigenvalues(matrix: Sequence[Sequence[complex]],
                          hermitian_tol: float = HERMITIAN_TOLERANCE) -> list[float]:
    """Real eigenvalues of a Hermitian matrix, descending, via cyclic Jacobi.

    Raises NonHermitianError when the input is not square or deviates from
    its own adjoint by more than ``hermitian_tol``.
    """
    n = len(matrix)
    if n == 0:
        return []
    if any(len(row) != n for row in matrix):
        raise NonHermitianError("matrix is not square")
    if n > MAX_EIGEN_DIM:
        raise ValueError(f"matrix dimension {n} exceeds the supported {MAX_EIGEN_DIM}")
    for i in range(n):
        for j in range(i, n):
            if abs(complex(matrix[i][j]) - complex(matrix[j][i]).conjugate()) > hermitian_tol:
                raise NonHermitianError(
                    f"matrix deviates from Hermitian symmetry at entry ({i}, {j})"
                )

    # symmetrize away representation noise, then rotate
    a: MatrixRows = [
        [0.5 * (complex(matrix[i][j]) + complex(matrix[j][i]).conjugate()) for j in range(n)]
        for i in range(n)
    ]
    frobenius = math.sqrt(sum(abs(v) ** 2 for row in a for v in row))
    target = JACOBI_OFFDIAG_TARGET * max(1.0, frobenius)

    def off_mass() -> float:
        return math.sqrt(
            sum(abs(a[i][j]) ** 2 for i in range(n) for j in range(n) if i != j)
        )

    for _ in range(_MAX_JACOBI_SWEEPS):
        if off_mass() <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                if abs(apq) <= target / max(1, n):
                    continue
                phase = apq / abs(apq)
                app = a[p][p].real
                aqq = a[q][q].real
                tau = (aqq - app) / (2.0 * abs(apq))
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # unitary plane rotation: column p mixes with phase-adjusted column q
                for i in range(n):
                    aip = a[i][p]
                    aiq = a[i][q]
                    a[i][p] = aip * c - aiq * s * phase.conjugate()
                    a[i][q] = aip * s + aiq * c * phase.conjugate()
                for j in range(n):
                    apj = a[p][j]
                    aqj = a[q][j]
                    a[p][j] = c * apj - s * phase * aqj
                    a[q][j] = s * apj + c * phase * aqj
    else:
        if off_mass() > target:
            raise ArithmeticError("Jacobi eigensolver failed to converge")

    return sorted((a[i][i].real for i in range(n)), reverse=True)
