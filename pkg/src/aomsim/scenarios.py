"""End-to-end audit of the AOM entanglement-swapping proposal.

Two frequency-entangled photon pairs are produced by separate sources.
Photon 2 and photon 3 each feed one port of a shared device pair (device 1
takes photon 2's high-frequency path and photon 3's low-frequency path;
device 2 takes the complementary pair of paths), while photons 1 and 4
never interact with anything. The runner pushes the four-photon state
through either the correct unitary device rotation or the flawed
equal-superposition map, post-selects on one photon exiting each device,
and reports whether photons 1 and 4 ended up entangled, plus a no-signaling
audit on the unselected state.

Photon bookkeeping note: photons are stored in fixed slots (1, 2, 3, 4).
After the devices act, the photon that exited device 1 may sit in slot 2 in
one branch and slot 3 in another, even though the physical situation (one
photon per device output region) is the same. ``align_device_regions``
rewrites such kets so the device-1 photon always precedes the device-2
photon, which is what makes amplitude comparison between branches mean the
same thing as comparing the light in the output beams. Kets where both
photons sit in the same region are left untouched; post-selection removes
them anyway.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .analysis import hermitian_eigenvalues, negativity, partial_trace, trace_distance
from .errors import EmptySelectionError, InvalidParamsError, StructureError
from .states import (
    Ket,
    ModeLabel,
    PhotonState,
    _build,
    inner_product,
    make_state,
    normalize,
    tensor,
)
from .transforms import ModeTransform, apply_transform, balanced_aom, flawed_aom

# figure-fixed wiring: device 1 couples photon 2's high path with photon 3's
# low path; device 2 couples photon 3's high path with photon 2's low path
DEVICE1_IN_LOW = ModeLabel("3", 0)
DEVICE1_IN_HIGH = ModeLabel("2", 1)
DEVICE1_OUT_LOW = ModeLabel("T1'", 0)
DEVICE1_OUT_HIGH = ModeLabel("T1", 1)
DEVICE2_IN_LOW = ModeLabel("2'", 0)
DEVICE2_IN_HIGH = ModeLabel("3'", 1)
DEVICE2_OUT_LOW = ModeLabel("T2", 0)
DEVICE2_OUT_HIGH = ModeLabel("T2'", 1)

# ket ordering inside the 4-photon states: slots 0..3 hold photons 1..4
PAIR_SLOTS = (0, 3)
SWAP_VERDICT_THRESHOLD = 1e-6


@dataclass(frozen=True)
class SchemeWiring:
    """Sources plus the two device transforms, with their output regions."""

    source1: PhotonState
    source2: PhotonState
    aom1: ModeTransform
    aom2: ModeTransform

    @property
    def region1(self) -> frozenset[ModeLabel]:
        return frozenset(self.aom1.outputs)

    @property
    def region2(self) -> frozenset[ModeLabel]:
        return frozenset(self.aom2.outputs)


@dataclass(frozen=True)
class SwapReport:
    """Scenario verdict: all quantities the refutation rests on."""

    transform_kind: str
    norm_after_aoms: float
    postselect_probability: float
    factor_overlap: complex
    rho14_negativity: float
    rho14_eigenvalues: list[float]
    nosignal_trace_distance: float
    swapping_verdict: bool

    def to_dict(self, tool_version: str, tolerance: float) -> dict:
        return {
            "transform_kind": self.transform_kind,
            "norm_after_aoms": self.norm_after_aoms,
            "postselect_probability": self.postselect_probability,
            "factor_overlap": [self.factor_overlap.real, self.factor_overlap.imag],
            "rho14_negativity": self.rho14_negativity,
            "rho14_eigenvalues": [round(ev, 12) for ev in self.rho14_eigenvalues],
            "nosignal_trace_distance": self.nosignal_trace_distance,
            "swapping_verdict": self.swapping_verdict,
            "tool_version": tool_version,
            "tolerance": tolerance,
        }


def build_source_states() -> tuple[PhotonState, PhotonState]:
    """The two maximally frequency/path entangled pairs feeding the scheme."""
    h = 1.0 / math.sqrt(2.0)
    pair1 = make_state([
        ((("1", 0), ("2", 1)), h),
        ((("1'", 1), ("2'", 0)), h),
    ])
    pair2 = make_state([
        ((("3", 0), ("4", 1)), h),
        ((("3'", 1), ("4'", 0)), h),
    ])
    return pair1, pair2


def build_scheme_transforms(kind: str, phi1: float = 0.0, phi2: float = 0.0) -> SchemeWiring:
    """Wire up the scheme with either the unitary or the flawed devices.

    The correct kind uses the balanced rotation with a quarter-turn phase on
    the high-frequency leg, which at phi1 = phi2 = 0 gives the sign pattern
    (+i on photon 2's converted leg, -i on photon 3's) the audit expects.
    """
    source1, source2 = build_source_states()
    if kind == "correct":
        aom1 = balanced_aom(phi1, math.pi / 2,
                            DEVICE1_IN_LOW, DEVICE1_IN_HIGH,
                            DEVICE1_OUT_LOW, DEVICE1_OUT_HIGH)
        aom2 = balanced_aom(phi2, math.pi / 2,
                            DEVICE2_IN_LOW, DEVICE2_IN_HIGH,
                            DEVICE2_OUT_LOW, DEVICE2_OUT_HIGH)
    elif kind == "flawed":
        aom1 = flawed_aom(DEVICE1_IN_LOW, DEVICE1_IN_HIGH,
                          DEVICE1_OUT_LOW, DEVICE1_OUT_HIGH)
        aom2 = flawed_aom(DEVICE2_IN_LOW, DEVICE2_IN_HIGH,
                          DEVICE2_OUT_LOW, DEVICE2_OUT_HIGH)
    else:
        raise InvalidParamsError(f"unknown transform kind {kind!r}")
    return SchemeWiring(source1, source2, aom1, aom2)


def _region_positions(ket: Ket, region1: frozenset[ModeLabel],
                      region2: frozenset[ModeLabel]) -> tuple[list[int], list[int]]:
    pos1 = [i for i, label in enumerate(ket) if label in region1]
    pos2 = [i for i, label in enumerate(ket) if label in region2]
    return pos1, pos2


def align_device_regions(s: PhotonState, region1: frozenset[ModeLabel],
                         region2: frozenset[ModeLabel]) -> PhotonState:
    """Canonically order the slots holding the two device-output photons.

    For every ket with exactly one label in each output region, the slot
    carrying the region-1 label is moved before the slot carrying the
    region-2 label (a swap of those two slots). Other kets pass through
    unchanged. This makes branch amplitudes comparable by beam content
    rather than by which source photon happened to travel where.
    """
    out: dict[Ket, complex] = {}
    for ket, amp in s.amplitudes.items():
        pos1, pos2 = _region_positions(ket, region1, region2)
        if len(pos1) == 1 and len(pos2) == 1 and pos1[0] > pos2[0]:
            swapped = list(ket)
            swapped[pos1[0]], swapped[pos2[0]] = swapped[pos2[0]], swapped[pos1[0]]
            key = tuple(swapped)
        else:
            key = ket
        out[key] = out.get(key, 0j) + amp
    return _build(s.n_slots, out)


def post_select(s: PhotonState, region1: frozenset[ModeLabel],
                region2: frozenset[ModeLabel]) -> tuple[PhotonState, float]:
    """Keep kets with exactly one photon in each device output region.

    Returns the (unnormalized) surviving state and the selection
    probability relative to the input norm. Raises EmptySelectionError when
    nothing survives.
    """
    kept = {}
    for ket, amp in s.amplitudes.items():
        pos1, pos2 = _region_positions(ket, region1, region2)
        if len(pos1) == 1 and len(pos2) == 1:
            kept[ket] = amp
    if not kept:
        raise EmptySelectionError("post-selection removed every term")
    total = sum(abs(a) ** 2 for a in s.amplitudes.values())
    survived = sum(abs(a) ** 2 for a in kept.values())
    return _build(s.n_slots, kept), survived / total


def aom_factor_overlap(post_selected: PhotonState,
                       region1: frozenset[ModeLabel] | None = None,
                       region2: frozenset[ModeLabel] | None = None) -> complex:
    """Overlap of the device-output states conditioned on the two branches.

    The post-selected state must split into exactly two components over the
    non-device slots (the photons that never met a device). Each component
    fixes a state of the light in the device output regions; those two
    states are normalized and their inner product returned, with slots
    aligned by region so the comparison is beam-against-beam. Zero overlap
    means the branches are perfectly distinguishable by the device light, so
    tracing it out leaves no coherence between the bystander photons.
    """
    if region1 is None:
        region1 = frozenset((DEVICE1_OUT_LOW, DEVICE1_OUT_HIGH))
    if region2 is None:
        region2 = frozenset((DEVICE2_OUT_LOW, DEVICE2_OUT_HIGH))

    branches: dict[tuple, dict[Ket, complex]] = {}
    for ket, amp in post_selected.amplitudes.items():
        pos1, pos2 = _region_positions(ket, region1, region2)
        if len(pos1) != 1 or len(pos2) != 1:
            raise StructureError(
                "state is not post-selected: a ket lacks one photon per region"
            )
        outer = tuple(
            (i, label)
            for i, label in enumerate(ket)
            if i not in (pos1[0], pos2[0])
        )
        middle = (ket[pos1[0]], ket[pos2[0]])
        bucket = branches.setdefault(outer, {})
        bucket[middle] = bucket.get(middle, 0j) + amp
    if len(branches) != 2:
        raise StructureError(
            f"expected exactly 2 bystander components, found {len(branches)}"
        )
    low_key, high_key = sorted(branches)
    factors = []
    for key in (high_key, low_key):
        factor = make_state(list(branches[key].items()))
        factors.append(normalize(factor)[0])
    return inner_product(factors[0], factors[1])


def _pipeline(wiring: SchemeWiring):
    """Shared plumbing: pre-device reduced pair state and transformed state."""
    initial = tensor(wiring.source1, wiring.source2)
    rho_before = partial_trace(initial, PAIR_SLOTS)
    after = apply_transform(wiring.aom2, apply_transform(wiring.aom1, initial))
    return rho_before, after


def signaling_distance(wiring: SchemeWiring) -> float:
    """Trace distance of the bystander pair's state across the devices.

    No post-selection happens here: the transformed state is aligned by
    region, renormalized if the devices lost norm, and the photon-1/photon-4
    density matrix compared against its pre-device value. Any positive
    distance means the device choice alone would signal.
    """
    rho_before, after = _pipeline(wiring)
    aligned = align_device_regions(after, wiring.region1, wiring.region2)
    if not aligned.normalized:
        aligned, _ = normalize(aligned)
    rho_after = partial_trace(aligned, PAIR_SLOTS)
    return trace_distance(rho_before, rho_after)


def no_signaling_check(kind: str, phi1: float = 0.0, phi2: float = 0.0) -> float:
    """Signaling distance for the named transform kind at the given phases."""
    return signaling_distance(build_scheme_transforms(kind, phi1, phi2))


def run_swap_details(kind: str, phi1: float = 0.0,
                     phi2: float = 0.0) -> tuple[SwapReport, PhotonState]:
    """Full scenario run; returns the report plus the post-selected state."""
    wiring = build_scheme_transforms(kind, phi1, phi2)
    _, after = _pipeline(wiring)
    norm_after = after.norm()

    nosignal = signaling_distance(wiring)

    selected_raw, probability = post_select(after, wiring.region1, wiring.region2)
    aligned = align_device_regions(selected_raw, wiring.region1, wiring.region2)
    selected, _ = normalize(aligned)

    overlap = aom_factor_overlap(selected, wiring.region1, wiring.region2)
    rho14 = partial_trace(selected, PAIR_SLOTS)
    neg = negativity(rho14, transpose_side=(PAIR_SLOTS[0],))
    eigenvalues = hermitian_eigenvalues(rho14.matrix)

    report = SwapReport(
        transform_kind=kind,
        norm_after_aoms=norm_after,
        postselect_probability=probability,
        factor_overlap=overlap,
        rho14_negativity=neg,
        rho14_eigenvalues=eigenvalues,
        nosignal_trace_distance=nosignal,
        swapping_verdict=neg > SWAP_VERDICT_THRESHOLD,
    )
    return report, selected


def run_swap(kind: str, phi1: float = 0.0, phi2: float = 0.0) -> SwapReport:
    """Run the scheme end to end and report the swapping verdict."""
    report, _ = run_swap_details(kind, phi1, phi2)
    return report
