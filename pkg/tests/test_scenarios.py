"""End-to-end swap-scheme runs for both device models, checked against the
dense-matrix oracle in dense_oracle.py."""

import math

import numpy as np
import pytest

import dense_oracle

from aomsim import (
    EmptySelectionError,
    InvalidParamsError,
    ModeLabel,
    SchemeWiring,
    StructureError,
    align_device_regions,
    aom_factor_overlap,
    apply_transform,
    build_scheme_transforms,
    build_source_states,
    entropy,
    identity_transform,
    inner_product,
    isometry_report,
    make_state,
    no_signaling_check,
    normalize,
    partial_trace,
    post_select,
    run_swap,
    run_swap_details,
    schmidt,
    signaling_distance,
    single_ket,
    tensor,
)

H = 1.0 / math.sqrt(2.0)

# Regression constant for the flawed device: bystander-pair trace distance
# with no post-selection. Derived once by `python tests/dense_oracle.py`.
FLAWED_SIGNALING_DISTANCE = 0.25

REGION1 = frozenset({ModeLabel("T1'", 0), ModeLabel("T1", 1)})
REGION2 = frozenset({ModeLabel("T2", 0), ModeLabel("T2'", 1)})


def transformed_state(kind, phi1=0.0, phi2=0.0):
    wiring = build_scheme_transforms(kind, phi1, phi2)
    state = tensor(wiring.source1, wiring.source2)
    return wiring, apply_transform(wiring.aom2, apply_transform(wiring.aom1, state))


# --- sources ---------------------------------------------------------------------

def test_sources_are_maximally_entangled():
    pair1, pair2 = build_source_states()
    for pair in (pair1, pair2):
        assert pair.normalized
        assert len(pair) == 2
        spectrum = schmidt(pair, left=(0,))
        assert np.allclose(spectrum.values, [H, H], atol=1e-12)
        assert entropy(spectrum) == pytest.approx(1.0, abs=1e-12)
        assert inner_product(pair, pair) == pytest.approx(1.0, abs=1e-12)


def test_source_labels_follow_the_figure():
    pair1, pair2 = build_source_states()
    assert set(pair1.amplitudes) == {
        (ModeLabel("1", 0), ModeLabel("2", 1)),
        (ModeLabel("1'", 1), ModeLabel("2'", 0)),
    }
    assert set(pair2.amplitudes) == {
        (ModeLabel("3", 0), ModeLabel("4", 1)),
        (ModeLabel("3'", 1), ModeLabel("4'", 0)),
    }


# --- wiring ----------------------------------------------------------------------

def test_correct_wiring_sign_pattern():
    wiring = build_scheme_transforms("correct")
    image2 = apply_transform(wiring.aom1, single_ket([("2", 1)]))
    assert image2.amplitudes[(ModeLabel("T1'", 0),)] == pytest.approx(H, abs=1e-15)
    assert image2.amplitudes[(ModeLabel("T1", 1),)] == pytest.approx(1j * H, abs=1e-15)
    image3 = apply_transform(wiring.aom1, single_ket([("3", 0)]))
    assert image3.amplitudes[(ModeLabel("T1'", 0),)] == pytest.approx(H, abs=1e-15)
    assert image3.amplitudes[(ModeLabel("T1", 1),)] == pytest.approx(-1j * H, abs=1e-15)
    image3p = apply_transform(wiring.aom2, single_ket([("3'", 1)]))
    assert image3p.amplitudes[(ModeLabel("T2", 0),)] == pytest.approx(H, abs=1e-15)
    assert image3p.amplitudes[(ModeLabel("T2'", 1),)] == pytest.approx(1j * H, abs=1e-15)
    image2p = apply_transform(wiring.aom2, single_ket([("2'", 0)]))
    assert image2p.amplitudes[(ModeLabel("T2", 0),)] == pytest.approx(H, abs=1e-15)
    assert image2p.amplitudes[(ModeLabel("T2'", 1),)] == pytest.approx(-1j * H, abs=1e-15)


def test_correct_wiring_is_unitary():
    wiring = build_scheme_transforms("correct", 0.4, 1.9)
    assert isometry_report(wiring.aom1).is_unitary
    assert isometry_report(wiring.aom2).is_unitary


def test_flawed_wiring_images_are_identical():
    wiring = build_scheme_transforms("flawed")
    a = apply_transform(wiring.aom1, single_ket([("2", 1)]))
    b = apply_transform(wiring.aom1, single_ket([("3", 0)]))
    assert a.amplitudes == b.amplitudes


def test_unknown_kind_rejected():
    with pytest.raises(InvalidParamsError):
        build_scheme_transforms("sideways")


# --- expansion and post-selection ---------------------------------------------------

def test_transformed_state_has_sixteen_quarter_weight_kets():
    _, after = transformed_state("correct")
    assert len(after) == 16
    for amp in after.amplitudes.values():
        assert abs(amp) == pytest.approx(0.25, abs=1e-12)
    assert after.norm() == pytest.approx(1.0, abs=1e-12)


def test_post_selection_keeps_half_the_weight():
    _, after = transformed_state("correct")
    kept, probability = post_select(after, REGION1, REGION2)
    assert probability == pytest.approx(0.5, abs=1e-12)
    assert len(kept) == 8
    assert kept.norm() == pytest.approx(H, abs=1e-12)


def test_discarded_kets_are_exactly_the_double_occupancy_ones():
    _, after = transformed_state("correct")
    kept, _ = post_select(after, REGION1, REGION2)
    discarded = set(after.amplitudes) - set(kept.amplitudes)
    assert discarded
    for ket in discarded:
        n1 = sum(1 for lab in ket if lab in REGION1)
        n2 = sum(1 for lab in ket if lab in REGION2)
        assert (n1, n2) in {(2, 0), (0, 2)}


def test_post_selection_on_untransformed_state_is_empty():
    pair1, pair2 = build_source_states()
    with pytest.raises(EmptySelectionError):
        post_select(tensor(pair1, pair2), REGION1, REGION2)


# --- region alignment ----------------------------------------------------------------

def test_alignment_swaps_only_cross_region_kets():
    s = make_state([
        ((ModeLabel("1", 0), ModeLabel("T2", 0), ModeLabel("T1", 1), ModeLabel("4", 1)), 0.6),
        ((ModeLabel("1", 0), ModeLabel("T1", 1), ModeLabel("T2", 0), ModeLabel("4", 1)), 0.8),
    ])
    aligned = align_device_regions(s, REGION1, REGION2)
    # both kets land on the region-ordered one and their amplitudes add
    assert len(aligned) == 1
    key = (ModeLabel("1", 0), ModeLabel("T1", 1), ModeLabel("T2", 0), ModeLabel("4", 1))
    assert aligned.amplitudes[key] == pytest.approx(1.4, abs=1e-12)


def test_alignment_leaves_double_occupancy_kets_alone():
    key = (ModeLabel("1", 0), ModeLabel("T1", 1), ModeLabel("T1'", 0), ModeLabel("4", 1))
    s = make_state([(key, 1.0)])
    aligned = align_device_regions(s, REGION1, REGION2)
    assert aligned.amplitudes == {key: 1.0 + 0j}


def test_alignment_preserves_the_scheme_norm():
    for kind in ("correct", "flawed"):
        _, after = transformed_state(kind)
        assert align_device_regions(after, REGION1, REGION2).norm() == pytest.approx(
            after.norm(), abs=1e-12)


# --- factor overlap -------------------------------------------------------------------

def test_factor_overlap_vanishes_for_the_unitary_devices():
    _, after = transformed_state("correct")
    kept, _ = post_select(after, REGION1, REGION2)
    selected, _ = normalize(align_device_regions(kept, REGION1, REGION2))
    assert abs(aom_factor_overlap(selected)) <= 1e-12


def test_factor_overlap_is_one_for_the_flawed_map():
    _, after = transformed_state("flawed")
    kept, _ = post_select(after, REGION1, REGION2)
    selected, _ = normalize(align_device_regions(kept, REGION1, REGION2))
    assert aom_factor_overlap(selected) == pytest.approx(1.0 + 0j, abs=1e-12)


def test_factor_overlap_vanishes_for_every_phase_choice():
    rng = np.random.default_rng(211)
    for _ in range(25):
        phi1, phi2 = rng.uniform(0.0, 2.0 * math.pi, 2)
        _, after = transformed_state("correct", phi1, phi2)
        kept, _ = post_select(after, REGION1, REGION2)
        selected, _ = normalize(kept)
        assert abs(aom_factor_overlap(selected)) <= 1e-12


def test_factor_overlap_rejects_unselected_states():
    _, after = transformed_state("correct")
    with pytest.raises(StructureError):
        aom_factor_overlap(after)


def test_factor_overlap_rejects_single_branch_states():
    s = make_state([
        ((ModeLabel("1", 0), ModeLabel("T1", 1), ModeLabel("T2", 0), ModeLabel("4", 1)), 1.0),
    ])
    with pytest.raises(StructureError):
        aom_factor_overlap(s)


# --- reduced bystander-pair states ------------------------------------------------------

def test_postselected_state_is_maximally_entangled_across_the_pair_cut():
    _, selected = run_swap_details("correct")
    spectrum = schmidt(selected, left=(0, 3))
    assert np.allclose(spectrum.values, [H, H], atol=1e-12)


def test_unitary_run_leaves_the_pair_in_an_equal_classical_mixture():
    _, selected = run_swap_details("correct")
    rho = partial_trace(selected, keep=(0, 3))
    assert rho.basis == (
        (ModeLabel("1", 0), ModeLabel("4'", 0)),
        (ModeLabel("1'", 1), ModeLabel("4", 1)),
    )
    matrix = np.array(rho.matrix)
    assert np.allclose(matrix, np.eye(2) / 2.0, atol=1e-12)


def test_flawed_run_fabricates_a_bell_pair():
    report, selected = run_swap_details("flawed")
    rho = partial_trace(selected, keep=(0, 3))
    matrix = np.array(rho.matrix)
    assert np.allclose(matrix, np.full((2, 2), 0.5), atol=1e-12)
    assert report.rho14_eigenvalues[0] == pytest.approx(1.0, abs=1e-12)


# --- full reports ------------------------------------------------------------------------

def test_correct_report_shows_no_swapping():
    report = run_swap("correct")
    assert report.norm_after_aoms == pytest.approx(1.0, abs=1e-12)
    assert report.postselect_probability == pytest.approx(0.5, abs=1e-12)
    assert abs(report.factor_overlap) <= 1e-12
    assert report.rho14_negativity == pytest.approx(0.0, abs=1e-12)
    assert report.nosignal_trace_distance <= 1e-12
    assert report.swapping_verdict is False


def test_flawed_report_reproduces_the_refuted_claim():
    report = run_swap("flawed")
    assert report.postselect_probability == pytest.approx(0.5, abs=1e-12)
    assert report.factor_overlap == pytest.approx(1.0 + 0j, abs=1e-12)
    assert report.rho14_negativity == pytest.approx(0.5, abs=1e-12)
    assert report.swapping_verdict is True
    assert report.nosignal_trace_distance == pytest.approx(
        FLAWED_SIGNALING_DISTANCE, abs=1e-12)


def test_flawed_wiring_preserves_norm_anyway():
    # each slot only ever carries one of a device's two input modes, so the
    # column collapse never bites the state norm; the defect shows up in the
    # Gram audit and the signaling distance instead
    report = run_swap("flawed")
    assert report.norm_after_aoms == pytest.approx(1.0, abs=1e-12)


def test_verdict_is_phase_covariant():
    rng = np.random.default_rng(223)
    for _ in range(50):
        phi1, phi2 = rng.uniform(0.0, 2.0 * math.pi, 2)
        report = run_swap("correct", phi1, phi2)
        assert report.swapping_verdict is False
        assert report.rho14_negativity == pytest.approx(0.0, abs=1e-10)


def test_reports_match_the_dense_oracle():
    rng = np.random.default_rng(227)
    cases = [("correct", 0.0, 0.0), ("flawed", 0.0, 0.0)]
    cases += [("correct", *rng.uniform(0.0, 2.0 * math.pi, 2)) for _ in range(5)]
    for kind, phi1, phi2 in cases:
        report = run_swap(kind, phi1, phi2)
        expected = dense_oracle.run_scheme(kind == "flawed", phi1, phi2)
        assert report.norm_after_aoms == pytest.approx(
            expected["norm_after"], abs=1e-12)
        assert report.postselect_probability == pytest.approx(
            expected["postselect_probability"], abs=1e-12)
        assert report.nosignal_trace_distance == pytest.approx(
            expected["nosignal_trace_distance"], abs=1e-12)
        assert report.rho14_negativity == pytest.approx(
            expected["rho14_negativity"], abs=1e-12)
        got_eigenvalues = [ev for ev in report.rho14_eigenvalues if abs(ev) > 1e-13]
        assert np.allclose(got_eigenvalues, expected["rho14_eigenvalues"], atol=1e-12)


# --- signaling audit ----------------------------------------------------------------------

def test_unitary_devices_never_signal():
    rng = np.random.default_rng(229)
    for _ in range(50):
        phi1, phi2 = rng.uniform(0.0, 2.0 * math.pi, 2)
        assert no_signaling_check("correct", phi1, phi2) <= 1e-12


def test_flawed_devices_signal_by_a_quarter():
    distance = no_signaling_check("flawed")
    assert distance > 1e-3
    assert distance == pytest.approx(FLAWED_SIGNALING_DISTANCE, abs=1e-12)


def test_identity_devices_give_exactly_zero_distance():
    pair1, pair2 = build_source_states()
    wiring = SchemeWiring(
        source1=pair1,
        source2=pair2,
        aom1=identity_transform([("3", 0), ("2", 1)]),
        aom2=identity_transform([("2'", 0), ("3'", 1)]),
    )
    assert signaling_distance(wiring) == 0.0
