"""Spiking engine: model construction, inference, faults, astro coupling."""

import numpy as np
import pytest

from astrocore.astro import AstroParams, initial_state, step
from astrocore.snn import (
    AstroAllocation,
    AstroGroup,
    Dataset,
    EvalHarness,
    FaultSpec,
    LifParams,
    ModelGraph,
    _VecAstro,
    _flip_code_bit,
    accuracy,
    attach_astrocytes,
    build_toy_model,
    infer,
    inject_faults,
    run_batch,
)

# The robust toy recipe used across fault-tolerance tests: redundant input
# copies, one-vs-rest pooled hidden units, very separable blobs.
ROBUST_TOY = dict(hidden_drive=0.3, blob_spread=0.06,
                  feature_hi=0.9, feature_lo=0.1)


@pytest.fixture(scope="module")
def toy16():
    model, ds = build_toy_model((16, 8, 2), 2, seed=0, **ROBUST_TOY)
    return model, ds


def full_layer_allocation(model):
    return AstroAllocation(tuple(
        AstroGroup(l, tuple(range(model.layer_sizes[l])))
        for l in range(model.n_layers - 1)))


# ---------------------------------------------------------------------------
# Construction and validation


def test_lif_params_validation():
    with pytest.raises(ValueError):
        LifParams(v_threshold=0.0, v_reset=0.0)
    with pytest.raises(ValueError):
        LifParams(leak_tau=0.0)
    with pytest.raises(ValueError):
        LifParams(refractory=-1e-3)


def test_model_graph_validation():
    good = dict(layer_sizes=(2, 3), scales=(1.0,))
    ModelGraph(codes=(np.zeros((2, 3)),), **good)
    with pytest.raises(ValueError):
        ModelGraph(codes=(np.zeros((3, 2)),), **good)
    with pytest.raises(ValueError):
        ModelGraph(codes=(np.full((2, 3), 2),), **good)  # 2 is not a level
    with pytest.raises(ValueError):
        ModelGraph(layer_sizes=(2, 3), codes=(np.zeros((2, 3)),),
                   scales=(1.0, 1.0))
    with pytest.raises(ValueError):
        ModelGraph(layer_sizes=(2,), codes=(), scales=())


def test_edge_indexing_round_trip():
    model = ModelGraph(layer_sizes=(3, 4, 2),
                       codes=(np.zeros((3, 4)), np.zeros((4, 2))),
                       scales=(1.0, 1.0))
    assert model.parameter_count == 3 * 4 + 4 * 2
    seen = set()
    for e in range(model.parameter_count):
        layer, pre, post = model.locate_edge(e)
        assert model.edge_block_offset(layer) + pre * model.layer_sizes[layer + 1] + post == e
        seen.add((layer, pre, post))
    assert len(seen) == model.parameter_count
    assert model.layer_edge_ids(1).tolist() == list(range(12, 20))
    with pytest.raises(ValueError):
        model.locate_edge(model.parameter_count)


def test_model_json_round_trip(toy16):
    model, _ = toy16
    faulted = inject_faults(model, FaultSpec(0.1, seed=3))
    text = faulted.to_json()
    back = ModelGraph.from_json(text)
    assert back.layer_sizes == faulted.layer_sizes
    for a, b in zip(back.codes, faulted.codes):
        np.testing.assert_array_equal(a, b)
    assert back.scales == faulted.scales
    assert back.disabled == faulted.disabled
    assert back.baseline_accuracy == faulted.baseline_accuracy
    assert back.faults_applied == faulted.faults_applied
    assert back.to_json() == text


def test_dataset_json_round_trip(toy16):
    _, ds = toy16
    back = Dataset.from_json(ds.to_json())
    np.testing.assert_array_equal(back.train_rates, ds.train_rates)
    np.testing.assert_array_equal(back.eval_labels, ds.eval_labels)
    assert back.n_classes == ds.n_classes


def test_toy_model_canonical_accuracy():
    model, _ = build_toy_model((2, 16, 2), 2, seed=0)
    assert model.baseline_accuracy >= 0.95


def test_toy_model_deterministic():
    m1, d1 = build_toy_model((4, 8, 2), 2, seed=5)
    m2, d2 = build_toy_model((4, 8, 2), 2, seed=5)
    assert m1.to_json() == m2.to_json()
    assert d1.to_json() == d2.to_json()
    m3, d3 = build_toy_model((4, 8, 2), 2, seed=6)
    assert d1.to_json() != d3.to_json()


def test_toy_model_shape_validation():
    with pytest.raises(ValueError):
        build_toy_model((4, 8, 3), 2, seed=0)   # output size != classes
    with pytest.raises(ValueError):
        build_toy_model((4,), 2, seed=0)
    with pytest.raises(ValueError):
        build_toy_model((4, 2), 1, seed=0)


# ---------------------------------------------------------------------------
# Inference behavior


def test_zero_rate_input_predicts_class_zero(toy16):
    model, _ = toy16
    assert infer(model, np.zeros(model.n_inputs), duration_s=0.2, seed=1) == 0


def test_identity_path_drives_matching_class():
    # Deterministic 2 -> 2 identity network: all input spikes transmit
    # (pr0 = 1) and each carries enough weight to fire its output.
    model = ModelGraph(layer_sizes=(2, 2),
                       codes=(np.eye(2, dtype=np.int8),),
                       scales=(2.0,), pr0=1.0)
    hot = model.max_rate_hz
    assert infer(model, [hot, 0.0], duration_s=0.2, seed=0) == 0
    assert infer(model, [0.0, hot], duration_s=0.2, seed=0) == 1


def test_sample_dimension_mismatch(toy16):
    model, _ = toy16
    with pytest.raises(ValueError):
        infer(model, [100.0, 100.0], seed=0)
    with pytest.raises(ValueError):
        run_batch(model, -np.ones((1, model.n_inputs)), 0.1, 0)


def test_run_batch_deterministic(toy16):
    model, ds = toy16
    a = run_batch(model, ds.eval_rates[:8], 0.2, seed=11)
    b = run_batch(model, ds.eval_rates[:8], 0.2, seed=11)
    np.testing.assert_array_equal(a.counts, b.counts)
    c = run_batch(model, ds.eval_rates[:8], 0.2, seed=12)
    assert (a.counts != c.counts).any()


def test_refractory_caps_firing_rate():
    base = dict(layer_sizes=(1, 1), codes=(np.ones((1, 1), dtype=np.int8),),
                scales=(5.0,), pr0=1.0)
    free = ModelGraph(lif=LifParams(), **base)
    capped = ModelGraph(lif=LifParams(refractory=5e-3), **base)
    hot = np.array([[1000.0]])
    n_free = run_batch(free, hot, 0.5, seed=0).counts[0, 0]
    n_capped = run_batch(capped, hot, 0.5, seed=0).counts[0, 0]
    assert n_free == 500                    # fires every step
    assert abs(n_capped - 500 / 6) <= 2     # one spike per 1 + 5 blocked steps


def test_eval_harness_matches_accuracy(toy16):
    model, ds = toy16
    harness = EvalHarness(ds, duration_s=0.2, samples=8)
    assert harness.evaluate(model, seed=4) == accuracy(
        model, ds, 0.2, seed=4, samples=8)


# ---------------------------------------------------------------------------
# Fault injection


def test_flip_code_bit_exhaustive():
    # 2-bit two's complement: -2=10, -1=11, 0=00, 1=01.
    table = {(-2, 0): -1, (-2, 1): 0,
             (-1, 0): -2, (-1, 1): 1,
             (0, 0): 1, (0, 1): -2,
             (1, 0): 0, (1, 1): -1}
    for (code, bit), want in table.items():
        assert _flip_code_bit(code, bit) == want


def test_inject_faults_count_and_distinct(toy16):
    model, _ = toy16
    spec = FaultSpec(0.2, seed=7)
    faulted = inject_faults(model, spec)
    expect = int(0.2 * model.parameter_count)
    assert len(faulted.faults_applied) == expect
    assert len({f.edge_id for f in faulted.faults_applied}) == expect


def test_inject_faults_preserves_original(toy16):
    model, _ = toy16
    before = [b.copy() for b in model.codes]
    inject_faults(model, FaultSpec(1.0, seed=1))
    for a, b in zip(model.codes, before):
        np.testing.assert_array_equal(a, b)
    assert model.disabled == frozenset()


def test_inject_faults_nested_across_rates(toy16):
    model, _ = toy16
    small = inject_faults(model, FaultSpec(0.1, seed=9))
    large = inject_faults(model, FaultSpec(0.3, seed=9))
    small_ids = [f.edge_id for f in small.faults_applied]
    large_ids = [f.edge_id for f in large.faults_applied]
    assert large_ids[:len(small_ids)] == small_ids


def test_stuck_zero_at_full_rate_silences_model(toy16):
    model, ds = toy16
    dead = inject_faults(model, FaultSpec(1.0, kinds=("synapse_stuck_zero",),
                                          seed=2))
    assert all((b == 0).all() for b in dead.codes)
    res = run_batch(dead, ds.eval_rates[:8], 0.2, seed=0)
    assert (res.counts == 0).all()
    assert (res.predictions == 0).all()


def test_zeroed_model_scores_chance_on_balanced_labels(toy16):
    model, ds = toy16
    dead = inject_faults(model, FaultSpec(1.0, kinds=("synapse_stuck_zero",),
                                          seed=2))
    accs = [accuracy(dead, ds, 0.2, seed=s) for s in range(10)]
    assert abs(np.mean(accs) - 0.5) <= 0.1


def test_stuck_off_disables_presynaptic_neuron(toy16):
    model, _ = toy16
    faulted = inject_faults(model, FaultSpec(0.15, kinds=("neuron_stuck_off",),
                                             seed=4))
    assert faulted.disabled
    for f in faulted.faults_applied:
        assert f.kind == "neuron_stuck_off"
        assert f.old_code == f.new_code
        assert faulted.layer_offset(f.layer) + f.pre in faulted.disabled


def test_fault_spec_validation():
    with pytest.raises(ValueError):
        FaultSpec(1.5)
    with pytest.raises(ValueError):
        FaultSpec(0.1, kinds=("no_such_kind",))
    with pytest.raises(ValueError):
        FaultSpec(0.1, kinds=())


def test_accuracy_non_increasing_with_fault_rate(toy16):
    model, ds = toy16
    means = []
    for rate in (0.0, 0.1, 0.5):
        accs = []
        for s in range(10):
            fm = inject_faults(model, FaultSpec(rate, seed=s))
            accs.append(accuracy(fm, ds, 0.5, seed=600 + s))
        means.append(np.mean(accs))
    assert means[1] <= means[0] + 0.005
    assert means[2] <= means[1] + 0.005
    assert means[2] < means[0]


# ---------------------------------------------------------------------------
# Astrocyte coupling


def test_allocation_validation():
    with pytest.raises(ValueError):
        AstroGroup(0, ())
    with pytest.raises(ValueError):
        AstroGroup(0, (1, 1))
    with pytest.raises(ValueError):
        AstroAllocation((AstroGroup(0, (0, 1)), AstroGroup(0, (1, 2))))
    # same members on different layers is fine
    AstroAllocation((AstroGroup(0, (0, 1)), AstroGroup(1, (0, 1))))


def test_attach_validation(toy16):
    model, ds = toy16
    with pytest.raises(ValueError):
        attach_astrocytes(model, AstroAllocation((AstroGroup(2, (0,)),)),
                          calibration_rates=[60.0])
    with pytest.raises(ValueError):
        attach_astrocytes(model, AstroAllocation((AstroGroup(0, (99,)),)),
                          calibration_rates=[60.0])
    with pytest.raises(ValueError):  # needs calibration data
        attach_astrocytes(model, AstroAllocation((AstroGroup(0, (0, 1)),)))
    with pytest.raises(ValueError):  # astro dt must match model dt
        attach_astrocytes(model, AstroAllocation((AstroGroup(0, (0, 1)),)),
                          AstroParams(dt=5e-4), calibration_rates=[60.0])
    with pytest.raises(ValueError):  # one rate per group
        attach_astrocytes(model, AstroAllocation((AstroGroup(0, (0, 1)),)),
                          calibration_rates=[60.0, 60.0])


def test_empty_allocation_is_stream_identical(toy16):
    model, ds = toy16
    ctx = attach_astrocytes(model, AstroAllocation(()))
    plain = run_batch(model, ds.eval_rates[:8], 0.3, seed=21)
    with_ctx = run_batch(model, ds.eval_rates[:8], 0.3, seed=21, ctx=ctx)
    np.testing.assert_array_equal(plain.counts, with_ctx.counts)


def test_vectorized_astro_matches_scalar_step():
    params = AstroParams()
    from astrocore.astro import steady_state
    warm = steady_state(params, 60.0)
    vec = _VecAstro(params, warm, batch=1)
    state = warm
    rng = np.random.default_rng(3)
    for _ in range(400):
        n = float(rng.poisson(0.06))
        state = step(state, params, spikes=n)
        vec.step(np.array([n]))
        assert vec.pr[0] == state.pr
        assert vec.ag[0] == state.ag
        assert vec.esp[0] == state.esp


def test_healthy_astro_accuracy_within_two_percent(toy16):
    model, ds = toy16
    alloc = full_layer_allocation(model)
    ctx = attach_astrocytes(model, alloc, calibration_inputs=ds.train_rates[:32])
    plain = np.mean([accuracy(model, ds, 0.5, seed=40 + s) for s in range(5)])
    astro = np.mean([accuracy(ctx, ds, 0.5, seed=40 + s) for s in range(5)])
    assert abs(astro - plain) <= 0.02


def test_astro_restores_group_transmission_after_stuck_off(toy16):
    model, ds = toy16
    alloc = AstroAllocation((AstroGroup(0, (0, 1, 2, 3)),))
    ctx = attach_astrocytes(model, alloc, calibration_inputs=ds.train_rates[:32])
    # stuck-off member neuron 0, everything else identical
    faulted = model.clone(disabled=frozenset({0}))
    batch = ds.eval_rates[:16]
    plain = run_batch(faulted, batch, 1.0, seed=5, track_allocation=alloc)
    repaired_ctx = attach_astrocytes(faulted, alloc,
                                     calibration_rates=ctx.healthy_rates)
    repaired = run_batch(faulted, batch, 1.0, seed=5, ctx=repaired_ctx)
    assert repaired.group_tx.mean() > plain.group_tx.mean()


def test_astro_repair_improves_faulted_accuracy(toy16):
    model, ds = toy16
    alloc = full_layer_allocation(model)
    healthy = attach_astrocytes(model, alloc,
                                calibration_inputs=ds.train_rates[:32])
    plain_accs, astro_accs = [], []
    for s in range(6):
        fm = inject_faults(model, FaultSpec(0.2, seed=50 + s))
        ctx = attach_astrocytes(fm, alloc,
                                calibration_rates=healthy.healthy_rates)
        plain_accs.append(accuracy(fm, ds, 1.0, seed=700 + s))
        astro_accs.append(accuracy(ctx, ds, 1.0, seed=700 + s))
    assert np.mean(astro_accs) >= np.mean(plain_accs) - 0.005
