"""Unit tests for parameter layouts, optimisation, pre-training and sparsification."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np
import pytest

from src.channel.fiber import FiberParams, log_step_grid
from src.channel.ssfm import ssfm_propagate
from src.config.settings import TrainConfig, load_config
from src.dbp.cd_filter import cosine_basis, ideal_cd_response, ls_cd_filter
from src.dbp.fractional import fractional_delay_taps
from src.dbp.layout import EngineLayout
from src.dbp.params import DbpParams
from src.experiment.dataset import generate_dataset
from src.experiment.pipeline import build_system
from src.filterbank import FilterBankSpec
from src.training import (
    AdamState,
    BatchItem,
    LossGraph,
    ParamLayout,
    ParamVector,
    PlateauSchedule,
    Segment,
    adam_step,
    backward,
    batch_gradient,
    cascade_error,
    check_digest,
    finite_difference_check,
    forward_loss,
    pretrain_cd,
    sparsity_report,
    threshold_sparsify,
    train,
    validation_snr,
)
from src.training.trainer import TrainingCurves, l1_gradient
from src.utils.errors import DigestMismatchError, TapeError
from src.waveform.pulse import pulse_shape, rrc_taps
from src.waveform.symbols import generate_symbols
from src.waveform.types import SignalSpec, SymbolSequence

SUBBAND_RATE = 24e9
BAND = 8 * 1.25 / 24


@pytest.fixture
def micro_item(micro_system, micro_record):
    tx, rx = micro_record
    return micro_system.batch_item(tx, rx)


@pytest.fixture
def spm_scenario():
    """Single-branch engine and one record of a dispersion-free span at 10 dBm.

    The exact inverse is one MIMO tap of gamma * L_eff * p_ref; the MIMO
    filter starts at zero so the untrained engine is plain phase alignment.
    """
    spec = SignalSpec(baud=32e9, oversampling=2, n_symbols=1024, seed=7)
    taps = rrc_taps(spec.rolloff, spec.span_symbols, spec.oversampling)
    tx = generate_symbols(spec)
    launched = pulse_shape(tx, taps, spec.oversampling, 10.0)
    fiber = FiberParams(beta2_ps2_per_km=0.0, n_spans=1)
    grid = log_step_grid(fiber.span_km, 10, fiber.alpha_db_per_km)
    rx = ssfm_propagate(launched, fiber, grid, samples_per_symbol=spec.oversampling)

    bank = FilterBankSpec(1, 1, 0, np.ones(1), np.ones(1), rx.sample_rate)
    layout = EngineLayout(
        xi_km=(fiber.span_km,),
        delays=np.zeros((1, 1), dtype=int),
        common_offsets=(0,),
        orders=(2,),
        n_factors=1,
        fractional=np.zeros(1),
        frac_taps=4,
        downsample=1,
        indices=np.zeros(1, dtype=int),
        initial_phase=np.zeros(1),
    )
    params = DbpParams(
        analysis_taps=np.ones(1),
        synthesis_taps=np.ones(1),
        cd_half_taps=[np.array([1.0, 0.0, 0.0], dtype=np.complex128)],
        mimo=[[np.zeros((1, 1, 3))]],
        mimo_masks=[[np.ones((1, 1, 3), dtype=bool)]],
        frac_taps=fractional_delay_taps(0.0, 4)[None, :],
        phase=np.zeros(1),
        p_ref_w=1e-3,
    )
    graph = LossGraph(bank=bank, layout=layout, pulse_taps=taps, samples_per_symbol=2, guard=64)
    return graph, params, BatchItem(tx=tx, rx=rx)


@pytest.fixture(scope="module")
def desk_items():
    """Desk system with its simulated training and held-out items."""
    config = load_config()
    system = build_system(config)
    dataset = generate_dataset(system, threads=4)
    training, held_out = dataset.split(config.dataset.validation_records)
    return (
        system,
        [system.batch_item(r.tx, r.rx) for r in training],
        [system.batch_item(r.tx, r.rx) for r in held_out],
    )


def _cascade(filters, band=BAND, n_points=512):
    freqs = np.linspace(0.0, band, n_points)
    basis = cosine_basis(freqs, filters[0].half_length)
    target = ideal_cd_response(freqs, sum(f.xi_km for f in filters), -21.7, SUBBAND_RATE)
    return cascade_error([f.half_taps for f in filters], basis, target)


class TestParamLayout:
    """Test the flat parameter view."""

    def test_round_trip(self, micro_params):
        layout = ParamLayout.from_params(micro_params)
        restored = layout.unflatten(layout.flatten(micro_params), micro_params)
        np.testing.assert_array_equal(restored.analysis_taps, micro_params.analysis_taps)
        for a, b in zip(restored.cd_half_taps, micro_params.cd_half_taps):
            np.testing.assert_array_equal(a, b)
        for fa, fb in zip(restored.mimo, micro_params.mimo):
            for a, b in zip(fa, fb):
                np.testing.assert_array_equal(a, b)
        np.testing.assert_array_equal(restored.phase, micro_params.phase)

    def test_complex_segments_are_interleaved(self, micro_params):
        layout = ParamLayout.from_params(micro_params)
        segment = layout["cd/0"]
        assert segment.is_complex
        assert segment.size == 2 * micro_params.cd_half_taps[0].size
        flat = layout.flatten(micro_params)
        first_real = flat[segment.offset : segment.offset + 2 : 2]
        np.testing.assert_array_equal(first_real, micro_params.cd_half_taps[0][:1].real)
        assert layout.size == sum(s.size for s in layout.segments)

    def test_segment_order(self, micro_params):
        names = ParamLayout.from_params(micro_params).names
        assert names[:2] == ["analysis_taps", "synthesis_taps"]
        assert names[-2:] == ["frac_delay", "phase"]
        assert "mimo/0/0" in names

    def test_duplicate_names(self):
        with pytest.raises(TapeError):
            ParamLayout([Segment("a", 0, (2,), False), Segment("a", 2, (2,), False)])

    def test_wrong_vector_size(self, micro_params):
        layout = ParamLayout.from_params(micro_params)
        with pytest.raises(TapeError):
            layout.unflatten_arrays(np.zeros(layout.size + 1))

    def test_param_vector_segment(self, micro_params):
        vector = ParamVector.from_params(micro_params)
        np.testing.assert_array_equal(vector.segment("phase"), micro_params.phase)

    def test_trainable_mask_follows_pruning(self, micro_params):
        pruned, _ = threshold_sparsify(micro_params, 1.0)
        layout = ParamLayout.from_params(pruned)
        mask = layout.trainable_mask(pruned)
        for piece in layout.mimo_slices():
            assert not mask[piece].any()
        assert mask[layout["phase"].offset]


class TestAdam:
    """Test the optimiser."""

    def test_zero_gradient_keeps_parameters(self):
        params = np.array([1.0, -2.0, 3.0])
        state, out = adam_step(AdamState.zeros(3), params, np.zeros(3))
        np.testing.assert_array_equal(out, params)
        assert state.step == 1

    def test_first_step_is_sign_step(self):
        params = np.zeros(3)
        grads = np.array([0.5, -3.0, 1e-2])
        _, out = adam_step(AdamState.zeros(3, lr=0.1), params, grads)
        np.testing.assert_allclose(out, -0.1 * np.sign(grads), rtol=1e-5)

    def test_inputs_unchanged(self):
        state = AdamState.zeros(2)
        params = np.ones(2)
        adam_step(state, params, np.ones(2))
        np.testing.assert_array_equal(state.m, 0.0)
        np.testing.assert_array_equal(params, 1.0)

    def test_shape_mismatch(self):
        with pytest.raises(TapeError):
            adam_step(AdamState.zeros(3), np.zeros(3), np.zeros(2))

    def test_plateau_schedule(self):
        schedule = PlateauSchedule(patience=2, factor=0.5, min_lr=0.2)
        lr = 1.0
        for metric in (1.0, 2.0, 2.0, 2.0, 2.0):
            lr = schedule.update(metric, lr)
        assert lr == pytest.approx(0.25)
        for _ in range(4):
            lr = schedule.update(5.0, lr)
        assert lr == pytest.approx(0.2)


class TestPretrain:
    """Test CD filter pre-training."""

    def test_cascade_gradient(self, rng):
        freqs = np.linspace(0.0, BAND, 64)
        basis = cosine_basis(freqs, 2)
        target = ideal_cd_response(freqs, 30.0, -21.7, SUBBAND_RATE)
        taps = [rng.standard_normal(3) * 0.5 + 1j * rng.standard_normal(3) * 0.5 for _ in range(2)]
        _, grads = cascade_error(taps, basis, target)
        eps = 1e-6
        for step, tap in ((0, 1), (1, 2)):
            for direction in (1.0, 1j):
                plus = [t.copy() for t in taps]
                minus = [t.copy() for t in taps]
                plus[step][tap] += direction * eps
                minus[step][tap] -= direction * eps
                upper = cascade_error(plus, basis, target)[0]
                lower = cascade_error(minus, basis, target)[0]
                slope = (upper - lower) / (2 * eps)
                expected = grads[step][tap].real if direction == 1.0 else grads[step][tap].imag
                assert slope == pytest.approx(expected, rel=1e-5, abs=1e-9)

    def test_no_iterations_returns_least_squares(self):
        filters = pretrain_cd([19.1, 19.1], -21.7, 3, SUBBAND_RATE, BAND, iterations=0)
        expected = ls_cd_filter(19.1, -21.7, 3, SUBBAND_RATE, BAND)
        for f in filters:
            np.testing.assert_array_equal(f.half_taps, expected.half_taps)

    def test_zero_distance_steps_are_identity(self):
        filters = pretrain_cd([0.0], -21.7, 3, SUBBAND_RATE, BAND, iterations=50)
        np.testing.assert_array_equal(filters[0].half_taps, [1, 0, 0, 0])

    def test_refinement_keeps_best_iterate(self):
        xi = [38.2, 38.2, 38.2]
        baseline = pretrain_cd(xi, -21.7, 3, SUBBAND_RATE, BAND, iterations=0)
        one_step = pretrain_cd(xi, -21.7, 3, SUBBAND_RATE, BAND, iterations=1, lr=1e-5)
        refined = pretrain_cd(xi, -21.7, 3, SUBBAND_RATE, BAND, iterations=300, lr=1e-5)
        assert _cascade(refined)[0] <= _cascade(one_step)[0]
        assert _cascade(refined)[0] < 2 * _cascade(baseline)[0]
        assert not np.array_equal(refined[0].half_taps, refined[1].half_taps)
        assert [f.xi_km for f in refined] == xi


class TestSparsity:
    """Test magnitude thresholding."""

    def test_zero_threshold_keeps_everything(self, micro_params):
        pruned, report = threshold_sparsify(micro_params, 0.0)
        assert report.total_nonzero == report.total_coefficients
        assert report.removed_fraction == 0.0

    def test_full_threshold_removes_everything(self, micro_params):
        pruned, report = threshold_sparsify(micro_params, 1.0)
        assert report.total_nonzero == 0
        assert all(not g.any() for factors in pruned.mimo for g in factors)
        assert all(not m.any() for masks in pruned.mimo_masks for m in masks)

    def test_monotone_in_tau(self, micro_params):
        counts = [threshold_sparsify(micro_params, tau)[1].total_nonzero for tau in (0.1, 0.4, 0.7)]
        assert counts[0] >= counts[1] >= counts[2]

    def test_input_not_modified(self, micro_params):
        before = sparsity_report(micro_params).total_nonzero
        threshold_sparsify(micro_params, 0.9)
        assert sparsity_report(micro_params).total_nonzero == before

    def test_report_costs(self, micro_params):
        report = sparsity_report(micro_params)
        assert report.mimo_rms == pytest.approx(report.total_nonzero / (3 * micro_params.n_steps))

    def test_negative_tau(self, micro_params):
        with pytest.raises(ValueError):
            threshold_sparsify(micro_params, -0.1)


class TestLoss:
    """Test the recorded loss and its gradient."""

    def test_silence_costs_only_the_penalty(self, micro_system, micro_params, micro_record):
        _, rx = micro_record
        item = BatchItem(
            tx=SymbolSequence(symbols=np.zeros(64), baud=rx.sample_rate / 2),
            rx=micro_system.prepare(rx.with_samples(np.zeros(len(rx)))),
        )
        graph = replace(micro_system.loss_graph(), l1_weight=0.01)
        result = forward_loss(graph, micro_params, [item])
        total = sum(float(np.abs(g).sum()) for factors in micro_params.mimo for g in factors)
        assert result.mse == 0.0
        assert result.l1 == pytest.approx(total)
        assert result.loss == pytest.approx(0.01 * total)

    def test_empty_batch(self, micro_system, micro_params):
        with pytest.raises(TapeError):
            forward_loss(micro_system.loss_graph(), micro_params, [])

    def test_gradient_shape(self, micro_system, micro_params, micro_item):
        layout = ParamLayout.from_params(micro_params)
        result = forward_loss(micro_system.loss_graph(), micro_params, [micro_item])
        grad = backward(result, layout, verify=True)
        assert grad.shape == (layout.size,)
        assert np.all(np.isfinite(grad))
        assert 0 < result.mse < np.mean(np.abs(micro_item.tx.symbols[8:56]) ** 2)

    def test_gradients_match_finite_differences(self, micro_system, micro_params, micro_item):
        errors = finite_difference_check(micro_system.loss_graph(), micro_params, [micro_item])
        assert set(errors) == set(ParamLayout.from_params(micro_params).names)
        assert max(errors.values()) < 1e-4

    def test_l1_gradient_is_sign(self, micro_params):
        layout = ParamLayout.from_params(micro_params)
        value, grad = l1_gradient(micro_params, layout)
        flat = layout.flatten(micro_params)
        total = sum(float(np.abs(g).sum()) for f in micro_params.mimo for g in f)
        assert value == pytest.approx(total)
        for piece in layout.mimo_slices():
            np.testing.assert_array_equal(grad[piece], np.sign(flat[piece]))
        assert not grad[layout["phase"].offset : layout["phase"].stop].any()

    def test_threads_do_not_change_the_gradient(self, micro_system, micro_params, micro_item):
        graph = micro_system.loss_graph()
        layout = ParamLayout.from_params(micro_params)
        batch = [micro_item, micro_item]
        serial = batch_gradient(graph, micro_params, layout, batch)
        with ThreadPoolExecutor(max_workers=2) as executor:
            threaded = batch_gradient(graph, micro_params, layout, batch, executor)
        assert serial[0] == threaded[0]
        np.testing.assert_array_equal(serial[3], threaded[3])


class TestTrainer:
    """Test the training loop."""

    def test_zero_learning_rate_keeps_parameters(self, micro_system, micro_params, micro_item):
        config = TrainConfig(iterations=2, batch_size=1, lr=0.0, validate_every=0)
        trained, curves = train(config, [micro_item], micro_params, micro_system.loss_graph())
        layout = ParamLayout.from_params(micro_params)
        np.testing.assert_array_equal(layout.flatten(trained), layout.flatten(micro_params))
        assert curves.column("iteration") == [0, 1]

    def test_training_moves_parameters_and_records_curves(
        self, micro_system, micro_params, micro_item
    ):
        config = TrainConfig(iterations=3, batch_size=1, lr=1e-3, validate_every=3)
        graph = micro_system.loss_graph()
        trained, curves = train(config, [micro_item], micro_params, graph, validation=[micro_item])
        assert not np.array_equal(trained.phase, micro_params.phase)
        assert len(curves.rows) == 3
        assert curves.column("val_snr_db")[:2] == ["", ""]
        assert isinstance(curves.column("val_snr_db")[2], float)

    def test_pruned_coefficients_stay_zero(self, micro_system, micro_params, micro_item):
        pruned, _ = threshold_sparsify(micro_params, 0.5)
        config = TrainConfig(iterations=2, batch_size=1, lr=1e-2, validate_every=0)
        trained, _ = train(config, [micro_item], pruned, micro_system.loss_graph())
        for factors, masks in zip(trained.mimo, pruned.mimo_masks):
            for g, m in zip(factors, masks):
                assert not g[~m].any()

    def test_digest_mismatch_refused(self, micro_system, micro_params, micro_item):
        config = TrainConfig(iterations=1, batch_size=1)
        with pytest.raises(DigestMismatchError):
            train(
                config,
                [micro_item],
                micro_params,
                micro_system.loss_graph(),
                dataset_digest="a" * 64,
                expected_digest="b" * 64,
            )

    def test_check_digest(self, caplog):
        check_digest(None, "abc")
        check_digest("abc", "abc")
        with caplog.at_level("WARNING"):
            check_digest("abc", "def", allow_mismatch=True)
        assert "mismatch" in caplog.text

    def test_no_items(self, micro_system, micro_params):
        with pytest.raises(TapeError):
            train(TrainConfig(iterations=1), [], micro_params, micro_system.loss_graph())

    def test_loss_decreases(self, micro_system, micro_params, micro_item):
        config = TrainConfig(iterations=100, batch_size=1, lr=1e-3, l1_weight=0.0)
        _, curves = train(config, [micro_item], micro_params, micro_system.loss_graph())
        loss = curves.column("loss")
        assert len(loss) == 100
        assert np.mean(loss[-10:]) < np.mean(loss[:10])

    def test_trained_engine_undoes_self_phase_modulation(self, spm_scenario):
        """Test training recovers at least 3 dB over the untrained engine on an SPM-only span."""
        graph, params, item = spm_scenario
        linear_snr = validation_snr(graph, params, [item])

        config = TrainConfig(iterations=80, batch_size=1, lr=2e-3, l1_weight=0.0, validate_every=0)
        trained, _ = train(config, [item], params, graph)

        assert validation_snr(graph, trained, [item]) >= linear_snr + 3.0
        assert trained.mimo[0][0].sum() > 0

    def test_curves_csv(self, tmp_path):
        curves = TrainingCurves()
        curves.append(0, 0.5, 0.4, 10.0, 1e-3, None)
        curves.append(1, 0.25, 0.2, 5.0, 1e-3, 12.5)
        lines = curves.write_csv(tmp_path / "curves.csv").read_text().splitlines()
        assert lines[0] == "iteration,loss,mse,l1,val_snr_db,lr"
        assert lines[1] == "0,0.5,0.4,10.0,,0.001"
        assert lines[2].split(",")[4] == "12.5"


class TestRegularisation:
    """Test the L1 penalty on the MIMO coefficients during training."""

    def test_l1_weight_reaches_the_optimiser(self, micro_system, micro_params, micro_item):
        """Test a dominant penalty turns the first Adam step into a shrink of exactly lr."""
        lr = 1e-3
        config = TrainConfig(iterations=1, batch_size=1, lr=lr, l1_weight=100.0, validate_every=0)
        trained, curves = train(config, [micro_item], micro_params, micro_system.loss_graph())

        for before, after in zip(micro_params.mimo, trained.mimo):
            for g, h in zip(before, after):
                assert np.all(g != 0)
                np.testing.assert_allclose(h, g - lr * np.sign(g), rtol=0, atol=1e-12)
        assert curves.column("loss")[0] == pytest.approx(
            curves.column("mse")[0] + 100.0 * curves.column("l1")[0]
        )

    def test_larger_weight_shrinks_the_mimo_norm(self, micro_system, micro_params, micro_item):
        graph = micro_system.loss_graph()
        initial = sum(float(np.abs(g).sum()) for f in micro_params.mimo for g in f)
        norms = []
        for weight in (0.0, 100.0):
            config = TrainConfig(
                iterations=5, batch_size=1, lr=1e-3, l1_weight=weight, validate_every=0
            )
            trained, _ = train(config, [micro_item], micro_params, graph)
            norms.append(sum(float(np.abs(g).sum()) for f in trained.mimo for g in f))
        assert norms[1] < norms[0]
        assert norms[1] < 0.6 * initial


@pytest.mark.slow
class TestDeskSparsity:
    """Desk-scale training with L1 then thresholding; each run takes tens of minutes."""

    def test_threshold_removes_most_coefficients_at_no_cost(self, desk_items):
        """Test at least 80% of the MIMO taps go at the default tau for at most 0.1 dB."""
        system, items, held_out = desk_items
        config = system.config.training
        graph = system.loss_graph()
        trained, _ = train(config, items, system.initial_params(), graph, threads=4)

        pruned, report = threshold_sparsify(trained, config.tau)

        assert report.removed_fraction >= 0.8
        loss_db = validation_snr(graph, trained, held_out) - validation_snr(graph, pruned, held_out)
        assert loss_db <= 0.1

    def test_regularisation_path_is_monotone(self, desk_items):
        """Test a larger L1 weight never keeps more taps, within 2% of the count."""
        system, items, _ = desk_items
        graph = system.loss_graph()
        counts = []
        for weight in (1e-6, 1e-5, 1e-4):
            config = replace(system.config.training, l1_weight=weight)
            trained, _ = train(config, items, system.initial_params(), graph, threads=4)
            counts.append(threshold_sparsify(trained, config.tau)[1].total_nonzero)

        for smaller, larger in zip(counts, counts[1:]):
            assert larger <= smaller * 1.02
