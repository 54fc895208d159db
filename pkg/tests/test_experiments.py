import numpy as np
import pytest

from reluregions import (
    Dataset,
    ExperimentConfig,
    activation_pattern,
    forward,
    gen_cube_data,
    gen_gaussian_data,
    gen_labels,
    init_params,
    loss,
    region_global_min_report,
    run_globalmin_grid,
    run_rank_grid,
    run_singularity_study,
)
from reluregions.errors import InputError
from reluregions.experiments import (
    CSV_HEADER,
    GridResult,
    emit_outputs,
    grid_csv_text,
    grid_svg_text,
    read_grid_csv,
    resolve_d0,
)


def test_gaussian_data_deterministic():
    assert np.array_equal(gen_gaussian_data(3, 5, 42), gen_gaussian_data(3, 5, 42))


def test_gaussian_data_mean():
    X = gen_gaussian_data(100, 1000, 0)
    assert abs(X.mean()) <= 0.02


def test_gaussian_columns_distinct():
    X = gen_gaussian_data(1, 500, 7)
    assert np.unique(X[0]).size == 500


def test_cube_data_range_and_mean():
    X = gen_cube_data(100, 1000, 3)
    assert np.all((X >= -1.0) & (X <= 1.0))
    assert abs(X.mean()) <= 0.02
    assert np.array_equal(X, gen_cube_data(100, 1000, 3))


def test_labels_polynomial_degree_zero_constant():
    X = gen_cube_data(2, 8, 0)
    y = gen_labels("poly:0", X, 5)
    assert np.allclose(y, y[0])


def test_labels_polynomial_degree_two_quadratic():
    # On 1-d inputs a degree-2 label vector is fitted exactly by a parabola.
    X = gen_cube_data(1, 9, 1)
    y = gen_labels("poly:2", X, 5)
    V = np.vander(X[0], 3)
    coeffs, *_ = np.linalg.lstsq(V, y, rcond=None)
    assert np.allclose(V @ coeffs, y, atol=1e-10)


def test_labels_teacher_self_consistent():
    X = gen_cube_data(2, 6, 2)
    rng = np.random.default_rng(9)
    teacher = init_params("he", 2, 5, rng)
    y = forward(teacher, X)
    assert loss(teacher, Dataset(X, y)) == 0.0
    # gen_labels teacher path is deterministic per seed
    assert np.array_equal(gen_labels("teacher", X, 4, d1=5), gen_labels("teacher", X, 4, d1=5))


def test_labels_random_range():
    X = gen_cube_data(2, 50, 3)
    y = gen_labels("random", X, 8)
    assert np.all((y >= -1.0) & (y <= 1.0))


def test_labels_unknown_kind():
    with pytest.raises(InputError):
        gen_labels("fourier", np.ones((1, 2)), 0)
    with pytest.raises(InputError):
        gen_labels("teacher", np.ones((1, 2)), 0)  # missing d1


def test_init_sqrtd1_bounds():
    p = init_params("sqrtd1", 3, 16, 0)
    bound = 1.0 / 4.0
    assert np.all(np.abs(p.W) <= bound) and np.all(np.abs(p.b) <= bound)
    assert np.array_equal(p.v, np.where(np.arange(16) % 2 == 0, 1.0, -1.0))


def test_init_he_bounds():
    p = init_params("he", 6, 4, 1)
    bound = np.sqrt(1.0)
    assert np.all(np.abs(p.W) <= bound) and np.all(np.abs(p.b) <= bound)


def test_init_no_bias():
    assert init_params("sqrtd1", 2, 3, 0, bias=False).b is None


def test_init_unknown_scheme():
    with pytest.raises(InputError):
        init_params("xavier", 2, 3, 0)


def test_resolve_d0():
    assert resolve_d0("1", 8) == 1
    assert resolve_d0("n/4", 10) == 3
    assert resolve_d0("n/2", 10) == 5
    assert resolve_d0("n", 10) == 10
    assert resolve_d0("2n", 10) == 20
    with pytest.raises(InputError):
        resolve_d0("3n", 10)


def test_config_validation():
    with pytest.raises(InputError):
        ExperimentConfig(n_values=(), d1_values=(2,))
    with pytest.raises(InputError):
        ExperimentConfig(n_values=(40,), d1_values=(2,))
    with pytest.raises(InputError):
        ExperimentConfig(n_values=(4,), d1_values=(500,))
    with pytest.raises(InputError):
        ExperimentConfig(n_values=(4,), d1_values=(2,), trials=0)


def test_rank_grid_impossible_width_is_zero():
    # d1 * (d0 + 1) < n: rank can never reach n.
    cfg = ExperimentConfig(n_values=(6,), d1_values=(2,), d0_rule="1", trials=20, seed=1)
    result = run_rank_grid(cfg)
    assert result.cells[0].value == 0.0


def test_rank_grid_high_dimension_saturates():
    cfg = ExperimentConfig(n_values=(4,), d1_values=(7,), d0_rule="n", trials=40, seed=2)
    result = run_rank_grid(cfg)
    assert result.cells[0].value >= 0.9


def test_rank_grid_1d_at_coverage_width():
    # At the coupon-collector width for n=10, eps=0.1 the sampled full-rank
    # frequency clears 0.9 (measured truth ~0.91).
    cfg = ExperimentConfig(n_values=(10,), d1_values=(93,), d0_rule="1", trials=100, seed=300)
    result = run_rank_grid(cfg)
    assert result.cells[0].value >= 0.9


def test_rank_grid_monotone_in_width():
    cfg = ExperimentConfig(n_values=(6,), d1_values=(2, 6, 10, 14), d0_rule="1", trials=60, seed=3)
    result = run_rank_grid(cfg)
    values = [c.value for c in result.cells]
    sigma = np.sqrt(0.25 / cfg.trials)
    for lo, hi in zip(values, values[1:]):
        assert hi >= lo - 3.0 * sigma


def test_globalmin_grid_impossible_width_is_zero():
    cfg = ExperimentConfig(n_values=(6,), d1_values=(2,), d0_rule="1", trials=15, seed=4, init="he")
    result = run_globalmin_grid(cfg)
    assert result.cells[0].value == 0.0


def test_globalmin_teacher_own_region_contains_zero_loss():
    rng = np.random.default_rng(11)
    X = gen_cube_data(2, 5, rng)
    p = init_params("he", 2, 8, rng)
    pattern, degenerate = activation_pattern(p, X)
    assert not degenerate
    y = forward(p, X)
    report = region_global_min_report(pattern, X, y, p.v)
    assert report.contains_zero_loss


def test_workers_do_not_change_results():
    base = ExperimentConfig(n_values=(4, 5), d1_values=(3, 5), d0_rule="1", trials=10, seed=5)
    multi = ExperimentConfig(n_values=(4, 5), d1_values=(3, 5), d0_rule="1", trials=10, seed=5, workers=4)
    assert grid_csv_text(run_rank_grid(base)) == grid_csv_text(run_rank_grid(multi))


def test_singularity_small_dims():
    result = run_singularity_study([1, 2], trials=2000, seed=6)
    assert abs(result.cells[0].value - 0.5) <= 0.05
    assert abs(result.cells[1].value - 0.625) <= 0.05


def test_singularity_validation():
    with pytest.raises(InputError):
        run_singularity_study([], trials=10, seed=0)
    with pytest.raises(InputError):
        run_singularity_study([2], trials=0, seed=0)


def test_csv_layout_and_round_trip(tmp_path):
    cfg = ExperimentConfig(n_values=(4,), d1_values=(2, 4), d0_rule="1", trials=5, seed=7)
    result = run_rank_grid(cfg)
    text = grid_csv_text(result)
    lines = text.splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + len(result.cells)
    assert "\r" not in text
    path = tmp_path / "grid.csv"
    emit_outputs(result, csv_path=path)
    again = read_grid_csv(path)
    assert grid_csv_text(again) == text


def test_svg_one_rect_per_cell(tmp_path):
    cfg = ExperimentConfig(n_values=(4, 5), d1_values=(2, 4, 6), d0_rule="1", trials=3, seed=8)
    result = run_rank_grid(cfg)
    svg = grid_svg_text(result)
    assert svg.count("<rect") == len(result.cells)
    path = tmp_path / "grid.svg"
    emit_outputs(result, svg_path=path)
    assert path.read_text(encoding="utf-8") == svg


def test_emit_outputs_bad_path():
    result = GridResult("rank-grid", "full_rank_fraction", 0, ())
    with pytest.raises(InputError):
        emit_outputs(result, csv_path="/nonexistent-dir/x.csv")


def test_read_grid_csv_rejects_garbage(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n", encoding="utf-8")
    with pytest.raises(InputError):
        read_grid_csv(path)
