import pytest

from sphconv.config import (
    DEFAULT_P_GRID,
    DEFAULT_Q_GRID,
    FIELDS,
    default_apply_grid,
    load_config,
)
from sphconv.errors import ConfigError

INI = """\
[kernel]
alpha = 0.6
n = 1

[grid]
half_width = 32
points_per_axis = 1024

[bessel]
t_max = 50
samples = 4000

[sweep]
battery = smoke-v1

[run]
workers = 4
seed = 42
"""


class TestDefaults:
    def test_empty_config_has_documented_defaults(self):
        cfg = load_config()
        assert cfg.kernel.alpha == 0.75
        assert cfg.kernel.n == 1
        assert cfg.grid is None
        assert cfg.quadrature is None
        assert cfg.bessel.orders == (-0.5, 0.0, 0.5, 1.0, 2.0)
        assert cfg.fourier.alphas == (0.6, 0.75, 0.9)
        assert cfg.apply.kind == "gaussian"
        assert cfg.sweep.p_grid == DEFAULT_P_GRID
        assert cfg.sweep.q_grid == DEFAULT_Q_GRID
        assert cfg.out == "."
        assert cfg.workers == 1
        assert cfg.seed is None

    def test_default_apply_grids_vary_with_dimension(self):
        assert default_apply_grid(1).points_per_axis == 4096
        assert default_apply_grid(2).points_per_axis == 512
        assert default_apply_grid(3).points_per_axis == 128


class TestFileAndOverrides:
    def test_file_values_land(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text(INI)
        cfg = load_config(str(path))
        assert cfg.kernel.alpha == 0.6
        assert cfg.grid.half_width == 32.0
        assert cfg.grid.points_per_axis == 1024
        assert cfg.bessel.t_max == 50.0
        assert cfg.bessel.samples == 4000
        assert cfg.sweep.battery == "smoke-v1"
        assert cfg.workers == 4
        assert cfg.seed == 42

    def test_overrides_win_over_file(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text(INI)
        cfg = load_config(str(path), {"kernel.alpha": "0.9", "run.seed": "7"})
        assert cfg.kernel.alpha == 0.9
        assert cfg.seed == 7
        assert cfg.bessel.samples == 4000  # untouched file value survives

    def test_hex_integers_accepted(self):
        cfg = load_config(overrides={"run.workers": "0x4"})
        assert cfg.workers == 4

    def test_grid_built_with_kernel_dimension(self):
        cfg = load_config(overrides={
            "kernel.n": "2", "grid.half_width": "16",
            "grid.points_per_axis": "512",
        })
        assert cfg.grid.n == 2


class TestRejections:
    def test_unknown_section(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text("[nonsense]\nx = 1\n")
        with pytest.raises(ConfigError, match=r"\[nonsense\]"):
            load_config(str(path))

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text("[kernel]\nbeta = 1\n")
        with pytest.raises(ConfigError, match=r"\[kernel\] beta"):
            load_config(str(path))

    def test_unknown_override_path(self):
        with pytest.raises(ConfigError, match="unknown field"):
            load_config(overrides={"kernel.beta": "1"})

    def test_diagnostics_carry_field_path(self):
        with pytest.raises(ConfigError, match=r"\[kernel\] alpha"):
            load_config(overrides={"kernel.alpha": "-1"})
        with pytest.raises(ConfigError, match=r"\[bessel\] samples"):
            load_config(overrides={"bessel.samples": "10"})
        with pytest.raises(ConfigError, match=r"\[sweep\] p_grid"):
            load_config(overrides={"sweep.p_grid": "0.5,2"})

    def test_fourier_alphas_outside_oracle_window(self):
        with pytest.raises(ConfigError, match="oracle window"):
            load_config(overrides={"fourier.alphas": "1.2"})

    def test_calibration_must_be_nonzero(self):
        with pytest.raises(ConfigError, match="nonzero"):
            load_config(overrides={"apply.calibration": "0"})

    def test_seed_range(self):
        with pytest.raises(ConfigError):
            load_config(overrides={"run.seed": "-1"})
        with pytest.raises(ConfigError):
            load_config(overrides={"run.seed": str(2 ** 64)})
        assert load_config(overrides={"run.seed": str(2 ** 64 - 1)}).seed == 2 ** 64 - 1

    def test_grid_spacing_failure_is_a_config_error(self):
        with pytest.raises(ConfigError, match=r"\[grid\]"):
            load_config(overrides={"grid.half_width": "16",
                                   "grid.points_per_axis": "64"})

    def test_bessel_orders_defer_range_check(self):
        # out-of-range orders surface as RangeError at run time, with the
        # offending value; the config layer only checks the list shape
        cfg = load_config(overrides={"bessel.orders": "99"})
        assert cfg.bessel.orders == (99.0,)


class TestFieldTable:
    def test_every_field_path_is_well_formed(self):
        for path, rule in FIELDS:
            section, key = path.split(".")
            assert section and key and rule

    def test_field_count_is_stable(self):
        # the help text, INI schema, and flag set all derive from this table
        assert len(FIELDS) == 32
