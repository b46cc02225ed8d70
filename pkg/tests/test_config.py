"""
Tests for scenario and sweep configuration files and the preset registry.
"""

import numpy as np
import pytest

from src.models.scenarios import SCENARIO_REGISTRY, get_scenario
from src.utils.config import (
    ScenarioConfig,
    load_config,
    load_sweep_config,
    parse_config_text,
    parse_sweep_text
)
from src.utils.errors import ConfigError, ParameterError
from src.utils.parameters import DEFAULT_N_POINTS, OUTPUT_GROUPS, SUBSYSTEMS

DESK = """\
[scenario]
n1 = 4
n2 = 6
omega1 = 1.0
omega2 = 0.3
g1 = 1e-3
g2 = 1e-3
gamma = 0.05
temp1 = 0.6
temp2 = 4.0
"""


class TestScenarioParsing:

    def test_full_file(self):
        config = parse_config_text(DESK + "grid.t_max = 50\ngrid.n_points = 101\nseed = 7\n", name="desk")
        assert config.name == "desk"
        assert config.params.n1 == 4 and config.params.n2 == 6
        assert config.params.gamma == pytest.approx(0.05)
        assert config.params.seed == 7
        assert config.params.sigma == 0.0
        assert config.t_max == 50.0
        assert config.n_points == 101
        assert config.outputs == OUTPUT_GROUPS
        assert config.roles == SUBSYSTEMS
        assert config.preset is None

    def test_defaults(self):
        config = parse_config_text(DESK)
        assert config.n_points == DEFAULT_N_POINTS

    def test_headerless_text(self):
        body = DESK.split("\n", 1)[1]
        assert parse_config_text(body).params == parse_config_text(DESK).params

    def test_inline_comments(self):
        config = parse_config_text(DESK.replace("gamma = 0.05", "gamma = 0.05   ; exchange"))
        assert config.params.gamma == pytest.approx(0.05)

    def test_grid_is_in_units_of_omega1(self):
        text = DESK.replace("omega1 = 1.0", "omega1 = 2.0") + "grid.t_max = 10\ngrid.n_points = 11\n"
        grid = parse_config_text(text).grid()
        assert grid[0] == 0.0
        assert grid[-1] == pytest.approx(5.0)
        assert len(grid) == 11

    def test_preset_with_override(self):
        config = parse_config_text("[scenario]\npreset = dispersive\nn1 = 4\nn2 = 6\n")
        reference = get_scenario("dispersive")
        assert config.preset == "dispersive"
        assert config.params.n1 == 4
        assert config.params.gamma == reference.params.gamma
        assert config.t_max == reference.t_max

    def test_outputs_and_roles(self):
        config = parse_config_text(DESK + "outputs = heats, works\nroles = 2\n")
        assert config.outputs == ("heats", "works")
        assert config.roles == (2,)

    def test_with_params(self):
        config = parse_config_text(DESK).with_params(gamma=0.01)
        assert config.params.gamma == 0.01


class TestScenarioErrors:

    def test_bad_number_reports_line_and_key(self):
        with pytest.raises(ConfigError) as info:
            parse_config_text(DESK.replace("n1 = 4", "n1 = four"), source="desk.ini")
        assert info.value.key == "n1"
        assert info.value.line == 2
        assert "expected a number" in str(info.value)
        assert "desk.ini" in str(info.value)

    def test_headerless_line_numbers_match_the_file(self):
        body = DESK.split("\n", 1)[1].replace("omega2 = 0.3", "omega2 = fast")
        with pytest.raises(ConfigError) as info:
            parse_config_text(body)
        assert info.value.line == 4

    def test_non_integer_mode_count(self):
        with pytest.raises(ConfigError, match="integer"):
            parse_config_text(DESK.replace("n1 = 4", "n1 = 4.5"))

    def test_unknown_key(self):
        with pytest.raises(ConfigError) as info:
            parse_config_text(DESK + "coupling = 0.1\n")
        assert info.value.key == "coupling"
        assert info.value.line == 11

    def test_missing_keys(self):
        text = DESK.replace("temp1 = 0.6\n", "").replace("temp2 = 4.0\n", "")
        with pytest.raises(ConfigError) as info:
            parse_config_text(text)
        assert "temp1" in str(info.value) and "temp2" in str(info.value)
        assert info.value.key == "temp1"

    def test_invalid_model_value(self):
        with pytest.raises(ConfigError) as info:
            parse_config_text(DESK.replace("temp2 = 4.0", "temp2 = -1"))
        assert info.value.key == "temp2"
        assert info.value.line == 10

    def test_negative_seed(self):
        with pytest.raises(ConfigError, match="seed") as info:
            parse_config_text(DESK + "seed = -1\n")
        assert info.value.key == "seed"

    def test_too_few_points(self):
        with pytest.raises(ConfigError) as info:
            parse_config_text(DESK + "grid.n_points = 2\n")
        assert info.value.key == "grid.n_points"

    def test_unknown_output_group(self):
        with pytest.raises(ConfigError) as info:
            parse_config_text(DESK + "outputs = energies, entropy\n")
        assert info.value.key == "outputs"

    def test_bad_roles(self):
        with pytest.raises(ConfigError) as info:
            parse_config_text(DESK + "roles = 3\n")
        assert info.value.key == "roles"

    def test_unknown_preset(self):
        with pytest.raises(ConfigError, match="unknown preset"):
            parse_config_text("[scenario]\npreset = lukewarm\n")

    def test_duplicate_key(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config_text(DESK + "n1 = 5\n")

    def test_scenario_config_validates_directly(self):
        params = parse_config_text(DESK).params
        with pytest.raises(ParameterError):
            ScenarioConfig(params=params, t_max=-1.0)


class TestSweepParsing:

    SWEEP = DESK + "\n[sweep]\naxis = gamma\nvalues = 1e-3, 2e-3, 5e-3\n"

    def test_axis_and_values(self):
        sweep = parse_sweep_text(self.SWEEP, name="scan")
        assert sweep.axis == "gamma"
        assert sweep.values == (1e-3, 2e-3, 5e-3)
        points = list(sweep.points())
        assert [value for value, _ in points] == [1e-3, 2e-3, 5e-3]
        assert points[1][1].params.gamma == 2e-3
        assert points[1][1].name == "scan_gamma_0.002"

    def test_integer_axis(self):
        sweep = parse_sweep_text(DESK + "[sweep]\naxis = n1\nvalues = 2, 3\n")
        assert sweep.values == (2, 3)
        assert all(isinstance(v, int) for v in sweep.values)

    def test_integer_axis_rejects_fractions(self):
        with pytest.raises(ConfigError, match="integer"):
            parse_sweep_text(DESK + "[sweep]\naxis = n1\nvalues = 2, 3.5\n")

    def test_unknown_axis(self):
        with pytest.raises(ConfigError) as info:
            parse_sweep_text(DESK + "[sweep]\naxis = beta\nvalues = 1\n")
        assert info.value.key == "axis"

    def test_empty_values(self):
        with pytest.raises(ConfigError) as info:
            parse_sweep_text(DESK + "[sweep]\naxis = gamma\nvalues =\n")
        assert info.value.key == "values"

    def test_invalid_point_rejected_up_front(self):
        with pytest.raises(ConfigError) as info:
            parse_sweep_text(DESK + "[sweep]\naxis = temp1\nvalues = 0.5, -0.5\n")
        assert info.value.key == "values"

    def test_missing_sweep_section(self):
        with pytest.raises(ConfigError, match="sweep"):
            parse_sweep_text(DESK)


class TestFiles:

    def test_name_is_file_stem(self, scenario_file):
        config = load_config(scenario_file(DESK, name="bench"))
        assert config.name == "bench"

    def test_sweep_file(self, scenario_file):
        path = scenario_file(DESK + "[sweep]\naxis = g1\nvalues = 0, 0.01\n", name="scan")
        sweep = load_sweep_config(path)
        assert sweep.base.name == "scan"
        assert sweep.values == (0.0, 0.01)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "absent.ini")


class TestPresets:

    def test_registry_keys_match_names(self):
        assert len(SCENARIO_REGISTRY) == 14
        for name, scenario in SCENARIO_REGISTRY.items():
            assert scenario.name == name
            assert scenario.t_max > 0

    def test_reference_sizes(self):
        params = get_scenario("strong_negative_detuning").params
        assert (params.n1, params.n2) == (200, 300)
        assert (params.temp1, params.temp2) == (0.6, 4.0)
        assert params.omega2 == 1.7

    def test_distributed_presets_carry_a_spread(self):
        assert get_scenario("dispersive_distributed").params.sigma == pytest.approx(0.1)
        assert np.isclose(get_scenario("dispersive").params.sigma, 0.0)

    @pytest.mark.parametrize("name, gamma", [
        ("strong_negative_detuning_wide", 2e-3),
        ("ultrastrong_negative_detuning_wide", 5e-3),
        ("dispersive_wide", 5e-4),
    ])
    def test_wide_spread_presets(self, name, gamma):
        params = get_scenario(name).params
        assert params.sigma == pytest.approx(0.3)
        assert params.gamma == pytest.approx(gamma)

    def test_dispersive_comparison_intra_coupling(self):
        params = get_scenario("dispersive_wide").params
        assert (params.g1, params.g2, params.omega2) == (1e-4, 1e-4, 0.3)

    def test_unknown_preset(self):
        with pytest.raises(ParameterError, match="unknown scenario"):
            get_scenario("lukewarm")
