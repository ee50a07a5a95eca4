from pathlib import Path

import pytest

from waveblow.config import (
    ParseError,
    ValidationError,
    load_document,
    parse_config,
    parse_grid,
    parse_sweep_config,
)
from waveblow.model import CharacteristicWeight, PowerTerm, ProblemSpec
from waveblow.regimes import RegimeQuery
from waveblow.sweep import SweepConfig

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

MINIMAL = """
[problem]
label = "min"
epsilon = 0.2

[[problem.terms]]
kind = "power"
r = 2.0

[data]
radius = 2.0
f = [ { center = 0.0, amplitude = 1.0, width = 1.0 } ]
"""


def write(tmp_path, text, name="cfg.toml"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestParseProblem:
    def test_minimal_power_spec(self, tmp_path):
        spec = parse_config(write(tmp_path, MINIMAL))
        assert isinstance(spec, ProblemSpec)
        assert isinstance(spec.terms[0], PowerTerm)
        assert spec.epsilon == 0.2
        assert spec.data.g_mean_zero  # no g bumps

    def test_r_below_one_named_condition(self, tmp_path):
        bad = MINIMAL.replace("r = 2.0", "r = 1.0")
        with pytest.raises(ValidationError, match="r > 1"):
            parse_config(write(tmp_path, bad))

    def test_unknown_key_is_hard_error(self, tmp_path):
        bad = MINIMAL.replace('label = "min"', 'label = "min"\nfoo = 1')
        with pytest.raises(ParseError, match="foo"):
            parse_config(write(tmp_path, bad))

    def test_unknown_term_kind(self, tmp_path):
        bad = MINIMAL.replace('kind = "power"', 'kind = "cubic"')
        with pytest.raises(ParseError, match="cubic"):
            parse_config(write(tmp_path, bad))

    def test_characteristic_weight_parsed(self, tmp_path):
        text = MINIMAL.replace(
            "r = 2.0", 'r = 2.0\nweight = { kind = "characteristic", a = 0.5, b = 0.0 }'
        )
        spec = parse_config(write(tmp_path, text))
        assert spec.terms[0].weight == CharacteristicWeight(a=0.5, b=0.0, c=-1.0)

    def test_syntax_error_reports_line(self, tmp_path):
        with pytest.raises(ParseError):
            parse_config(write(tmp_path, "[problem\nepsilon = 0.2"))

    def test_missing_file(self):
        with pytest.raises(ParseError, match="not found"):
            parse_config("/nonexistent/nope.toml")

    def test_epsilon_validated(self, tmp_path):
        bad = MINIMAL.replace("epsilon = 0.2", "epsilon = 0.0")
        with pytest.raises(ValidationError, match="epsilon"):
            parse_config(write(tmp_path, bad))


GRID = """
[grid]
h = 0.05
t_max = 10.0
threshold = 1e6
refinement_levels = 2
"""


class TestGridAndSweep:
    def test_grid_parse_and_overrides(self, tmp_path):
        doc = load_document(write(tmp_path, MINIMAL + GRID))
        grid = parse_grid(doc)
        assert grid.h == 0.05 and grid.t_max == 10.0
        grid = parse_grid(doc, {"h": 0.01, "t_max": None})
        assert grid.h == 0.01 and grid.t_max == 10.0

    def test_grid_validation_named(self, tmp_path):
        doc = load_document(write(tmp_path, MINIMAL + GRID.replace("1e6", "10.0")))
        with pytest.raises(ValidationError, match="threshold"):
            parse_grid(doc)

    def test_sweep_count_condition(self, tmp_path):
        text = MINIMAL + GRID + "\n[sweep]\neps_max = 0.4\neps_min = 0.1\ncount = 3\n"
        with pytest.raises(ValidationError, match="count >= 4"):
            parse_config(write(tmp_path, text))

    def test_sweep_config_roundtrip(self, tmp_path):
        text = MINIMAL + GRID + "\n[sweep]\neps_max = 0.4\neps_min = 0.1\ncount = 4\n"
        cfg = parse_config(write(tmp_path, text))
        assert isinstance(cfg, SweepConfig)
        assert cfg.count == 4 and cfg.workers == 1

    def test_worker_override(self, tmp_path):
        text = MINIMAL + GRID + "\n[sweep]\neps_max = 0.4\neps_min = 0.1\ncount = 4\n"
        doc = load_document(write(tmp_path, text))
        cfg = parse_sweep_config(doc, {"workers": 4})
        assert cfg.workers == 4


class TestQuery:
    def test_query_parse(self, tmp_path):
        text = "[query]\nmixed_p = 1.7\npower_r = 2.0\nzero_mean = true\n"
        q = parse_config(write(tmp_path, text))
        assert isinstance(q, RegimeQuery)
        assert q.mixed == (1.7, 0.0) and q.power == 2.0 and q.g_mean_zero

    def test_query_weight(self, tmp_path):
        text = (
            "[query]\nmixed_p = 2.0\n"
            'weight = { kind = "characteristic", a = 0.5, b = 0.0, c = -1.0 }\n'
        )
        q = parse_config(write(tmp_path, text))
        assert q.weight == CharacteristicWeight(0.5, 0.0, -1.0)

    def test_unknown_query_key(self, tmp_path):
        with pytest.raises(ParseError, match="power"):
            parse_config(write(tmp_path, "[query]\npower = 2.0\n"))


class TestRepoConfigs:
    @pytest.mark.parametrize("name", sorted(p.name for p in CONFIG_DIR.glob("*.toml")))
    def test_every_repo_config_parses(self, name):
        obj = parse_config(CONFIG_DIR / name)
        assert obj is not None
