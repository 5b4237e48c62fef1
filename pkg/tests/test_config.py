from pathlib import Path

import numpy as np
import pytest

from shared.config import config_hash, load_run_config, parse_grid
from shared.errors import InvalidInputError
from shared.kernels import KernelRegistry
from shared.utils.config_validator import validate_output_dir, validate_override
from shared.utils.file_loader import load_kernel_table, load_stage_defaults, parse_key_values

CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"

BASIC = """\
# test run
kernel.family = power_law
kernel.alpha = 0.5

model.beta = 2
msd.times = 10, 100, 1000
simulate.seed = 7
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(BASIC, encoding="utf-8")
    return path


def test_parse_grid_forms():
    assert parse_grid("1, 2,5") == [1.0, 2.0, 5.0]
    assert parse_grid("geom:1:100:3") == pytest.approx([1.0, 10.0, 100.0])
    assert parse_grid("lin:0:1:3") == [0.0, 0.5, 1.0]
    assert parse_grid("") == []
    assert parse_grid([1, 2]) == [1.0, 2.0]


def test_load_run_config_types_sections(config_file):
    config = load_run_config(config_file)

    assert config.kernel == {"family": "power_law", "alpha": "0.5"}
    assert config.model.beta == 2.0
    assert config.model.m == 1.0
    assert config.msd.times == [10.0, 100.0, 1000.0]
    assert config.require_seed() == 7
    assert len(config.sha256) == 64
    assert config.validate_.times[0] == pytest.approx(1e-2)


def test_overrides_and_shorthands(config_file):
    config = load_run_config(config_file, ["kernel.alpha=0.3", "transform.omegas="], threads=2, seed=11)

    assert config.kernel["alpha"] == "0.3"
    assert config.transform.omegas == []
    assert config.threads == 2
    assert config.simulate.seed == 11


def test_hash_ignores_threads_but_not_numerics(config_file):
    base = load_run_config(config_file).sha256

    assert load_run_config(config_file, threads=8).sha256 == base
    assert load_run_config(config_file, ["model.beta=3"]).sha256 != base


def test_config_hash_is_order_independent():
    assert config_hash({"a": "1", "b": "2"}) == config_hash({"b": "2", "a": "1"})


@pytest.mark.parametrize(
    "override, message",
    [
        ("model.gamma=1", "model.gamma"),
        ("model.m=-1", "model.m"),
        ("msd.times=10, 5", "increasing"),
        ("simulate.modes=2", "simulate.modes"),
        ("validate.times=geom:1:10:0", "validate.times"),
    ],
)
def test_invalid_values_are_rejected(config_file, override, message):
    with pytest.raises(InvalidInputError, match=message):
        load_run_config(config_file, [override])


def test_family_is_required(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("kernel.alpha = 0.5\n", encoding="utf-8")

    with pytest.raises(InvalidInputError, match="family"):
        load_run_config(path)


def test_missing_seed(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("kernel.family = exponential\n", encoding="utf-8")

    with pytest.raises(InvalidInputError, match="seed"):
        load_run_config(path).require_seed()


def test_missing_config_file(tmp_path):
    with pytest.raises(InvalidInputError, match="Cannot read"):
        load_run_config(tmp_path / "absent.cfg")


def test_table_path_is_resolved_next_to_config(tmp_path):
    path = tmp_path / "tab.cfg"
    path.write_text("kernel.family = tabulated\nkernel.table_path = k.csv\n", encoding="utf-8")

    config = load_run_config(path)

    assert Path(config.kernel["table_path"]) == tmp_path / "k.csv"


@pytest.mark.parametrize("name", ["exponential.cfg", "subdiffusive.cfg", "critical.cfg", "tabulated.cfg"])
def test_shipped_configs_load(name):
    config = load_run_config(CONFIG_DIR / name)

    assert config.kernel["family"] in {"exponential", "power_law", "tabulated"}


def test_parse_key_values():
    values = parse_key_values("a.b = 1 # note\n\n# skip\na.b = 2\nc = x=y\n")

    assert values == {"a.b": "2", "c": "x=y"}
    with pytest.raises(InvalidInputError, match=":2:"):
        parse_key_values("a = 1\nbroken\n")


def test_shipped_kernel_table_loads():
    rows = load_kernel_table(CONFIG_DIR / "kernel_table.csv")

    assert rows.ndim == 2 and rows.shape[1] == 2
    assert rows[0].tolist() == [0.0, 1.0]
    assert np.all(np.diff(rows[:, 0]) > 0)


def test_kernel_table_skips_comments_and_blank_lines(tmp_path):
    path = tmp_path / "k.csv"
    path.write_text("# samples\n\nt,K\n0,1\n# midway\n1,0.5\n\n2,0.25\n", encoding="utf-8")

    rows = load_kernel_table(path)

    np.testing.assert_array_equal(rows, [[0.0, 1.0], [1.0, 0.5], [2.0, 0.25]])


@pytest.mark.parametrize(
    "text, message",
    [
        ("", "empty"),
        ("time,value\n0,1\n", "header"),
        ("t,K\n", "no rows"),
        ("t,K\n0,1\n1,abc\n", "malformed"),
        ("t,K\n0,1,2\n1,2,3\n", "two columns"),
    ],
)
def test_kernel_table_errors(tmp_path, text, message):
    path = tmp_path / "k.csv"
    path.write_text(text, encoding="utf-8")

    with pytest.raises(InvalidInputError, match=message):
        load_kernel_table(path)


def test_tabulated_family_reads_declared_onset(tmp_path):
    (tmp_path / "k.csv").write_text(
        "t,K\n" + "".join(f"{t},{(1.0 + t) ** -4}\n" for t in (0, 0.5, 1, 2, 4, 8, 16, 32, 64)), encoding="utf-8"
    )
    section = {"family": "tabulated", "table_path": str(tmp_path / "k.csv"), "tail": "diffusive"}

    assert KernelRegistry.instance().from_config(section).decrease_onset == 0.0
    assert KernelRegistry.instance().from_config({**section, "decrease_onset": "3"}).decrease_onset == 3.0


def test_stage_defaults_fallback(tmp_path):
    assert load_stage_defaults(tmp_path / "none.yaml", {"tol": 1.0}) == {"tol": 1.0}
    path = tmp_path / "defaults.yaml"
    path.write_text("tol: 2.0\nextra: 3\n", encoding="utf-8")
    assert load_stage_defaults(path, {"tol": 1.0, "keep": 4}) == {"tol": 2.0, "keep": 4, "extra": 3}


class TestValidateOverride:
    def test_accepts_dotted_key(self):
        assert validate_override("kernel.alpha=0.5") == (True, "")

    def test_requires_equals(self):
        ok, message = validate_override("kernel.alpha")
        assert not ok
        assert "key=value" in message

    def test_rejects_malformed_key(self):
        ok, _ = validate_override("Kernel.Alpha=1")
        assert not ok

    def test_rejects_control_characters(self):
        ok, message = validate_override("kernel.family=exp\x00")
        assert not ok
        assert "control" in message


class TestValidateOutputDir:
    def test_new_directory_under_writable_parent(self, tmp_path):
        assert validate_output_dir(tmp_path / "a" / "b") == (True, "")

    def test_file_is_not_a_directory(self, tmp_path):
        target = tmp_path / "file"
        target.write_text("x", encoding="utf-8")
        ok, message = validate_output_dir(target)
        assert not ok
        assert "not a directory" in message
