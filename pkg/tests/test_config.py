import pytest

from rootlevel.config_file import load_phantom_spec, load_run_file
from rootlevel.errors import ConfigError
from rootlevel.models.config import EngineConfig, RunConfig, build
from rootlevel.models.presets import PRESETS, preset_values


def test_engine_defaults():
    cfg = EngineConfig()
    assert (cfg.b, cfg.nu, cfg.s, cfg.t, cfg.k) == (10, 1.0, 10, 1, 100)
    assert cfg.dt_step == 1.0 and cfg.g_min == 1 and cfg.max_iters == 5000
    assert cfg.explore_incrementally and cfg.root_band is None
    assert cfg.band_limits(8) == (0, 255)
    assert cfg.band_limits(16) == (0, 65535)


@pytest.mark.parametrize(
    "values",
    [
        {"b": 10, "s": 5},
        {"b": 0, "s": 5},
        {"k": 0},
        {"dt_step": 0.0},
        {"root_band": (200, 100)},
        {"history_scale": 0},
        {"t": 255},
        {"unknown": 1},
    ],
)
def test_invalid_engine_configs(values):
    with pytest.raises(ConfigError):
        build(EngineConfig, **values)


def test_run_config_needs_exactly_one_source(tmp_path):
    with pytest.raises(ConfigError, match="exactamente una entrada"):
        build(RunConfig, init_dir=tmp_path)
    with pytest.raises(ConfigError, match="exactamente una entrada"):
        build(RunConfig, volume_dir=tmp_path, phantom=tmp_path / "p.cfg")


def test_run_config_rules(tmp_path):
    with pytest.raises(ConfigError, match="raw requiere dims"):
        build(RunConfig, raw=tmp_path / "v.raw", init_dir=tmp_path)
    with pytest.raises(ConfigError, match="init-dir required"):
        build(RunConfig, volume_dir=tmp_path)
    cfg = build(RunConfig, phantom=tmp_path / "p.cfg")
    assert cfg.engine() == EngineConfig()


def test_presets():
    assert preset_values("soybean-clay") == {"t": 1, "k": 100, "b": 10, "nu": 1.2}
    assert preset_values("maize-clay-2")["b"] == 20
    assert preset_values("cassava-berger")["explore_incrementally"] is False
    assert "explore_incrementally" not in preset_values("maize-clay-1")
    for name in PRESETS:
        build(EngineConfig, **preset_values(name))
    with pytest.raises(KeyError):
        preset_values("wheat")


def test_run_file_parsing(tmp_path):
    path = tmp_path / "ds.cfg"
    path.write_text(
        "# conjunto 1\n"
        "volume-dir = data/vol   # pila\n"
        "init_dir = data/init\n"
        "\n"
        "b = 10\n"
        "nu = 1\n"
        "root-band = 90, 255\n"
        "explore-incrementally = false\n"
    )
    values = load_run_file(path)
    assert values["root_band"] == ["90", "255"]
    cfg = build(RunConfig, **values)
    assert cfg.b == 10 and cfg.nu == 1.0
    assert cfg.root_band == (90, 255)
    assert cfg.explore_incrementally is False
    assert str(cfg.volume_dir) == "data/vol"


def test_unknown_key_names_key_and_line(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("b = 10\n\nbandwidth = 3\n")
    with pytest.raises(ConfigError, match=r"bad.cfg:3: clave desconocida 'bandwidth'"):
        load_run_file(path)


def test_line_without_equals(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("b 10\n")
    with pytest.raises(ConfigError, match="bad.cfg:1"):
        load_run_file(path)


def test_phantom_spec_file(tmp_path):
    path = tmp_path / "phantom.cfg"
    path.write_text(
        "dims = 64, 48, 32\n"
        "mu1 = 70\n"
        "mu2 = 170\n"
        "seed = 9\n"
        "tube = 32,24,0:5  32,24,31:3\n"
        "tube = 32,24,10:2\n"
        "granules = 5\n"
        "granule-radius = 2, 4\n"
        "granule-rim = true\n"
        "granule = 10,10,10:3\n"
    )
    spec = load_phantom_spec(path)
    assert spec.dims == (64, 48, 32)
    assert spec.seed == 9 and spec.mu2 == 170
    assert len(spec.tubes) == 2
    assert spec.tubes[0].points == [(32, 24, 0), (32, 24, 31)]
    assert spec.tubes[0].radii == [5, 3]
    assert spec.granules.count == 5 and spec.granules.rim
    assert spec.granules.radius_range == (2, 4)
    assert spec.granules.centers == [(10, 10, 10)]


def test_phantom_spec_errors(tmp_path):
    path = tmp_path / "phantom.cfg"
    path.write_text("dims = 8,8,8\ntube = 1,2:3\n")
    with pytest.raises(ConfigError, match="punto inválido"):
        load_phantom_spec(path)
    path.write_text("mu1 = 3\n")
    with pytest.raises(ConfigError, match="dims"):
        load_phantom_spec(path)
    path.write_text("dims = 8,8,8\ntube = 1,2,3:0.5\n")
    with pytest.raises(ConfigError):
        load_phantom_spec(path)
