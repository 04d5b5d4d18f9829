import numpy as np
import pytest
from PIL import Image

from rootlevel.errors import SeedError
from rootlevel.models.config import EngineConfig
from rootlevel.seeding import (
    Axis,
    MarkedSlice,
    cross_section,
    embed_marks,
    load_marked_slices,
    parse_marked_slice,
    seeds_from_coords,
)
from rootlevel.volume import Volume


@pytest.fixture
def volume():
    # nx=6, ny=5, nz=4
    return Volume(data=np.full((4, 5, 6), 100, dtype=np.uint8), depth=8)


def test_red_dominant_rule():
    image = np.zeros((1, 4, 3), dtype=np.uint8)
    image[0, 0] = (200, 50, 50)
    image[0, 1] = (200, 120, 50)
    image[0, 2] = (100, 0, 0)
    image[0, 3] = (128, 64, 64)
    mask = parse_marked_slice(image, np.zeros((1, 4)))
    assert mask.tolist() == [[True, False, False, True]]


def test_marked_slice_shape_mismatch():
    with pytest.raises(SeedError):
        parse_marked_slice(np.zeros((3, 3, 3), dtype=np.uint8), np.zeros((3, 4)))


def test_cross_section_orientation(volume):
    assert cross_section(volume, Axis.Z, 0).shape == (5, 6)
    assert cross_section(volume, Axis.Y, 0).shape == (4, 6)
    assert cross_section(volume, Axis.X, 0).shape == (4, 5)
    with pytest.raises(SeedError):
        cross_section(volume, Axis.Z, 4)


def test_embed_marks_maps_each_axis(volume):
    cfg = EngineConfig()
    z_mask = np.zeros((5, 6), dtype=bool)
    z_mask[1, 2] = True  # y=1, x=2
    y_mask = np.zeros((4, 6), dtype=bool)
    y_mask[3, 5] = True  # z=3, x=5
    x_mask = np.zeros((4, 5), dtype=bool)
    x_mask[0, 4] = True  # z=0, y=4
    seeds = embed_marks(
        [
            MarkedSlice(axis=Axis.Z, index=2, mask=z_mask),
            MarkedSlice(axis=Axis.Y, index=3, mask=y_mask),
            MarkedSlice(axis=Axis.X, index=1, mask=x_mask),
        ],
        volume,
        cfg,
    )
    assert sorted(map(tuple, seeds.coords.tolist())) == [(1, 4, 0), (2, 1, 2), (5, 3, 3)]
    assert seeds.dropped == 0
    mask = seeds.mask(volume.shape)
    assert mask[2, 1, 2] and mask[3, 3, 5] and mask[0, 4, 1]


def test_embed_marks_union_is_deduplicated(volume):
    z_mask = np.zeros((5, 6), dtype=bool)
    z_mask[1, 2] = True
    x_mask = np.zeros((4, 5), dtype=bool)
    x_mask[2, 1] = True  # mismo vóxel (2, 1, 2)
    seeds = embed_marks([MarkedSlice(axis=Axis.Z, index=2, mask=z_mask), MarkedSlice(axis=Axis.X, index=2, mask=x_mask)], volume, EngineConfig())
    assert len(seeds) == 1


def test_embed_marks_drops_gated_marks(caplog):
    data = np.full((2, 2, 2), 100, dtype=np.uint8)
    data[0, 0, 0] = 0
    volume = Volume(data=data, depth=8)
    mask = np.ones((2, 2), dtype=bool)
    with caplog.at_level("WARNING"):
        seeds = embed_marks([MarkedSlice(axis=Axis.Z, index=0, mask=mask)], volume, EngineConfig(root_band=(0, 255)))
    assert len(seeds) == 3
    assert seeds.dropped == 1
    assert "descartan" in caplog.text


def test_embed_marks_root_band_gate():
    volume = Volume(data=np.full((2, 2, 2), 100, dtype=np.uint8), depth=8)
    mask = np.ones((2, 2), dtype=bool)
    with pytest.raises(SeedError, match="no hay vóxeles de inicialización"):
        embed_marks([MarkedSlice(axis=Axis.Z, index=0, mask=mask)], volume, EngineConfig(root_band=(150, 255)))


def test_no_marks_is_an_error(volume):
    with pytest.raises(SeedError, match="no hay vóxeles de inicialización"):
        embed_marks([MarkedSlice(axis=Axis.Z, index=0, mask=np.zeros((5, 6), dtype=bool))], volume, EngineConfig())


def test_seeds_from_coords_bounds(volume):
    seeds = seeds_from_coords([(0, 0, 0), (5, 4, 3)], volume)
    assert len(seeds) == 2
    with pytest.raises(SeedError):
        seeds_from_coords([(6, 0, 0)], volume)


def test_load_marked_slices(tmp_path, volume):
    image = np.zeros((5, 6, 3), dtype=np.uint8)
    image[..., :] = 100
    image[2, 3] = (255, 0, 0)
    Image.fromarray(image, mode="RGB").save(tmp_path / "init_z_0001.png")
    (tmp_path / "readme.txt").write_text("ignorado")
    slices = load_marked_slices(tmp_path, volume)
    assert len(slices) == 1
    assert slices[0].axis is Axis.Z and slices[0].index == 1
    seeds = embed_marks(slices, volume, EngineConfig())
    assert seeds.coords.tolist() == [[3, 2, 1]]


def test_load_marked_slices_wrong_size_names_file(tmp_path, volume):
    Image.fromarray(np.zeros((3, 3, 3), dtype=np.uint8), mode="RGB").save(tmp_path / "init_y_0000.png")
    with pytest.raises(SeedError, match="init_y_0000.png"):
        load_marked_slices(tmp_path, volume)


def test_load_marked_slices_requires_images(tmp_path, volume):
    with pytest.raises(SeedError):
        load_marked_slices(tmp_path, volume)
    with pytest.raises(SeedError):
        load_marked_slices(tmp_path / "missing", volume)
