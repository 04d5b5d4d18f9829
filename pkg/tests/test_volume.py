import numpy as np
import pytest
import tifffile
from PIL import Image

from rootlevel.errors import DataError, VolumeLoadError
from rootlevel.volume import Volume, VoxelCoord, load_raw, load_slice_stack, save_raw, write_mask_stack


def _write_png(path, array):
    Image.fromarray(np.asarray(array, dtype=np.uint8), mode="L").save(path)


def test_dims_follow_x_fastest_layout():
    data = np.arange(24, dtype=np.uint8).reshape(4, 3, 2)
    volume = Volume(data=data, depth=8)
    assert volume.dims == (2, 3, 4)
    assert volume.grey(VoxelCoord(x=1, y=0, z=0)) == 1
    assert volume.grey(VoxelCoord(x=0, y=1, z=0)) == 2
    assert volume.grey(VoxelCoord(x=0, y=0, z=1)) == 6
    assert volume.levels == 256


def test_volume_is_read_only():
    volume = Volume(data=np.zeros((2, 2, 2), dtype=np.uint8), depth=8)
    with pytest.raises(ValueError):
        volume.data[0, 0, 0] = 1


def test_volume_rejects_bad_shapes_and_depths():
    with pytest.raises(DataError):
        Volume(data=np.zeros((4, 4), dtype=np.uint8), depth=8)
    with pytest.raises(DataError):
        Volume(data=np.zeros((2, 2, 2), dtype=np.uint8), depth=12)
    with pytest.raises(DataError):
        Volume(data=np.full((2, 2, 2), 300, dtype=np.int32), depth=8)


def test_contains():
    volume = Volume(data=np.zeros((3, 4, 5), dtype=np.uint8), depth=8)
    assert volume.contains(VoxelCoord(4, 3, 2))
    assert not volume.contains(VoxelCoord(5, 0, 0))
    assert not volume.contains(VoxelCoord(0, 0, -1))


def test_raw_size_mismatch_names_expected_and_actual(tmp_path):
    path = tmp_path / "vol.raw"
    path.write_bytes(b"\x00" * 23)
    with pytest.raises(VolumeLoadError, match="expected 24, got 23 bytes"):
        load_raw(path, (2, 3, 4), 8)


def test_raw_16_bit_is_byte_identical_after_save(tmp_path, rng):
    data = rng.integers(0, 65536, size=(3, 4, 5), dtype=np.uint16)
    path = tmp_path / "vol.raw"
    path.write_bytes(data.astype("<u2").tobytes())
    volume = load_raw(path, (5, 4, 3), 16)
    assert np.array_equal(volume.data, data)
    out = tmp_path / "copy.raw"
    save_raw(volume, out)
    assert out.read_bytes() == path.read_bytes()


def test_slice_stack_is_alphabetical(tmp_path):
    for name, value in [("b.png", 2), ("a.png", 1), ("c.png", 3)]:
        _write_png(tmp_path / name, np.full((4, 5), value))
    (tmp_path / "notes.txt").write_text("no es un corte")
    volume = load_slice_stack(tmp_path)
    assert volume.dims == (5, 4, 3)
    assert volume.depth == 8
    assert [int(volume.data[z, 0, 0]) for z in range(3)] == [1, 2, 3]


def test_slice_stack_mismatch_names_file(tmp_path):
    _write_png(tmp_path / "s000.png", np.zeros((4, 5)))
    _write_png(tmp_path / "s001.png", np.zeros((4, 6)))
    with pytest.raises(VolumeLoadError, match="s001.png"):
        load_slice_stack(tmp_path)


def test_slice_stack_rejects_multichannel(tmp_path):
    Image.fromarray(np.zeros((4, 5, 3), dtype=np.uint8), mode="RGB").save(tmp_path / "s.png")
    with pytest.raises(VolumeLoadError, match="s.png"):
        load_slice_stack(tmp_path)


def test_slice_stack_empty_directory(tmp_path):
    with pytest.raises(VolumeLoadError):
        load_slice_stack(tmp_path)


def test_slice_stack_16_bit_tiff(tmp_path):
    for z in range(2):
        tifffile.imwrite(tmp_path / f"s{z}.tif", np.full((3, 3), 1000 + z, dtype=np.uint16))
    volume = load_slice_stack(tmp_path)
    assert volume.depth == 16
    assert volume.data.dtype == np.uint16
    assert int(volume.data[1, 2, 2]) == 1001


def test_write_mask_stack(tmp_path):
    mask = np.zeros((2, 3, 4), dtype=bool)
    mask[1, 2, 3] = True
    paths = write_mask_stack(mask, tmp_path / "out")
    assert [p.name for p in paths] == ["mask_00000.png", "mask_00001.png"]
    with Image.open(paths[1]) as img:
        plane = np.asarray(img)
    assert plane.dtype == np.uint8
    assert plane[2, 3] == 255
    assert plane.sum() == 255


def test_mask_stack_reloads_as_the_same_volume(tmp_path, rng):
    mask = rng.random((5, 6, 7)) < 0.3
    write_mask_stack(mask, tmp_path / "mask")
    volume = load_slice_stack(tmp_path / "mask")
    assert volume.depth == 8
    assert volume.dims == (7, 6, 5)
    assert set(np.unique(volume.data).tolist()) <= {0, 255}
    assert np.array_equal(volume.data == 255, mask)
