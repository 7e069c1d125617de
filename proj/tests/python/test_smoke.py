import json

import numpy as np
import pytest

import voidd


def test_pgm_round_trip(tmp_path):
    img = (np.arange(12, dtype=np.uint16).reshape(3, 4) * 20)
    path = tmp_path / "a.pgm"
    voidd.write_pgm(img, str(path))
    back = voidd.read_pgm(str(path))
    assert back.shape == (3, 4)
    assert np.array_equal(back, img)


def test_min_tree_small_image():
    tree = voidd.min_tree(np.array([[3, 1, 2]], dtype=np.uint16))
    assert len(tree["parent"]) == 3
    leaf = tree["pixel_node"][0, 1]
    assert tree["level"][leaf] == 1
    assert tree["area"][tree["root"]] == 3


def test_elongation_of_segment():
    mask = np.zeros((5, 30), dtype=np.uint8)
    mask[2, 5:25] = 1
    assert voidd.elongation(mask) == pytest.approx(20.89, rel=0.01)


def test_frechet_and_tre():
    a = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    b = a + [0.0, 1.0]
    assert voidd.discrete_frechet(a, b) == pytest.approx(1.0)
    gt = np.array([[0.0, 0.0], [100.0, 0.0]])
    assert voidd.tre(gt + [0.0, 1.5], gt, 0.2) == pytest.approx(0.3)


def test_thin_bar():
    mask = np.zeros((11, 30), dtype=np.uint8)
    mask[3:8, 3:27] = 1
    skel = voidd.thin(mask)
    assert skel.sum() > 10
    assert (skel.sum(axis=0) <= 1).all()


def test_vesselness_and_graph():
    img = np.full((80, 80), 200, dtype=np.uint16)
    img[38:43, 5:75] = 80
    response, nx, ny = voidd.vesselness(img, [1.5, 2.5])
    assert response.shape == img.shape
    assert response[40, 40] > response[10, 40]
    graph = voidd.extract_vessel_graph(img, phase=0, config={"vessel": {"t_high": 1.0, "t_low": 0.3}})
    assert graph["phase"] == 0
    assert len(graph["edges"]) >= 1


def test_tip_candidates_on_blank_image():
    assert voidd.extract_tip_candidates(np.full((40, 40), 128, dtype=np.uint16)) == []


def test_config_errors_are_raised():
    with pytest.raises(voidd.VoiddError):
        voidd.extract_tip_candidates(np.zeros((8, 8), dtype=np.uint16), config={"bogus": 1})
    with pytest.raises(voidd.VoiddError):
        voidd.read_pgm("/nonexistent/file.pgm")


def test_default_config_round_trips():
    cfg = voidd.default_config()
    assert cfg["tip_segmentation"]["t_max"] == 150.0
    assert json.loads(json.dumps(cfg)) == cfg


def test_synth_and_run_all_small(tmp_path):
    spec = voidd.default_scene()
    spec["n_navigation_frames"] = 6
    spec["cycle_length"] = 6
    manifest = voidd.synth(tmp_path / "seq", spec=spec)
    report = voidd.run_all(manifest, tmp_path / "out", jobs=1)
    assert report["frames"] == 6
    assert report["counts"]["correct"] + report["counts"]["missed"] + report["counts"]["wrong"] == 6
    assert (tmp_path / "out" / "report.json").exists()
