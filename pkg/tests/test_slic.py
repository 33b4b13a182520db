import numpy as np
import pytest

from rime.slic import (
    SlicParams, _assign, enforce_connectivity, gradient_perturb, grid_centers, relabel_sequential,
    rgb_to_lab, slic,
)
from fixtures import real_image
from oracles import flood_components


def test_k1_constant():
    img = real_image("camera", 40)
    assert (slic(img, SlicParams(k=1)) == 0).all()


def test_grid_centres():
    assert grid_centers(100, 100, 4) == [(25, 25), (75, 25), (25, 75), (75, 75)]
    assert len(grid_centers(481, 321, 600)) == pytest.approx(600, rel=0.05)


def test_two_halves_split_at_column_10():
    img = np.zeros((20, 20))
    img[:, 10:] = 255
    lab = slic(img, SlicParams(k=2, compactness=1))
    assert (lab[:, :10] == lab[0, 0]).all() and (lab[:, 10:] == lab[0, 19]).all()
    assert lab[0, 0] != lab[0, 19]


def test_gradient_perturb():
    flat = np.full((9, 9), 50.0)
    assert gradient_perturb(flat, (4, 4)) == (4, 4)
    img = flat.copy()
    img[4, 5] = 255  # bright pixel right of the centre
    x, y = gradient_perturb(img, (4, 4))
    assert x < 5 and (x, y) != (4, 4)
    grad = np.zeros((9, 9))
    grad[4, 4] = 1
    for y in range(9):
        for x in range(9):
            if (x, y) != (4, 4):
                grad[y, x] = 1 + abs(x - 3) + abs(y - 3)
    assert gradient_perturb(None, (4, 4), grad) == (4, 4)
    # at the corner only the four valid positions compete
    g = np.ones((5, 5))
    g[1, 1] = 0
    assert gradient_perturb(None, (0, 0), g) == (1, 1)
    g[2, 2] = -1
    assert gradient_perturb(None, (0, 0), g) == (1, 1)


def test_enforce_connectivity_examples():
    lab = np.array([[0, 0, 1], [0, 0, 1]])
    assert (enforce_connectivity(lab, 2) == lab).all()
    lab = np.full((3, 3), 3)
    lab[1, 1] = 5
    assert (enforce_connectivity(lab, 2) == 3).all()
    # fragment of label 7 borders labels 1 and 2 with two unit edges each
    lab = np.array([[1, 1, 1, 1],
                    [1, 7, 2, 2],
                    [1, 7, 2, 2],
                    [2, 2, 2, 2]])
    lab[2, 0] = 1
    lab[3, :] = [1, 2, 2, 2]
    out = enforce_connectivity(lab, 3)
    assert out[1, 1] == out[2, 1] == 1


def test_enforce_connectivity_tie_smaller_label():
    lab = np.array([[1, 1, 1],
                    [1, 9, 2],
                    [2, 2, 2]])
    # 9 touches 1 on two edges (top, left) and 2 on two edges (right, bottom)
    assert enforce_connectivity(lab, 2)[1, 1] == 1


def test_connected_output():
    for name in ("astronaut", "coins", "chelsea"):
        img = real_image(name, 96)
        lab = slic(img, SlicParams(k=50))
        comp, n = flood_components(lab)
        assert n == lab.max() + 1
        assert set(np.unique(lab)) == set(range(n))


def test_assignment_window():
    rng = np.random.default_rng(0)
    feat = rng.uniform(0, 100, (40, 50, 3))
    S = 7.3
    centers = [(float(x), float(y), feat[y, x]) for x, y in grid_centers(50, 40, round(50 * 40 / S ** 2))]
    lab = _assign(feat, centers, S, 10.0)
    yy, xx = np.nonzero(lab >= 0)
    cx = np.array([centers[c][0] for c in lab[yy, xx]])
    cy = np.array([centers[c][1] for c in lab[yy, xx]])
    assert np.maximum(abs(xx - cx), abs(yy - cy)).max() <= 2 * S


def test_lab_matches_reference():
    from skimage.color import rgb2lab

    rng = np.random.default_rng(1)
    rgb = rng.integers(0, 256, (64, 64, 3)).astype(float)
    rgb[0, :8] = [[0, 0, 0], [255, 255, 255], [255, 0, 0], [0, 255, 0], [0, 0, 255], [10, 10, 10], [128, 128, 128], [5, 200, 90]]
    assert np.abs(rgb_to_lab(rgb) - rgb2lab(rgb / 255.0)).max() < 1e-2


def test_deterministic():
    img = real_image("astronaut", 120)
    a = slic(img, SlicParams(k=80))
    b = slic(img.copy(), SlicParams(k=80))
    assert a.tobytes() == b.tobytes()


def test_params():
    with pytest.raises(ValueError):
        SlicParams(k=0)
    with pytest.raises(ValueError):
        SlicParams()
    with pytest.raises(ValueError):
        slic(np.zeros((3, 3)), SlicParams(k=10))
    assert SlicParams(region_size=10).count_for(100, 50) == 50


def test_relabel_sequential():
    assert relabel_sequential(np.array([[5, 5, 2], [9, 2, 2]])).tolist() == [[0, 0, 1], [2, 1, 1]]
