"""Acceptance criteria, one test per criterion.

The terminal summary lists ``PASS``/``FAIL`` per criterion (see conftest).
"""
import itertools
import json
import math
import time
import warnings

import numpy as np
import pytest
from PIL import Image

from fairlens.augops import RandAugPolicy
from fairlens.cli import run
from fairlens.dataset_io import Manifest, Record, undersample_balance
from fairlens.metrics import Weights, d_inter, d_within, fairness_diversity, iias, iss_cross, iss_intra
from fairlens.pipeline import AugmentPart, PipelineConfig, augment_with_details
from fairlens.placement import Placement, choose_region, partition_regions
from fairlens.saliency import Rect, fine_grained_saliency, to_grayscale
from oracles import naive_d_inter, naive_d_within, naive_fairness, naive_saliency


def _weights(a, b):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return Weights(a, b)


def _random_instance(rng, unit=False):
    d = int(rng.integers(1, 17))
    groups = [rng.normal(size=(int(rng.integers(1, 9)), d)) for _ in range(int(rng.integers(1, 5)))]
    if unit:
        groups = [g / np.linalg.norm(g, axis=1, keepdims=True) for g in groups]
    return groups


def test_criterion_01_metric_oracle_equivalence():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    for _ in range(200):
        groups = _random_instance(rng)
        alpha, beta = rng.uniform(0, 0.5, 2)
        rows = [g.tolist() for g in groups]
        for g, r in zip(groups, rows):
            assert abs(d_within(g) - naive_d_within(r)) <= 1e-9
        for (g, r), (h, s) in itertools.combinations(zip(groups, rows), 2):
            assert abs(d_inter(g, h) - naive_d_inter(r, s)) <= 1e-9
        got = fairness_diversity(groups, _weights(alpha, beta))
        assert abs(got - naive_fairness(rows, alpha, beta)) <= 1e-9
    assert time.perf_counter() - start < 5.0


def test_criterion_02_bound():
    rng = np.random.default_rng(2)
    violations = 0
    for a, bound in ((0.49, 0.98), (0.5, 1.0)):
        w = _weights(a, a)
        for _ in range(10_000):
            m = fairness_diversity(_random_instance(rng, unit=True), w)
            violations += not (0.0 <= m <= bound)
    assert violations == 0


def test_criterion_03_worked_value(tmp_path):
    e = np.eye(3)
    expected = math.sqrt(2) / 4
    assert abs(fairness_diversity({"A": e[:2], "B": e[:1]}, _weights(0.5, 0.5)) - expected) <= 1e-9
    assert abs(naive_fairness([e[:2].tolist(), e[:1].tolist()], 0.5, 0.5) - expected) <= 1e-12
    feats = tmp_path / "worked.txt"
    feats.write_text("#dim=3\na1,A,1,0,0\na2,A,0,1,0\nb1,B,1,0,0\n")
    out = tmp_path / "r.json"
    assert run(["metrics", "--in", str(feats), "--out", str(out), "--alpha", "0.5", "--beta", "0.5"]) == 0
    assert abs(json.loads(out.read_text())["entries"][0]["M"] - expected) <= 1e-9


def test_criterion_04_saliency_oracle():
    rng = np.random.default_rng(4)
    radii = (1, 2, 4, 8, 16)
    for _ in range(50):
        gray = to_grayscale(rng.integers(0, 256, (16, 16, 3), dtype=np.uint8))
        assert np.max(np.abs(fine_grained_saliency(gray, radii) - naive_saliency(gray, radii))) <= 1e-6
    const = to_grayscale(np.full((16, 16, 3), 77, np.uint8))
    smap = fine_grained_saliency(const)
    assert np.all(smap == 0.0)


def test_criterion_05_geometry_tiling():
    rng = np.random.default_rng(5)
    w = h = 12
    n_boxes = 0
    for x0, x1 in itertools.combinations(range(w + 1), 2):
        for y0, y1 in itertools.combinations(range(h + 1), 2):
            box = Rect(x0, y0, x1, y1)
            part = partition_regions(w, h, box)
            cover = np.zeros((h, w), int)
            for r in list(part.cells) + [box]:
                cover[r.y0:r.y1, r.x0:r.x1] += 1
            assert np.all(cover == 1)
            areas = part.areas()
            nonzero = [(a, i) for i, a in enumerate(areas) if a > 0]
            lo = choose_region(part, Placement.MIN_AREA, rng)
            hi = choose_region(part, Placement.MAX_AREA, rng)
            if not nonzero:
                assert lo is None and hi is None
            else:
                assert lo == part.cells[min(nonzero)[1]]
                assert hi == part.cells[min((-a, i) for a, i in nonzero)[1]]
            n_boxes += 1
    assert n_boxes == 78 * 78


def test_criterion_06_pipeline_preservation():
    rng = np.random.default_rng(6)
    policy = RandAugPolicy(0, 15)
    checked = 0
    for i in range(100):
        h, w = (int(v) for v in rng.integers(8, 48, 2))
        img = rng.integers(0, 256, (h, w, 3), dtype=np.uint8)
        if i % 2:
            y, x = int(rng.integers(0, h // 2)), int(rng.integers(0, w // 2))
            img[y:y + h // 3, x:x + w // 3] = 255
        placement = list(Placement)[i % 3]
        cfg = PipelineConfig(placement, AugmentPart.NON_SALIENT, policy)
        res = augment_with_details(img, cfg, np.random.default_rng(int(rng.integers(2**32))))
        outside = np.ones((h, w), bool)
        if res.cell is not None:
            outside[res.cell.y0:res.cell.y1, res.cell.x0:res.cell.x1] = False
            checked += 1
        assert np.array_equal(res.image[outside], img[outside])
    assert checked > 0


def test_criterion_07_parallel_determinism(tmp_path):
    rng = np.random.default_rng(7)
    root = tmp_path / "corpus"
    for i in range(50):
        group = root / ("female" if i % 2 else "male")
        group.mkdir(parents=True, exist_ok=True)
        img = rng.integers(0, 100, (32, 32, 3), dtype=np.uint8)
        y, x = rng.integers(0, 20, 2)
        img[y:y + 10, x:x + 10] = 240
        Image.fromarray(img).save(group / f"{i:02d}.png")
    outs = {}
    for workers in (1, 4):
        out = tmp_path / f"out{workers}"
        assert run(["augment", "--in", str(root), "--out", str(out), "--seed", "17",
                    "--workers", str(workers)]) == 0
        outs[workers] = {p.relative_to(out): p.read_bytes() for p in sorted(out.rglob("*")) if p.is_file()}
    assert len(outs[1]) == 51
    assert outs[1] == outs[4]


def test_criterion_08_iss_iias_exactness():
    rng = np.random.default_rng(8)
    for _ in range(200):
        x = rng.normal(size=(int(rng.integers(2, 8)), int(rng.integers(1, 9))))
        y = rng.normal(size=(int(rng.integers(1, 8)), x.shape[1]))
        assert 0.0 <= iss_intra(x) <= 2.0 and 0.0 <= iss_cross(x, y) <= 2.0
        v = x[0]
        assert iss_intra(np.tile(v, (3, 1))) == 0.0
        assert iss_cross(np.tile(v, (2, 1)), np.tile(v, (4, 1))) == 0.0
        assert iss_intra(np.stack([v, -v])) == 2.0
        assert iss_cross([v], [-v]) == 2.0
        c, m, f = x, y, rng.normal(size=(3, x.shape[1]))
        assert abs(iias(c, m, f) + iias(c, f, m)) <= 1e-12
        assert iias(c, m, m) == 0.0


def test_criterion_09_balancing():
    sizes = {"a": 100, "b": 37, "c": 4}
    m = Manifest("syn", [Record(f"{g}/{i}", g) for g, n in sizes.items() for i in range(n)])
    first = undersample_balance(m, 2024)
    assert first.group_sizes() == {"a": 4, "b": 4, "c": 4}
    assert undersample_balance(m, 2024).records == first.records


def test_criterion_10_audit_throughput(tmp_path):
    rng = np.random.default_rng(10)
    root = tmp_path / "audit"
    for i in range(200):
        group = root / ("female" if i % 2 else "male")
        group.mkdir(parents=True, exist_ok=True)
        img = rng.integers(0, 256, (128, 128, 3), dtype=np.uint8)
        Image.fromarray(img).save(group / f"{i:03d}.png")
    start = time.perf_counter()
    assert run(["audit", "--in", str(root), "--out", str(tmp_path / "r.csv"),
                "--embedding", "saliency"]) == 0
    elapsed = time.perf_counter() - start
    print(f"audit of 200 images at 128x128: {elapsed:.2f} s")
    assert elapsed < 30.0
