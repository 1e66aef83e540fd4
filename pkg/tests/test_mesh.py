import numpy as np
import pytest

from formspect import mesh as meshmod
from formspect.mesh import MeshError


def test_disk_mesh_basic(disk_h01):
    disk_h01.validate()
    assert np.all(disk_h01.triangle_areas() > 0)
    bidx = disk_h01.boundary_vertex_indices()
    r = np.hypot(*disk_h01.vertices[bidx].T)
    assert np.allclose(r, 1.0, atol=1e-12)
    assert np.allclose(disk_h01.centroid(), 0.0, atol=1e-12)


def test_boundary_normals_outward(disk_h01):
    for f in disk_h01.boundary_facets:
        mid = 0.5 * (disk_h01.vertices[f.endpoints[0]]
                     + disk_h01.vertices[f.endpoints[1]])
        assert float(mid @ f.outward_normal) > 0


def test_boundary_single_ccw_loop(disk_h01):
    succ = {f.endpoints[0]: f.endpoints[1] for f in disk_h01.boundary_facets}
    start = next(iter(succ))
    cur, steps = succ[start], 1
    while cur != start:
        cur = succ[cur]
        steps += 1
    assert steps == len(disk_h01.boundary_facets)
    # CCW loop encloses positive area
    loop = [start]
    cur = succ[start]
    while cur != start:
        loop.append(cur)
        cur = succ[cur]
    v = disk_h01.vertices[loop]
    assert 0.5 * np.sum(meshmod.cross2(v, np.roll(v, -1, axis=0))) > 0


def test_scale_covariance():
    m1 = meshmod.gen_disk(1.0, 0.25)
    m2 = meshmod.gen_disk(2.0, 0.5)
    assert np.allclose(m2.vertices, 2.0 * m1.vertices, atol=1e-12)
    assert np.array_equal(m2.triangles, m1.triangles)


def test_save_load_roundtrip(tmp_path, disk_coarse):
    path = tmp_path / "disk.off"
    meshmod.save_mesh(disk_coarse, path)
    m = meshmod.load_mesh(path)
    assert np.array_equal(m.vertices, disk_coarse.vertices)
    assert np.array_equal(m.triangles, disk_coarse.triangles)


def test_load_rejects_bad_files(tmp_path):
    bad = tmp_path / "bad.off"
    bad.write_text("NOT-OFF\n")
    with pytest.raises(MeshError):
        meshmod.load_mesh(bad)
    bad.write_text("OFF\nx y z\n")
    with pytest.raises(MeshError):
        meshmod.load_mesh(bad)
    # clockwise triangle
    bad.write_text("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 2 1\n")
    with pytest.raises(MeshError):
        meshmod.load_mesh(bad)


def test_polygon_validation():
    with pytest.raises(ValueError):
        meshmod.gen_polygon([(0, 0), (1, 1), (1, 0), (0, 1)], 0.3)  # bowtie
    with pytest.raises(ValueError):
        meshmod.gen_polygon([(0, 0), (0, 1), (1, 0)], 0.3)  # clockwise
    with pytest.raises(ValueError):
        meshmod.gen_polygon([(0, 0), (1, 0)], 0.3)


def test_gen_disk_validation():
    with pytest.raises(ValueError):
        meshmod.gen_disk(-1.0, 0.1)
    with pytest.raises(ValueError):
        meshmod.gen_disk(1.0, 2.0)


def test_ellipse_boundary_on_curve():
    m = meshmod.gen_ellipse(1.3, 0.8, 0.2)
    m.validate()
    bidx = m.boundary_vertex_indices()
    v = m.vertices[bidx]
    assert np.allclose((v[:, 0] / 1.3) ** 2 + (v[:, 1] / 0.8) ** 2, 1.0, atol=1e-9)


def test_annulus_two_loops():
    m = meshmod.gen_annulus(0.5, 1.0, 0.2)
    m.validate()
    starts = {f.endpoints[0] for f in m.boundary_facets}
    succ = {f.endpoints[0]: f.endpoints[1] for f in m.boundary_facets}
    loops = 0
    seen = set()
    for s in starts:
        if s in seen:
            continue
        loops += 1
        cur = s
        while True:
            seen.add(cur)
            cur = succ[cur]
            if cur == s:
                break
    assert loops == 2
