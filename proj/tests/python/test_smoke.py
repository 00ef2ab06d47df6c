import os
import pathlib

import numpy as np
import pytest

import maketex

DATA = pathlib.Path(os.environ.get("MAKETEX_DATA_DIR", pathlib.Path(__file__).resolve().parents[2] / "data"))


def small_config():
    cfg = maketex.PipelineConfig()
    cfg.texture_size = 128
    cfg.render_size = 128
    cfg.gen_size = 64
    cfg.n_candidates = 12
    return cfg


def test_fixture_meshes_load():
    cube = maketex.load_mesh(DATA / "cube.obj")
    assert cube.num_faces == 12
    assert maketex.load_mesh(DATA / "sphere.obj").num_faces > 1000


def test_obj_errors_carry_a_code():
    with pytest.raises(maketex.MaketexError) as info:
        maketex.parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n")
    assert info.value.code == "MissingUVs"
    with pytest.raises(maketex.MaketexError) as info:
        maketex.parse_obj("v 0 0\n")
    assert info.value.code == "ParseError"


def test_lattice_and_labels():
    poses = maketex.fibonacci_lattice(16, image_size=64)
    assert len(poses) == 16
    dirs = np.array([p.direction() for p in poses])
    assert np.allclose(np.linalg.norm(dirs, axis=1), 1.0)
    front, back = maketex.front_back_pair()
    assert (front.label, back.label) == ("front", "back")


def test_rasterize_quad():
    pose = maketex.CameraPose(image_size=32)
    frag = maketex.rasterize(maketex.shapes.quad(0.55), pose)
    fg = frag.foreground()
    assert fg.shape == (32, 32)
    # Half extent 1.1 frames the quad as the middle half of the image.
    assert fg.sum() == 16 * 16
    uv = frag.uv()
    assert uv.shape == (32, 32, 2)
    assert uv[fg].min() > 0.0 and uv[fg].max() < 1.0
    assert (frag.face_id()[~fg] == -1).all()


def test_splat_conserves_weight():
    mesh = maketex.normalize(maketex.shapes.cube_sphere(8))
    pose = maketex.CameraPose(azimuth=0.4, elevation=0.2, image_size=64)
    frag = maketex.rasterize(mesh, pose, cull_backfaces=False)
    rng = np.random.default_rng(0)
    image = rng.random((64, 64, 3), dtype=np.float32)
    reject = rng.random((64, 64)) < 0.3
    tex = maketex.UvTexture(32)
    painted = maketex.splat(image, frag, reject, tex)
    assert tex.total_weight() == float((frag.foreground() & ~reject).sum())
    assert painted.shape == (32, 32)
    assert (painted == tex.textured_mask()).all()


def test_internal_mask_on_cube_is_empty():
    cube = maketex.normalize(maketex.load_mesh(DATA / "cube.obj"))
    for pose in maketex.fibonacci_lattice(16, image_size=64):
        assert not maketex.internal_face_mask(cube, pose).any()


def test_texture_mesh_with_flat_mock():
    cfg = small_config()
    cfg.seed = 7
    out = maketex.texture_mesh(maketex.shapes.cube_sphere(8), "a soccer ball", cfg, "mock:flat")
    assert out["texture"].shape == (128, 128, 3)
    assert out["prefill_coverage"] > 0.9
    assert out["final_coverage"] == 1.0
    assert out["stages"][0]["label"] == "front"
    assert out["stages"][0]["prompt"] == "a soccer ball, front and back view"
    again = maketex.texture_mesh(maketex.shapes.cube_sphere(8), "a soccer ball", cfg, "mock:flat")
    assert np.array_equal(out["texture"], again["texture"])


def test_enhance_at_strength_zero_keeps_input():
    cfg = small_config()
    lq = np.full((128, 128, 3), 0.25, dtype=np.float32)
    out = maketex.enhance_texture(maketex.shapes.cube_sphere(8), lq, "x", 0.0, cfg, "mock:identity")
    painted = out["painted"]
    assert painted.any()
    assert np.abs(out["prefill_texture"][painted] - 0.25).max() <= 2 / 255


def test_mock_generator_keeps_init_outside_mask():
    depth = np.zeros((8, 8), dtype=np.float32)
    depth[2:6, 2:6] = 0.5
    inpaint = np.zeros((8, 8), dtype=bool)
    inpaint[:, :4] = True
    init = np.full((8, 8, 3), 0.3, dtype=np.float32)
    rgb = maketex.mock_generate("flat", depth, inpaint, init, prompt="x", seed=1)
    assert rgb.shape == (8, 8, 3)
    assert np.allclose(rgb[:, 4:], 0.3)


def test_cli_exit_codes(tmp_path):
    code, _, err = maketex.run_cli(["texture", "--prompt", "x", "--out", str(tmp_path)])
    assert code == 1
    assert err == "error: missing required flag --mesh\n"
    code, out, _ = maketex.run_cli(["views", "--mesh", str(DATA / "sphere.obj"), "--render-size", "128",
                                    "--texture-size", "128", "--gen-size", "64", "--candidates", "8"])
    assert code == 0
    assert '"greedy_order"' in out
