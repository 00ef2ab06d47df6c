"""Texture baking for UV-mapped meshes from depth-conditioned generated views."""

from ._maketex import (
    CameraPose,
    FragmentBuffer,
    MaketexError,
    PipelineConfig,
    TriMesh,
    UvTexture,
    enhance_texture,
    fibonacci_lattice,
    front_back_pair,
    frontal_filter_mask,
    internal_face_mask,
    load_mesh,
    mock_generate,
    normalize,
    parse_obj,
    rasterize,
    render_depth,
    run_cli,
    save_obj,
    selection_order,
    shapes,
    splat,
    texture_mesh,
)

__all__ = [
    "CameraPose",
    "FragmentBuffer",
    "MaketexError",
    "PipelineConfig",
    "TriMesh",
    "UvTexture",
    "enhance_texture",
    "fibonacci_lattice",
    "front_back_pair",
    "frontal_filter_mask",
    "internal_face_mask",
    "load_mesh",
    "mock_generate",
    "normalize",
    "parse_obj",
    "rasterize",
    "render_depth",
    "run_cli",
    "save_obj",
    "selection_order",
    "shapes",
    "splat",
    "texture_mesh",
]
