"""Regenerates the golden wire-protocol fixture with Pillow.

Pixel formulas are restated in tests/unit/test_wire.cpp.
"""
import base64
import io
import json
import pathlib

from PIL import Image

W, H = 16, 8
HERE = pathlib.Path(__file__).parent


def png_b64(mode, pixels):
    img = Image.new(mode, (W, H))
    img.putdata(pixels)
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


coords = [(x, y) for y in range(H) for x in range(W)]
depth = [(x * 16 + y * 3) % 256 for x, y in coords]
mask = [255 if x >= 8 else 0 for x, y in coords]
init = [(x * 15, y * 30, 128) for x, y in coords]
rgb = [((x * 7 + y) % 256, (255 - x * 9) % 256, y * 31) for x, y in coords]

request = {
    "prompt": "a soccer ball, front and back view",
    "seed": 42,
    "strength": 1.0,
    "w_depth": 1.0,
    "w_inpaint": 0.0,
    "size": H,
    "depth_png_b64": png_b64("L", depth),
    "mask_png_b64": png_b64("L", mask),
    "init_png_b64": png_b64("RGB", init),
}
response = {"rgb_png_b64": png_b64("RGB", rgb), "generator_id": "golden"}

(HERE / "golden_request.json").write_text(json.dumps(request, indent=2) + "\n")
(HERE / "golden_response.json").write_text(json.dumps(response, indent=2) + "\n")
