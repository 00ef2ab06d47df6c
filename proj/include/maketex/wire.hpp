#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "maketex/generator.hpp"

// JSON wire format of the remote generator (POST /v1/generate):
//   request  {prompt, seed, strength, w_depth, w_inpaint, size,
//             depth_png_b64, mask_png_b64, init_png_b64}
//   response {rgb_png_b64, generator_id}
// depth and mask are 8-bit gray PNGs (depth: near bright; mask: 255 =
// regenerate), init and rgb are 8-bit RGB PNGs. `size` is the image height;
// grid requests are wider than tall.
namespace maketex::wire {

std::string base64_encode(std::span<const std::uint8_t> bytes);
// Throws ProtocolError on malformed input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

nlohmann::json encode_request(const GeneratorRequest& request);
// Throws ProtocolError when fields are missing or images do not decode.
GeneratorRequest decode_request(const nlohmann::json& body);

nlohmann::json encode_response(const ImageF& rgb, const std::string& generator_id);
// Throws ProtocolError on malformed bodies or when the image is not
// width x height.
GeneratorResponse decode_response(const nlohmann::json& body, int width, int height);

}  // namespace maketex::wire
