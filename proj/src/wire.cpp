#include "maketex/wire.hpp"

#include <openssl/evp.h>

#include "maketex/error.hpp"
#include "maketex/png_io.hpp"

namespace maketex::wire {
namespace {

ImageF mask_to_image(const Mask& mask) {
  ImageF out(mask.width(), mask.height(), 1);
  for (std::size_t i = 0; i < mask.values().size(); ++i) out[i] = mask[i] != 0 ? 1.F : 0.F;
  return out;
}

ImageF decode_png_field(const nlohmann::json& body, const char* key, int channels) {
  if (!body.contains(key) || !body[key].is_string()) {
    throw Error(Errc::ProtocolError, std::string("missing string field ") + key);
  }
  try {
    return png::decode(base64_decode(body[key].get<std::string>()), channels);
  } catch (const Error& e) {
    if (e.code() == Errc::ProtocolError) throw;
    throw Error(Errc::ProtocolError, std::string(key) + ": " + e.what());
  }
}

template <class T>
T field(const nlohmann::json& body, const char* key) {
  if (!body.contains(key)) throw Error(Errc::ProtocolError, std::string("missing field ") + key);
  try {
    return body[key].get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ProtocolError, std::string("bad field ") + key + ": " + e.what());
  }
}

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw Error(Errc::ProtocolError, "base64 length is not a multiple of 4");
  std::vector<std::uint8_t> out(3 * (text.size() / 4));
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw Error(Errc::ProtocolError, "invalid base64");
  std::size_t len = static_cast<std::size_t>(n);
  // EVP_DecodeBlock keeps the bytes produced by '=' padding.
  if (!text.empty() && text.back() == '=') --len;
  if (text.size() >= 2 && text[text.size() - 2] == '=') --len;
  out.resize(len);
  return out;
}

nlohmann::json encode_request(const GeneratorRequest& request) {
  request.validate();
  return {
      {"prompt", request.prompt},
      {"seed", request.seed},
      {"strength", request.strength},
      {"w_depth", request.w_depth},
      {"w_inpaint", request.w_inpaint},
      {"size", request.size},
      {"depth_png_b64", base64_encode(png::encode8(request.depth))},
      {"mask_png_b64", base64_encode(png::encode8(mask_to_image(request.inpaint_mask)))},
      {"init_png_b64", base64_encode(png::encode8(request.init_rgb))},
  };
}

GeneratorRequest decode_request(const nlohmann::json& body) {
  if (!body.is_object()) throw Error(Errc::ProtocolError, "request body is not an object");
  GeneratorRequest req;
  req.prompt = field<std::string>(body, "prompt");
  req.seed = field<std::uint64_t>(body, "seed");
  req.strength = field<double>(body, "strength");
  req.w_depth = field<double>(body, "w_depth");
  req.w_inpaint = field<double>(body, "w_inpaint");
  req.size = field<int>(body, "size");
  req.depth = decode_png_field(body, "depth_png_b64", 1);
  const ImageF mask = decode_png_field(body, "mask_png_b64", 1);
  req.inpaint_mask = Mask(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.values().size(); ++i) req.inpaint_mask[i] = mask[i] >= 0.5F ? 1 : 0;
  req.init_rgb = decode_png_field(body, "init_png_b64", 3);
  try {
    req.validate();
  } catch (const Error& e) {
    throw Error(Errc::ProtocolError, e.message());
  }
  return req;
}

nlohmann::json encode_response(const ImageF& rgb, const std::string& generator_id) {
  return {{"rgb_png_b64", base64_encode(png::encode8(rgb))}, {"generator_id", generator_id}};
}

GeneratorResponse decode_response(const nlohmann::json& body, int width, int height) {
  if (!body.is_object()) throw Error(Errc::ProtocolError, "response body is not an object");
  GeneratorResponse resp;
  resp.rgb = decode_png_field(body, "rgb_png_b64", 3);
  resp.generator_id = field<std::string>(body, "generator_id");
  if (resp.rgb.width() != width || resp.rgb.height() != height) {
    throw Error(Errc::ProtocolError, "response image is " + std::to_string(resp.rgb.width()) + "x" +
                                         std::to_string(resp.rgb.height()) + ", expected " + std::to_string(width) +
                                         "x" + std::to_string(height));
  }
  return resp;
}

}  // namespace maketex::wire
