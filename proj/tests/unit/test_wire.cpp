#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "maketex/error.hpp"
#include "maketex/generator.hpp"
#include "maketex/png_io.hpp"
#include "maketex/remote_generator.hpp"
#include "maketex/wire.hpp"

using namespace maketex;

namespace {

nlohmann::json load_fixture(const std::string& name) {
  std::ifstream in(std::string(MAKETEX_FIXTURE_DIR) + "/" + name);
  REQUIRE(in);
  return nlohmann::json::parse(in);
}

GeneratorRequest small_request(int width, int size) {
  GeneratorRequest r;
  r.size = size;
  r.prompt = "a chair, top view";
  r.seed = 0xFFFFFFFFFFFFULL;
  r.w_depth = 0.75;
  r.w_inpaint = 1.25;
  r.strength = 0.5;
  r.depth = ImageF(width, size, 1);
  r.inpaint_mask = Mask(width, size);
  r.init_rgb = ImageF(width, size, 3);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < width; ++x) {
      r.depth.at(x, y) = static_cast<float>((x + y) % 256) / 255.F;
      r.inpaint_mask.at(x, y) = (x * y) % 3 == 0 ? 1 : 0;
      for (int c = 0; c < 3; ++c) r.init_rgb.at(x, y, c) = static_cast<float>((x * 3 + c * 50) % 256) / 255.F;
    }
  }
  return r;
}

// Local stand-in for the generator service.
class MockService {
 public:
  enum class Mode { Ok, Status500, NotJson, WrongSize, Slow };

  explicit MockService(Mode mode) : mode_(mode) {
    server_.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) { res.status = 200; });
    server_.Post("/v1/generate", [this](const httplib::Request& req, httplib::Response& res) {
      const int now = ++in_flight_;
      int seen = max_in_flight_.load();
      while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(mode_ == Mode::Slow ? 2500 : 50));
      handle(req, res);
      --in_flight_;
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockService() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int max_in_flight() const { return max_in_flight_.load(); }

 private:
  void handle(const httplib::Request& req, httplib::Response& res) {
    switch (mode_) {
      case Mode::Status500:
        res.status = 500;
        res.set_content("boom", "text/plain");
        return;
      case Mode::NotJson:
        res.set_content("{not json", "application/json");
        return;
      default:
        break;
    }
    const GeneratorRequest r = wire::decode_request(nlohmann::json::parse(req.body));
    ImageF rgb = MockGenerator(MockKind::Checker).generate(r).rgb;
    if (mode_ == Mode::WrongSize) rgb = ImageF(3, 3, 3);
    res.set_content(wire::encode_response(rgb, "mock-service").dump(), "application/json");
  }

  Mode mode_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
};

Errc error_of(Generator& gen, const GeneratorRequest& r) {
  try {
    gen.generate(r);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a generator error");
  return Errc::InvalidArgument;
}

}  // namespace

TEST_CASE("base64 round trip and padding") {
  const std::vector<std::uint8_t> bytes{0, 1, 2, 250, 251, 252, 253};
  for (std::size_t n = 0; n <= bytes.size(); ++n) {
    const std::vector<std::uint8_t> part(bytes.begin(), bytes.begin() + static_cast<long>(n));
    CHECK(wire::base64_decode(wire::base64_encode(part)) == part);
  }
  CHECK(wire::base64_encode(std::vector<std::uint8_t>{'M', 'a'}) == "TWE=");
  CHECK(wire::base64_encode(std::vector<std::uint8_t>{'M'}) == "TQ==");
  const auto m = wire::base64_decode("TQ==");
  CHECK(m == std::vector<std::uint8_t>{'M'});
  CHECK_THROWS_AS(wire::base64_decode("T!=="), Error);
  CHECK_THROWS_AS(wire::base64_decode("TQ="), Error);
}

TEST_CASE("golden request decodes to the documented pixels") {
  const GeneratorRequest r = wire::decode_request(load_fixture("golden_request.json"));
  CHECK(r.prompt == "a soccer ball, front and back view");
  CHECK(r.seed == 42);
  CHECK(r.strength == 1.0);
  CHECK(r.w_depth == 1.0);
  CHECK(r.w_inpaint == 0.0);
  CHECK(r.size == 8);
  REQUIRE(r.width() == 16);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 16; ++x) {
      CHECK(std::lround(r.depth.at(x, y) * 255) == (x * 16 + y * 3) % 256);
      CHECK(r.inpaint_mask.at(x, y) == (x >= 8 ? 1 : 0));
      CHECK(std::lround(r.init_rgb.at(x, y, 0) * 255) == x * 15);
      CHECK(std::lround(r.init_rgb.at(x, y, 1) * 255) == y * 30);
      CHECK(std::lround(r.init_rgb.at(x, y, 2) * 255) == 128);
    }
  }
}

TEST_CASE("golden response parses to the documented pixels") {
  const GeneratorResponse resp = wire::decode_response(load_fixture("golden_response.json"), 16, 8);
  CHECK(resp.generator_id == "golden");
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 16; ++x) {
      CHECK(std::lround(resp.rgb.at(x, y, 0) * 255) == (x * 7 + y) % 256);
      CHECK(std::lround(resp.rgb.at(x, y, 1) * 255) == (255 - x * 9) % 256);
      CHECK(std::lround(resp.rgb.at(x, y, 2) * 255) == y * 31);
    }
  }
  try {
    wire::decode_response(load_fixture("golden_response.json"), 8, 8);
    FAIL("expected ProtocolError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ProtocolError);
  }
}

TEST_CASE("re-encoding the golden request keeps every field") {
  const nlohmann::json golden = load_fixture("golden_request.json");
  const nlohmann::json again = wire::encode_request(wire::decode_request(golden));
  for (const auto& [key, value] : golden.items()) {
    REQUIRE(again.contains(key));
    if (key.ends_with("_b64")) continue;
    CHECK(again[key] == value);
  }
  CHECK(again.size() == golden.size());
  const GeneratorRequest a = wire::decode_request(golden);
  const GeneratorRequest b = wire::decode_request(again);
  CHECK(a.depth == b.depth);
  CHECK(a.inpaint_mask == b.inpaint_mask);
  CHECK(a.init_rgb == b.init_rgb);
}

TEST_CASE("request encoding uses 8-bit PNGs with 255 meaning regenerate") {
  const GeneratorRequest r = small_request(12, 6);
  const nlohmann::json j = wire::encode_request(r);
  const ImageF mask = png::decode(wire::base64_decode(j["mask_png_b64"].get<std::string>()), 1);
  for (std::size_t i = 0; i < mask.pixel_count(); ++i) CHECK(mask[i] == (r.inpaint_mask[i] ? 1.F : 0.F));
  const GeneratorRequest back = wire::decode_request(j);
  CHECK(back.seed == r.seed);
  CHECK(back.w_inpaint == r.w_inpaint);
  CHECK(back.inpaint_mask == r.inpaint_mask);
  for (std::size_t i = 0; i < r.depth.pixel_count(); ++i) CHECK(std::abs(back.depth[i] - r.depth[i]) < 1e-6);
}

TEST_CASE("malformed bodies raise ProtocolError") {
  nlohmann::json j = wire::encode_request(small_request(8, 8));
  j.erase("seed");
  CHECK_THROWS_AS(wire::decode_request(j), Error);
  j = wire::encode_request(small_request(8, 8));
  j["depth_png_b64"] = "AAAA";
  try {
    wire::decode_request(j);
    FAIL("expected ProtocolError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ProtocolError);
  }
  j = wire::encode_request(small_request(8, 8));
  j["size"] = 3;
  CHECK_THROWS_AS(wire::decode_request(j), Error);
  CHECK_THROWS_AS(wire::decode_response(nlohmann::json::array(), 8, 8), Error);
  CHECK_THROWS_AS(wire::decode_response(nlohmann::json{{"generator_id", "x"}}, 8, 8), Error);
}

TEST_CASE("remote client against a local service") {
  MockService service(MockService::Mode::Ok);
  RemoteGenerator gen(service.url() + "/");
  CHECK(gen.base_url() == service.url());
  CHECK(gen.healthy());
  const GeneratorRequest r = small_request(16, 8);
  const GeneratorResponse resp = gen.generate(r);
  CHECK(resp.generator_id == "mock-service");
  const ImageF local = MockGenerator(MockKind::Checker).generate(wire::decode_request(wire::encode_request(r))).rgb;
  REQUIRE(resp.rgb.same_size(local));
  for (std::size_t i = 0; i < local.values().size(); ++i) CHECK(std::abs(resp.rgb[i] - local[i]) <= 0.5 / 255 + 1e-6);
}

TEST_CASE("remote batch bounds requests in flight") {
  MockService service(MockService::Mode::Ok);
  RemoteOptions opts;
  opts.max_in_flight = 2;
  RemoteGenerator gen(service.url(), opts);
  std::vector<GeneratorRequest> reqs;
  for (int i = 0; i < 6; ++i) {
    reqs.push_back(small_request(8, 8));
    reqs.back().seed = static_cast<std::uint64_t>(i);
  }
  const auto items = gen.generate_batch(reqs);
  REQUIRE(items.size() == 6);
  for (std::size_t i = 0; i < items.size(); ++i) {
    REQUIRE(items[i].ok());
    CHECK(items[i].response->rgb == gen.generate(reqs[i]).rgb);
  }
  CHECK(service.max_in_flight() <= 2);
  CHECK(service.max_in_flight() >= 1);
}

TEST_CASE("remote failure modes") {
  const GeneratorRequest r = small_request(8, 8);
  SUBCASE("HTTP 500") {
    MockService service(MockService::Mode::Status500);
    RemoteGenerator gen(service.url());
    CHECK(error_of(gen, r) == Errc::BackendUnavailable);
  }
  SUBCASE("body is not JSON") {
    MockService service(MockService::Mode::NotJson);
    RemoteGenerator gen(service.url());
    CHECK(error_of(gen, r) == Errc::ProtocolError);
  }
  SUBCASE("image of the wrong size") {
    MockService service(MockService::Mode::WrongSize);
    RemoteGenerator gen(service.url());
    CHECK(error_of(gen, r) == Errc::ProtocolError);
  }
  SUBCASE("deadline expires") {
    MockService service(MockService::Mode::Slow);
    RemoteOptions opts;
    opts.timeout = std::chrono::seconds(1);
    RemoteGenerator gen(service.url(), opts);
    CHECK(error_of(gen, r) == Errc::Timeout);
  }
  SUBCASE("nothing listening") {
    RemoteGenerator gen("http://127.0.0.1:9");
    CHECK(!gen.healthy());
    CHECK(error_of(gen, r) == Errc::BackendUnavailable);
    const std::vector<GeneratorRequest> two{r, r};
    const auto items = gen.generate_batch(two);
    CHECK(!items[0].ok());
    CHECK(items[1].error == Errc::BackendUnavailable);
  }
}
