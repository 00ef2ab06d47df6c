#include "maketex/remote_generator.hpp"

#include <algorithm>
#include <thread>

#include <httplib.h>

#include "maketex/wire.hpp"

namespace maketex {
namespace {

httplib::Client make_client(const std::string& url, std::chrono::seconds timeout) {
  httplib::Client client(url);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  return client;
}

[[noreturn]] void raise_transport(httplib::Error err, const std::string& url) {
  const std::string what = httplib::to_string(err) + " (" + url + ")";
  if (err == httplib::Error::ConnectionTimeout) throw Error(Errc::Timeout, what);
  if (err == httplib::Error::Read) throw Error(Errc::Timeout, what);
  throw Error(Errc::BackendUnavailable, what);
}

}  // namespace

RemoteGenerator::RemoteGenerator(std::string base_url, RemoteOptions options)
    : base_url_(std::move(base_url)), options_(options) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  if (base_url_.empty()) throw Error(Errc::InvalidArgument, "empty generator url");
  options_.max_in_flight = std::clamp(options_.max_in_flight, 1, 256);
  slots_ = std::make_unique<std::counting_semaphore<256>>(options_.max_in_flight);
}

RemoteGenerator::~RemoteGenerator() = default;

bool RemoteGenerator::healthy() const {
  auto client = make_client(base_url_, options_.timeout);
  auto res = client.Get("/v1/health");
  return res && res->status == 200;
}

GeneratorResponse RemoteGenerator::generate(const GeneratorRequest& request) {
  const auto start = std::chrono::steady_clock::now();
  const std::string body = wire::encode_request(request).dump();
  slots_->acquire();
  httplib::Result res = [&] {
    auto client = make_client(base_url_, options_.timeout);
    auto r = client.Post("/v1/generate", body, "application/json");
    slots_->release();
    return r;
  }();
  if (!res) raise_transport(res.error(), base_url_);
  if (res->status != 200) {
    throw Error(Errc::BackendUnavailable, "generator answered HTTP " + std::to_string(res->status));
  }
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ProtocolError, std::string("response is not JSON: ") + e.what());
  }
  GeneratorResponse out = wire::decode_response(parsed, request.width(), request.size);
  out.elapsed = std::chrono::steady_clock::now() - start;
  return out;
}

std::vector<BatchItem> RemoteGenerator::generate_batch(std::span<const GeneratorRequest> requests) {
  if (requests.empty()) throw Error(Errc::InvalidBatch, "empty batch");
  std::vector<BatchItem> out(requests.size());
  {
    std::vector<std::jthread> workers;
    workers.reserve(requests.size());
    for (std::size_t i = 0; i < requests.size(); ++i) {
      workers.emplace_back([this, &requests, &out, i] {
        try {
          out[i].response = generate(requests[i]);
        } catch (const Error& e) {
          out[i].error = e.code();
          out[i].message = e.what();
        }
      });
    }
  }
  return out;
}

}  // namespace maketex
