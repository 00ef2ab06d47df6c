#pragma once

#include <chrono>
#include <memory>
#include <semaphore>
#include <string>

#include "maketex/generator.hpp"

namespace maketex {

inline constexpr const char* kDefaultGeneratorUrl = "http://127.0.0.1:8000";

struct RemoteOptions {
  std::chrono::seconds timeout{120};
  int max_in_flight = 4;
};

// Client for a generator service speaking the JSON wire format (see wire.hpp).
// Connection failures and non-200 replies raise BackendUnavailable, expired
// deadlines Timeout, undecodable replies ProtocolError.
class RemoteGenerator final : public Generator {
 public:
  explicit RemoteGenerator(std::string base_url, RemoteOptions options = {});
  ~RemoteGenerator() override;

  GeneratorResponse generate(const GeneratorRequest& request) override;
  // Dispatches up to max_in_flight requests concurrently.
  std::vector<BatchItem> generate_batch(std::span<const GeneratorRequest> requests) override;
  std::string id() const override { return "http:" + base_url_; }

  // GET /v1/health answered with 200.
  bool healthy() const;

  const std::string& base_url() const { return base_url_; }

 private:
  std::string base_url_;
  RemoteOptions options_;
  std::unique_ptr<std::counting_semaphore<256>> slots_;
};

}  // namespace maketex
