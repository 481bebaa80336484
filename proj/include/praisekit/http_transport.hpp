#pragma once

#include <chrono>
#include <string>

#include <httplib.h>

#include "praisekit/provider.hpp"

namespace praisekit {

/// Real transport backed by cpp-httplib. Splits the configured base URL into
/// scheme://host[:port] and an optional path prefix (e.g. ".../v1") that is
/// prepended to the request path. A fresh client per request keeps the
/// transport safely usable from concurrent calls.
class HttplibTransport : public HttpTransport {
 public:
  HttpResult post(const std::string& base_url, const std::string& path,
                  const std::vector<std::pair<std::string, std::string>>& headers,
                  const std::string& body, double timeout_seconds) override {
    std::string origin = base_url;
    std::string prefix;
    const std::size_t scheme_end = origin.find("://");
    const std::size_t host_start = scheme_end == std::string::npos
                                       ? 0
                                       : scheme_end + 3;
    const std::size_t slash = origin.find('/', host_start);
    if (slash != std::string::npos) {
      prefix = origin.substr(slash);
      origin = origin.substr(0, slash);
      while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    }

    httplib::Client client(origin);
    const auto timeout = std::chrono::milliseconds(
        static_cast<long long>(timeout_seconds * 1000.0));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    httplib::Headers hl;
    for (const auto& [k, v] : headers) hl.emplace(k, v);

    const auto res = client.Post(prefix + path, hl, body, "application/json");
    HttpResult out;
    if (!res) {
      out.transport_failed = true;
      out.timed_out = res.error() == httplib::Error::ConnectionTimeout ||
                      res.error() == httplib::Error::Read ||
                      res.error() == httplib::Error::Write;
      out.error = httplib::to_string(res.error());
      return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
  }
};

}  // namespace praisekit
