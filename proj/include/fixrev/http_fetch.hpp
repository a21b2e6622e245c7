#pragma once

#include <cstddef>
#include <string>

#include "fixrev/repository.hpp"

namespace fixrev {

struct FetchLimits {
    std::size_t max_bytes = 64u << 20;
    int timeout_ms = 30000;
    int max_redirects = 5;
};

// GET with redirect following and a hard body-size cap. A body that exceeds
// max_bytes aborts with TooLarge — never a silent truncation. Errors:
// NotFound (404), Timeout, TooManyRedirects, TransportError.
FetchResult http_fetch(const std::string& url, const FetchLimits& limits = {},
                       Clock* clock = nullptr, int attempt = 1);

// Local filesystem fetch for file:// links (hermetic CLI verification).
FetchResult file_fetch(const std::string& url, const FetchLimits& limits = {},
                       Clock* clock = nullptr, int attempt = 1);

// Dispatches on the link scheme: http(s) → http_fetch, file → file_fetch.
FetchResult fetch_link(const std::string& link, const FetchLimits& limits = {},
                       Clock* clock = nullptr, int attempt = 1);

// Connector over fetch_link for CLI-driven cases. Version listing is not
// available through a bare link.
class LinkConnector final : public Connector {
  public:
    explicit LinkConnector(FetchLimits limits = {}, Clock* clock = nullptr)
        : limits_(limits), clock_(clock) {}

    FetchResult download(const std::string& link) override { return fetch_link(link, limits_, clock_); }

    std::vector<VersionInfo> list_versions(const std::string&) override;

  private:
    FetchLimits limits_;
    Clock* clock_;
};

}  // namespace fixrev
