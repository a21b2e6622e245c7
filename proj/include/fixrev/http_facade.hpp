#pragma once

#include <memory>
#include <string>

#include "fixrev/repository.hpp"

namespace fixrev {

// Serves a SimulatedRepo over 127.0.0.1 so scenarios can exercise the real
// network fetch path. GET /<repo>/<dataset>/<leaf> maps onto the sim link of
// the same shape; 404 for withdrawn or unknown resources.
class HttpFacade {
  public:
    explicit HttpFacade(SimulatedRepo& repo);
    ~HttpFacade();
    HttpFacade(const HttpFacade&) = delete;
    HttpFacade& operator=(const HttpFacade&) = delete;

    int port() const noexcept { return port_; }

    // Rewrites "sim://repo/ds/leaf" to this facade's http URL.
    std::string http_link(const std::string& sim_link) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = 0;
};

}  // namespace fixrev
