#include "fixrev/http_facade.hpp"

#include <httplib.h>

#include <thread>

#include "fixrev/errors.hpp"

namespace fixrev {

struct HttpFacade::Impl {
    httplib::Server server;
    std::thread worker;
};

HttpFacade::HttpFacade(SimulatedRepo& repo) : impl_(std::make_unique<Impl>()) {
    impl_->server.Get(R"(/(.+))", [&repo](const httplib::Request& req, httplib::Response& res) {
        std::string sim_link = "sim://" + req.matches[1].str();
        try {
            FetchResult data = repo.download(sim_link);
            res.status = 200;
            res.set_content(data.bytes, data.media_type.value_or("application/octet-stream"));
        } catch (const Error& e) {
            res.status = e.code() == ErrorCode::NotFound ? 404 : 500;
            res.set_content(e.what(), "text/plain");
        }
    });

    port_ = impl_->server.bind_to_any_port("127.0.0.1");
    if (port_ <= 0) {
        throw Error(ErrorCode::TransportError, "failed to bind loopback facade");
    }
    impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

HttpFacade::~HttpFacade() {
    impl_->server.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

std::string HttpFacade::http_link(const std::string& sim_link) const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/" + SimulatedRepo::link_path(sim_link);
}

}  // namespace fixrev
