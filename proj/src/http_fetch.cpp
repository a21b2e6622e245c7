#include "fixrev/http_fetch.hpp"

#include <httplib.h>

#include <fstream>
#include <sstream>

#include "fixrev/errors.hpp"

namespace fixrev {

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;    // /path?query ("/" when empty)
};

SplitUrl split_url(const std::string& url) {
    std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(ErrorCode::TransportError, "not an absolute URL: " + url);
    }
    std::size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return SplitUrl{url, "/"};
    }
    return SplitUrl{url.substr(0, path_start), url.substr(path_start)};
}

std::string resolve_location(const SplitUrl& current, const std::string& location) {
    if (location.rfind("http://", 0) == 0 || location.rfind("https://", 0) == 0) {
        return location;
    }
    if (!location.empty() && location.front() == '/') {
        return current.origin + location;
    }
    // Relative to the current path's directory.
    std::string base = current.path;
    std::size_t slash = base.rfind('/');
    base = slash == std::string::npos ? "/" : base.substr(0, slash + 1);
    return current.origin + base + location;
}

}  // namespace

FetchResult http_fetch(const std::string& url, const FetchLimits& limits, Clock* clock, int attempt) {
    Clock& clk = clock ? *clock : system_clock();
    std::string current = url;

    for (int hop = 0; hop <= limits.max_redirects; ++hop) {
        SplitUrl parts = split_url(current);
        if (parts.origin.rfind("http://", 0) != 0 && parts.origin.rfind("https://", 0) != 0) {
            throw Error(ErrorCode::TransportError, "unsupported scheme in " + current);
        }

        httplib::Client client(parts.origin);
        client.set_follow_location(false);
        client.set_connection_timeout(limits.timeout_ms / 1000, (limits.timeout_ms % 1000) * 1000);
        client.set_read_timeout(limits.timeout_ms / 1000, (limits.timeout_ms % 1000) * 1000);

        std::string body;
        bool too_large = false;
        auto receiver = [&](const char* data, std::size_t len) {
            if (body.size() + len > limits.max_bytes) {
                too_large = true;
                return false;  // abort transfer, never keep a partial body
            }
            body.append(data, len);
            return true;
        };
        httplib::Result res = client.Get(parts.path, receiver);

        if (too_large) {
            throw Error(ErrorCode::TooLarge,
                        "response exceeds limit of " + std::to_string(limits.max_bytes) + " bytes");
        }
        if (!res) {
            auto err = res.error();
            if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
                err == httplib::Error::Write) {
                throw Error(ErrorCode::Timeout, "timeout fetching " + current);
            }
            throw Error(ErrorCode::TransportError,
                        "transport failure fetching " + current + ": " + httplib::to_string(err));
        }

        int status = res->status;
        if (status >= 300 && status < 400) {
            std::string location = res->get_header_value("Location");
            if (location.empty()) {
                throw Error(ErrorCode::TransportError, "redirect without Location from " + current);
            }
            if (hop == limits.max_redirects) {
                throw Error(ErrorCode::TooManyRedirects,
                            "more than " + std::to_string(limits.max_redirects) + " redirects from " + url);
            }
            current = resolve_location(parts, location);
            continue;
        }
        if (status == 404 || status == 410) {
            throw Error(ErrorCode::NotFound, "HTTP " + std::to_string(status) + " for " + current);
        }
        if (status < 200 || status >= 300) {
            throw Error(ErrorCode::TransportError, "HTTP " + std::to_string(status) + " for " + current);
        }

        FetchResult result;
        result.bytes = std::move(body);
        std::string ct = res->get_header_value("Content-Type");
        if (!ct.empty()) result.media_type = ct;
        result.fetched_at = clk.now();
        result.source_link = url;
        result.attempt = attempt;
        return result;
    }
    throw Error(ErrorCode::TooManyRedirects, "redirect loop from " + url);
}

FetchResult file_fetch(const std::string& url, const FetchLimits& limits, Clock* clock, int attempt) {
    Clock& clk = clock ? *clock : system_clock();
    if (url.rfind("file://", 0) != 0) {
        throw Error(ErrorCode::TransportError, "not a file URL: " + url);
    }
    std::string path = url.substr(7);
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) {
        throw Error(ErrorCode::NotFound, "no such file: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string bytes = ss.str();
    if (bytes.size() > limits.max_bytes) {
        throw Error(ErrorCode::TooLarge, "file exceeds limit: " + path);
    }
    FetchResult result;
    result.bytes = std::move(bytes);
    result.fetched_at = clk.now();
    result.source_link = url;
    result.attempt = attempt;
    return result;
}

FetchResult fetch_link(const std::string& link, const FetchLimits& limits, Clock* clock, int attempt) {
    if (link.rfind("http://", 0) == 0 || link.rfind("https://", 0) == 0) {
        return http_fetch(link, limits, clock, attempt);
    }
    if (link.rfind("file://", 0) == 0) {
        return file_fetch(link, limits, clock, attempt);
    }
    throw Error(ErrorCode::TransportError, "unsupported link scheme: " + link);
}

std::vector<VersionInfo> LinkConnector::list_versions(const std::string&) {
    throw Error(ErrorCode::TransportError, "version listing is not available through a bare link");
}

}  // namespace fixrev
