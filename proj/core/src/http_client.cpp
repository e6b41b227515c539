// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#include "http_client.hpp"

#include <httplib.h>

#include "pick/errors.hpp"

namespace pick::detail {

Url parse_url(std::string_view url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) {
        throw ValidationError("endpoint URL needs a scheme: " + std::string(url));
    }
    const std::string_view scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw ValidationError("unsupported URL scheme: " + std::string(scheme));
    }
    const auto path_start = url.find('/', scheme_end + 3);
    Url out;
    if (path_start == std::string_view::npos) {
        out.origin = std::string(url);
        out.path = "/";
    } else {
        out.origin = std::string(url.substr(0, path_start));
        out.path = std::string(url.substr(path_start));
    }
    if (out.origin.size() <= scheme_end + 3) {
        throw ValidationError("endpoint URL has no host: " + std::string(url));
    }
    return out;
}

std::string http_post_json(const std::string& url, const std::string& body, const HeaderList& headers,
                           std::chrono::milliseconds timeout) {
    const Url parsed = parse_url(url);
    httplib::Client client(parsed.origin);
    if (!client.is_valid()) {
        throw TransportError("cannot create HTTP client for " + parsed.origin);
    }
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers hdrs;
    for (const auto& [k, v] : headers) hdrs.emplace(k, v);

    auto res = client.Post(parsed.path, hdrs, body, "application/json");
    if (!res) {
        throw TransportError("HTTP request to " + url + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw TransportError("HTTP " + std::to_string(res->status) + " from " + url);
    }
    return res->body;
}

}  // namespace pick::detail
