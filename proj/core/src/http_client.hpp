// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pick::detail {

struct Url {
    std::string origin;  // scheme://host[:port]
    std::string path;    // always starts with '/'
};

/// Splits an http(s) URL; throws ValidationError on anything else.
Url parse_url(std::string_view url);

using HeaderList = std::vector<std::pair<std::string, std::string>>;

/// POSTs a JSON body and returns the response body. Throws TransportError on
/// connection failure, timeout or a non-2xx status.
std::string http_post_json(const std::string& url, const std::string& body, const HeaderList& headers,
                           std::chrono::milliseconds timeout);

}  // namespace pick::detail
