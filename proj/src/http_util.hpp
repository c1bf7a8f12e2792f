// Copyright 2026 The AGP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied. See the License for the specific language governing
// permissions and limitations under the License.

#ifndef AGP_SRC_HTTP_UTIL_HPP_
#define AGP_SRC_HTTP_UTIL_HPP_

#include <chrono>
#include <optional>
#include <string>

#include "agp/errors.hpp"

namespace agp::detail {

/// "http://host:8080/v1/x" -> {"http://host:8080", "/v1/x"}.
struct Url {
  std::string origin;
  std::string path;
};

Url split_url(const std::string& url);

struct HttpReply {
  int status = 0;
  std::string body;
};

/// POSTs a JSON body. Returns nullopt on transport failure.
std::optional<HttpReply> post_json(const std::string& url, const std::string& body,
                                   const std::string& bearer_token,
                                   std::chrono::milliseconds timeout);

}  // namespace agp::detail

#endif  // AGP_SRC_HTTP_UTIL_HPP_
