// Copyright 2026 The DomainHarvester Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace dh::pld {

// RFC 3492 encoding of one label's code points (no "xn--" prefix).
std::optional<std::string> punycode_encode(std::u32string_view label);

// UTF-8 hostname to its ASCII (A-label) form: ASCII letters lowercased,
// non-ASCII labels punycoded with the "xn--" prefix. nullopt on invalid UTF-8.
std::optional<std::string> to_ascii_host(std::string_view host);

}  // namespace dh::pld
