// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

namespace opsai::base64 {

// Standard alphabet with '=' padding.
std::string encode(std::string_view bytes);

/// Throws ValidationError on characters outside the alphabet or bad padding.
std::string decode(std::string_view text);

}  // namespace opsai::base64
