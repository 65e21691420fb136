// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace edumetrics {
inline constexpr const char* kVersion = "0.3.0";
}
