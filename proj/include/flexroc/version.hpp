#pragma once

namespace flexroc {

constexpr const char* kToolVersion = "0.1.0";

}  // namespace flexroc
