#pragma once

namespace prefclust {
inline constexpr const char *kVersion = "0.1.0";
}
