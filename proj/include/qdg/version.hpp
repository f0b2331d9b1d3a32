#ifndef QDG_VERSION_HPP
#define QDG_VERSION_HPP

namespace qdg {
inline constexpr const char* kVersion = "0.1.0";
}

#endif  // QDG_VERSION_HPP
