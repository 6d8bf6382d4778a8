#ifndef SESN_VERSION_HPP
#define SESN_VERSION_HPP

namespace sesn {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sesn

#endif  // SESN_VERSION_HPP
