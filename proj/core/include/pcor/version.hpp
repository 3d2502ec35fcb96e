#ifndef PCOR_VERSION_HPP
#define PCOR_VERSION_HPP

namespace pcor {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pcor

#endif  // PCOR_VERSION_HPP
