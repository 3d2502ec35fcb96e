#include "pcor/context.hpp"

#include "pcor/errors.hpp"

namespace pcor {

Context Context::from_index(std::uint32_t size, std::uint64_t index) {
  if (size > 63) throw ConfigError("Context::from_index supports at most 63 bits");
  Context c(size);
  for (std::uint32_t j = 0; j < size; ++j)
    if ((index >> j) & 1ULL) c.set(size - 1 - j, true);
  return c;
}

Context Context::from_string(std::string_view bits) {
  Context c(static_cast<std::uint32_t>(bits.size()));
  for (std::uint32_t i = 0; i < bits.size(); ++i) {
    const char ch = bits[i];
    if (ch == '1') {
      c.set(i, true);
    } else if (ch != '0') {
      throw ConfigError("context string must contain only '0' and '1'");
    }
  }
  return c;
}

std::uint64_t Context::to_index() const {
  if (size_ > 63) throw ConfigError("Context::to_index supports at most 63 bits");
  std::uint64_t v = 0;
  for (std::uint32_t i = 0; i < size_; ++i)
    if (test(i)) v |= 1ULL << (size_ - 1 - i);
  return v;
}

}  // namespace pcor
