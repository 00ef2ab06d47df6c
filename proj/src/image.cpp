#include <algorithm>

#include "maketex/image.hpp"

namespace maketex {

std::size_t count_set(const Mask& mask) {
  return static_cast<std::size_t>(
      std::count_if(mask.values().begin(), mask.values().end(), [](std::uint8_t v) { return v != 0; }));
}

}  // namespace maketex
