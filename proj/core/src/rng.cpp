#include "packscope/rng.hpp"

#include <string>

namespace packscope {

std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose) noexcept {
  return seed ^ fnv1a64(purpose);
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose,
                          std::uint64_t index) noexcept {
  std::string key(purpose);
  key += ':';
  key += std::to_string(index);
  return seed ^ fnv1a64(key);
}

}  // namespace packscope
