#include "a51/kernels.hpp"

namespace a51::kernels::detail {

void match_scalar(const CipherSpec& spec, std::span<const CipherState> states, const Keystream& ks,
                  Alignment alignment, std::span<std::uint8_t> matched) {
  for (std::size_t i = 0; i < states.size(); ++i)
    matched[i] = matching_prefix(spec, states[i], ks, alignment) == ks.size();
}

}  // namespace a51::kernels::detail
