#include "jpminhash/hashing.hpp"

namespace jpminhash {

std::uint64_t token_id(std::string_view token) noexcept {
    std::uint64_t h = token.size();
    for (std::size_t off = 0; off < token.size(); off += 8) {
        std::uint64_t word = 0;
        for (std::size_t b = 0; b < 8 && off + b < token.size(); ++b) {
            word |= static_cast<std::uint64_t>(static_cast<unsigned char>(token[off + b])) << (8 * b);
        }
        h = fin64(h ^ word);
    }
    return fin64(h);
}

} // namespace jpminhash
