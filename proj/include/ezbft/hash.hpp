#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ezbft {

/// 128-bit state digest. Byte-order independent: inputs are fed as integer
/// words, so the same state hashes identically on every platform.
struct Digest {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;

    bool operator==(const Digest&) const = default;
    std::string hex() const;
};

struct DigestHash {
    std::size_t operator()(const Digest& d) const noexcept {
        return static_cast<std::size_t>(d.lo ^ (d.hi * 0x9e3779b97f4a7c15ULL));
    }
};

class Hasher {
  public:
    void word(std::uint64_t v) {
        a_ = mix(a_ ^ v);
        b_ = mix(b_ + v + 0x632be59bd9b4e019ULL);
    }
    void str(std::string_view s) {
        word(s.size());
        std::uint64_t chunk = 0;
        int shift = 0;
        for (unsigned char c : s) {
            chunk |= static_cast<std::uint64_t>(c) << shift;
            shift += 8;
            if (shift == 64) {
                word(chunk);
                chunk = 0;
                shift = 0;
            }
        }
        if (shift != 0) word(chunk);
    }
    void digest(const Digest& d) {
        word(d.hi);
        word(d.lo);
    }
    Digest finish() const { return {mix(a_ ^ 0x2545f4914f6cdd1dULL), mix(b_ ^ a_)}; }

  private:
    static std::uint64_t mix(std::uint64_t x) {
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebULL;
        x ^= x >> 31;
        return x;
    }

    std::uint64_t a_ = 0x9e3779b97f4a7c15ULL;
    std::uint64_t b_ = 0x6a09e667f3bcc909ULL;
};

}  // namespace ezbft
