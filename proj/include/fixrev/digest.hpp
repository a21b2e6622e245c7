#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

namespace fixrev {

// SHA-256 value as 64 lowercase hex characters. The algorithm is fixed for
// all stored records; serialized forms carry an "algorithm" tag so a future
// change does not break old data.
inline constexpr std::string_view kDigestAlgorithm = "SHA-256";

class Digest {
  public:
    Digest() = default;

    // Throws InvalidDigest unless `hex` is exactly 64 chars of [0-9a-f].
    static Digest from_hex(std::string_view hex);

    const std::string& hex() const noexcept { return hex_; }
    bool empty() const noexcept { return hex_.empty(); }

    auto operator<=>(const Digest&) const = default;

  private:
    friend Digest digest_bytes(std::string_view data);
    friend class Sha256;
    explicit Digest(std::string hex) : hex_(std::move(hex)) {}

    std::string hex_;
};

// SHA-256 of the input, as a Digest. Pure; empty input allowed.
Digest digest_bytes(std::string_view data);

// Incremental hashing for streams too large to buffer.
class Sha256 {
  public:
    Sha256();
    ~Sha256();
    Sha256(Sha256&&) noexcept;
    Sha256& operator=(Sha256&&) noexcept;
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(std::string_view data);
    Digest finish();

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace fixrev
