#include "fixrev/digest.hpp"

#include <openssl/evp.h>

#include <array>

#include "fixrev/errors.hpp"

namespace fixrev {

namespace {

constexpr char kHexChars[] = "0123456789abcdef";

std::string to_hex(const unsigned char* bytes, std::size_t len) {
    std::string out(len * 2, '\0');
    for (std::size_t i = 0; i < len; ++i) {
        out[2 * i] = kHexChars[bytes[i] >> 4];
        out[2 * i + 1] = kHexChars[bytes[i] & 0x0f];
    }
    return out;
}

}  // namespace

Digest Digest::from_hex(std::string_view hex) {
    if (hex.size() != 64) {
        throw Error(ErrorCode::InvalidDigest, "expected 64 hex chars, got " + std::to_string(hex.size()));
    }
    for (char c : hex) {
        bool ok = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
        if (!ok) {
            throw Error(ErrorCode::InvalidDigest, "invalid hex character in digest");
        }
    }
    return Digest(std::string(hex));
}

struct Sha256::Impl {
    EVP_MD_CTX* ctx = nullptr;

    Impl() : ctx(EVP_MD_CTX_new()) {
        if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
            throw Error(ErrorCode::IoError, "EVP SHA-256 init failed");
        }
    }
    ~Impl() {
        if (ctx) EVP_MD_CTX_free(ctx);
    }
};

Sha256::Sha256() : impl_(std::make_unique<Impl>()) {}
Sha256::~Sha256() = default;
Sha256::Sha256(Sha256&&) noexcept = default;
Sha256& Sha256::operator=(Sha256&&) noexcept = default;

void Sha256::update(std::string_view data) {
    if (!data.empty()) {
        EVP_DigestUpdate(impl_->ctx, data.data(), data.size());
    }
}

Digest Sha256::finish() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> out{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(impl_->ctx, out.data(), &len) != 1) {
        throw Error(ErrorCode::IoError, "EVP SHA-256 finalize failed");
    }
    return Digest(to_hex(out.data(), len));
}

Digest digest_bytes(std::string_view data) {
    Sha256 h;
    h.update(data);
    return h.finish();
}

}  // namespace fixrev
