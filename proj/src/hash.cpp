#include "chefs/hash.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <fstream>
#include <vector>

#include "chefs/error.hpp"

namespace chefs {

namespace {
std::string to_hex(const unsigned char* data, std::size_t n) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(n * 2, '0');
    for (std::size_t i = 0; i < n; ++i) {
        out[2 * i] = digits[data[i] >> 4];
        out[2 * i + 1] = digits[data[i] & 0xF];
    }
    return out;
}
}  // namespace

struct Sha256::Impl {
    EVP_MD_CTX* ctx = nullptr;
    ~Impl() {
        if (ctx) EVP_MD_CTX_free(ctx);
    }
};

Sha256::Sha256() : impl_(std::make_unique<Impl>()) {
    impl_->ctx = EVP_MD_CTX_new();
    if (!impl_->ctx || EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorCode::Io, "cannot initialise SHA-256 context");
}

Sha256::~Sha256() = default;
Sha256::Sha256(Sha256&&) noexcept = default;
Sha256& Sha256::operator=(Sha256&&) noexcept = default;

void Sha256::update(std::string_view data) {
    EVP_DigestUpdate(impl_->ctx, data.data(), data.size());
}

std::string Sha256::hex_digest() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(impl_->ctx, md, &len);
    return to_hex(md, len);
}

std::string sha256_hex(std::string_view data) {
    unsigned char md[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), md);
    return to_hex(md, sizeof(md));
}

std::string sha256_file_hex(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    Sha256 h;
    std::vector<char> buf(1 << 20);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const auto got = in.gcount();
        if (got > 0) h.update({buf.data(), static_cast<std::size_t>(got)});
    }
    return h.hex_digest();
}

KeyHasher::KeyHasher(std::string_view domain) {
    buffer_.reserve(128);
    add(domain);
}

KeyHasher& KeyHasher::add(std::string_view value) {
    buffer_.push_back('P');
    buffer_.append(std::to_string(value.size()));
    buffer_.push_back(':');
    buffer_.append(value);
    return *this;
}

KeyHasher& KeyHasher::add(const std::optional<std::string>& value) {
    return value ? add(std::string_view(*value)) : add_absent();
}

KeyHasher& KeyHasher::add_absent() {
    buffer_.push_back('A');
    return *this;
}

KeyHasher& KeyHasher::add(long long value) { return add(std::string_view(std::to_string(value))); }

std::string KeyHasher::id() const {
    unsigned char md[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const unsigned char*>(buffer_.data()), buffer_.size(), md);
    return to_hex(md, 16);
}

std::optional<Id128> parse_id128(std::string_view hex) noexcept {
    if (hex.size() != 32) return std::nullopt;
    Id128 id;
    for (std::size_t i = 0; i < 32; ++i) {
        const char c = hex[i];
        std::uint64_t d;
        if (c >= '0' && c <= '9') d = static_cast<std::uint64_t>(c - '0');
        else if (c >= 'a' && c <= 'f') d = static_cast<std::uint64_t>(c - 'a' + 10);
        else return std::nullopt;
        auto& word = i < 16 ? id.hi : id.lo;
        word = (word << 4) | d;
    }
    return id;
}

}  // namespace chefs
