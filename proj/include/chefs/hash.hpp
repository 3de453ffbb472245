#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace chefs {

/// Incremental SHA-256 (OpenSSL EVP backed).
class Sha256 {
public:
    Sha256();
    ~Sha256();
    Sha256(Sha256&&) noexcept;
    Sha256& operator=(Sha256&&) noexcept;
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(std::string_view data);
    /// Finalizes and returns the lowercase hex digest. The object is spent afterwards.
    std::string hex_digest();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::filesystem::path& path);

/// Builds a content hash over an ordered tuple of optional fields.
/// Each field is length-prefixed and absent fields use a distinct marker, so
/// ("ab","c") and ("a","bc") never collide by construction.
class KeyHasher {
public:
    explicit KeyHasher(std::string_view domain);

    KeyHasher& add(std::string_view value);
    KeyHasher& add(const std::optional<std::string>& value);
    KeyHasher& add_absent();
    KeyHasher& add(long long value);

    /// 128-bit identifier rendered as 32 lowercase hex characters.
    std::string id() const;

private:
    std::string buffer_;
};

/// Compact binary form of a 32-hex-character identifier, for hash sets.
struct Id128 {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;
    friend bool operator==(const Id128&, const Id128&) = default;
};

std::optional<Id128> parse_id128(std::string_view hex) noexcept;

struct Id128Hash {
    std::size_t operator()(const Id128& id) const noexcept { return id.hi ^ (id.lo * 0x9e3779b97f4a7c15ULL); }
};

}  // namespace chefs
