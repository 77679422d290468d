// Copyright 2026 The ParcelHub Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "parcelhub/crypto.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/sha.h>
#include <sodium.h>

#include <cctype>
#include <memory>
#include <mutex>

#include "parcelhub/error.hpp"

namespace parcelhub {

namespace {

constexpr std::size_t kNonceLen = 12;
constexpr std::size_t kTagLen = 16;
constexpr std::size_t kKeyLen = 32;
constexpr std::string_view kIndexLabel = "parcelhub/blind-index/v1";

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

void check_key(const FieldKey& key) {
  if (key.material.size() != kKeyLen) throw Error(Errc::bad_key, "field key must be 32 bytes");
}

}  // namespace

void ensure_sodium() {
  static std::once_flag once;
  static bool ok = false;
  std::call_once(once, [] { ok = sodium_init() >= 0; });
  if (!ok) throw Error(Errc::entropy_unavailable, "libsodium failed to initialize");
}

Bytes random_bytes(std::size_t n) {
  ensure_sodium();
  Bytes out(n);
  randombytes_buf(out.data(), n);
  return out;
}

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data) {
  std::array<std::uint8_t, 32> out{};
  SHA256(data.data(), data.size(), out.data());
  return out;
}

std::array<std::uint8_t, 32> hmac_sha256(std::span<const std::uint8_t> key,
                                         std::span<const std::uint8_t> data) {
  std::array<std::uint8_t, 32> out{};
  unsigned int len = 0;
  HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(), data.size(),
       out.data(), &len);
  return out;
}

bool constant_time_equal(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) return false;
  return CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

FieldKey FieldKey::from_base64(std::string key_id, std::string_view base64_key) {
  auto raw = base64_decode(base64_key);
  if (!raw || raw->size() != kKeyLen)
    throw Error(Errc::bad_key, "field key must be 32 bytes of base64");
  if (key_id.empty() || key_id.find(':') != std::string::npos)
    throw Error(Errc::bad_key, "field key id must be non-empty and contain no ':'");
  return FieldKey{std::move(key_id), std::move(*raw)};
}

std::string EncryptedField::to_wire() const { return key_id + ":" + base64_encode(ciphertext); }

EncryptedField EncryptedField::from_wire(std::string_view wire) {
  auto sep = wire.find(':');
  if (sep == std::string_view::npos)
    throw Error(Errc::authentication_failure, "encrypted field has no key id");
  auto raw = base64_decode(wire.substr(sep + 1));
  if (!raw) throw Error(Errc::authentication_failure, "encrypted field is not base64");
  return EncryptedField{std::move(*raw), std::string(wire.substr(0, sep))};
}

EncryptedField encrypt_field(std::span<const std::uint8_t> plaintext, const FieldKey& key) {
  check_key(key);
  Bytes out(kNonceLen + plaintext.size() + kTagLen);
  Bytes nonce = random_bytes(kNonceLen);
  std::copy(nonce.begin(), nonce.end(), out.begin());

  CipherCtx ctx(EVP_CIPHER_CTX_new());
  int len = 0;
  auto aad = as_bytes(key.key_id);
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kNonceLen, nullptr) != 1 ||
      EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.material.data(), nonce.data()) != 1 ||
      EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1 ||
      EVP_EncryptUpdate(ctx.get(), out.data() + kNonceLen, &len, plaintext.data(),
                        static_cast<int>(plaintext.size())) != 1 ||
      EVP_EncryptFinal_ex(ctx.get(), out.data() + kNonceLen + len, &len) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagLen,
                          out.data() + kNonceLen + plaintext.size()) != 1)
    throw Error(Errc::internal, "AES-GCM encryption failed");
  return EncryptedField{std::move(out), key.key_id};
}

Bytes decrypt_field(const EncryptedField& field, const FieldKey& key) {
  check_key(key);
  if (field.key_id != key.key_id)
    throw Error(Errc::bad_key, "ciphertext was sealed under key '" + field.key_id + "'");
  if (field.ciphertext.size() < kNonceLen + kTagLen)
    throw Error(Errc::authentication_failure, "ciphertext too short");

  const std::size_t body = field.ciphertext.size() - kNonceLen - kTagLen;
  const std::uint8_t* nonce = field.ciphertext.data();
  const std::uint8_t* ct = nonce + kNonceLen;
  Bytes tag(ct + body, ct + body + kTagLen);
  Bytes out(body);

  CipherCtx ctx(EVP_CIPHER_CTX_new());
  int len = 0;
  auto aad = as_bytes(key.key_id);
  if (!ctx || EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kNonceLen, nullptr) != 1 ||
      EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.material.data(), nonce) != 1 ||
      EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1 ||
      EVP_DecryptUpdate(ctx.get(), out.data(), &len, ct, static_cast<int>(body)) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagLen, tag.data()) != 1)
    throw Error(Errc::internal, "AES-GCM setup failed");
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + len, &len) != 1)
    throw Error(Errc::authentication_failure, "ciphertext failed authentication");
  return out;
}

std::string normalize_for_index(std::string_view text) {
  auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  auto end = text.find_last_not_of(" \t\r\n");
  std::string out(text.substr(begin, end - begin + 1));
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

BlindIndex blind_index(std::string_view plaintext, const FieldKey& key) {
  check_key(key);
  // Sub-key so index digests never share a key with the cipher.
  auto sub = hmac_sha256(key.material, as_bytes(kIndexLabel));
  auto digest = hmac_sha256(sub, as_bytes(normalize_for_index(plaintext)));
  return BlindIndex{hex_encode(digest)};
}

FieldCipher::FieldCipher(FieldKey key) : key_(std::move(key)) { check_key(key_); }

std::string FieldCipher::seal(std::string_view plaintext) const {
  return encrypt_field(as_bytes(plaintext), key_).to_wire();
}

std::string FieldCipher::open(std::string_view wire) const {
  return to_string(decrypt_field(EncryptedField::from_wire(wire), key_));
}

std::string FieldCipher::index(std::string_view plaintext) const {
  return blind_index(plaintext, key_).digest_hex;
}

}  // namespace parcelhub
