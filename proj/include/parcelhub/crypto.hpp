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

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "parcelhub/codec.hpp"

namespace parcelhub {

/// Initializes libsodium once; throws entropy_unavailable on failure.
void ensure_sodium();

Bytes random_bytes(std::size_t n);

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data);
std::array<std::uint8_t, 32> hmac_sha256(std::span<const std::uint8_t> key,
                                         std::span<const std::uint8_t> data);

/// Constant-time equality for equal-length buffers; false on length mismatch.
bool constant_time_equal(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

/// Symmetric key for personal-data fields. The id travels with every
/// ciphertext so a later rotation can tell generations apart.
struct FieldKey {
  std::string key_id;
  Bytes material;  // 32 bytes

  /// Throws bad_key unless `base64_key` decodes to exactly 32 bytes.
  static FieldKey from_base64(std::string key_id, std::string_view base64_key);
};

/// AES-256-GCM output: 12-byte nonce, ciphertext, 16-byte tag.
struct EncryptedField {
  Bytes ciphertext;
  std::string key_id;

  /// "<key_id>:<base64>", the form persisted in documents.
  std::string to_wire() const;
  static EncryptedField from_wire(std::string_view wire);
};

EncryptedField encrypt_field(std::span<const std::uint8_t> plaintext, const FieldKey& key);

/// Throws bad_key for a key-id mismatch or malformed key, and
/// authentication_failure when the tag does not verify.
Bytes decrypt_field(const EncryptedField& field, const FieldKey& key);

/// Keyed digest of a normalized value, for equality lookups over encrypted data.
struct BlindIndex {
  std::string digest_hex;
  friend bool operator==(const BlindIndex&, const BlindIndex&) = default;
};

/// Trims surrounding whitespace and lower-cases ASCII.
std::string normalize_for_index(std::string_view text);

BlindIndex blind_index(std::string_view plaintext, const FieldKey& key);

/// Text-level convenience wrapper binding one key.
class FieldCipher {
 public:
  explicit FieldCipher(FieldKey key);

  std::string seal(std::string_view plaintext) const;
  std::string open(std::string_view wire) const;
  std::string index(std::string_view plaintext) const;

  const std::string& key_id() const noexcept { return key_.key_id; }

 private:
  FieldKey key_;
};

}  // namespace parcelhub
