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

#include "parcelhub/password.hpp"

#include <sodium.h>

#include <regex>

#include "parcelhub/crypto.hpp"
#include "parcelhub/error.hpp"

namespace parcelhub {

PasswordParams PasswordParams::fast_for_tests() {
  PasswordParams p;
  p.ops_limit = crypto_pwhash_OPSLIMIT_MIN;
  p.mem_limit_bytes = crypto_pwhash_MEMLIMIT_MIN;
  return p;
}

std::string hash_password(std::string_view plain, const PasswordParams& params) {
  ensure_sodium();
  if (plain.size() < params.min_length)
    throw Error(Errc::policy_violation,
                "password must be at least " + std::to_string(params.min_length) + " characters",
                {{"password", "too short"}});
  char out[crypto_pwhash_STRBYTES];
  if (crypto_pwhash_str_alg(out, plain.data(), plain.size(), params.ops_limit,
                            params.mem_limit_bytes, crypto_pwhash_ALG_ARGON2ID13) != 0)
    throw Error(Errc::internal, "argon2 hashing ran out of memory");
  return out;
}

bool is_well_formed_hash(std::string_view hash) {
  static const std::regex kPhc(
      R"(\$argon2(id|i)\$v=19\$m=[0-9]+,t=[0-9]+,p=[0-9]+\$[A-Za-z0-9+/]+\$[A-Za-z0-9+/]+)");
  return hash.size() < crypto_pwhash_STRBYTES &&
         std::regex_match(hash.begin(), hash.end(), kPhc);
}

bool verify_password(std::string_view plain, std::string_view hash) {
  ensure_sodium();
  if (!is_well_formed_hash(hash)) throw Error(Errc::malformed_hash, "not an argon2 hash string");
  std::string h(hash);  // libsodium needs NUL termination
  return crypto_pwhash_str_verify(h.c_str(), plain.data(), plain.size()) == 0;
}

}  // namespace parcelhub
