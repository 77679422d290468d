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

#include <cstddef>
#include <string>
#include <string_view>

namespace parcelhub {

/// Argon2id cost parameters. The defaults follow the common 19 MiB / t=2
/// recommendation; tests pass the library minimums.
struct PasswordParams {
  unsigned long long ops_limit = 2;
  std::size_t mem_limit_bytes = 19 * 1024 * 1024;
  std::size_t min_length = 8;

  static PasswordParams fast_for_tests();
};

/// Encodes algorithm, parameters, a fresh random salt and the digest in the
/// PHC string format. Throws policy_violation for passwords shorter than
/// params.min_length.
std::string hash_password(std::string_view plain, const PasswordParams& params = {});

/// Constant-time check. Throws malformed_hash if `hash` is not an Argon2 PHC string.
bool verify_password(std::string_view plain, std::string_view hash);

/// True when `hash` parses as an Argon2 PHC string.
bool is_well_formed_hash(std::string_view hash);

}  // namespace parcelhub
