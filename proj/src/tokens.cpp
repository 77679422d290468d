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

#include "parcelhub/tokens.hpp"

#include <array>
#include <vector>

#include "parcelhub/codec.hpp"
#include "parcelhub/crypto.hpp"
#include "parcelhub/error.hpp"
#include "parcelhub/records.hpp"

namespace parcelhub {

namespace {

constexpr std::string_view kHeader = R"({"alg":"HS256","typ":"JWT"})";

std::vector<std::string_view> split_dots(std::string_view token) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto dot = token.find('.', start);
    if (dot == std::string_view::npos) {
      parts.push_back(token.substr(start));
      break;
    }
    parts.push_back(token.substr(start, dot - start));
    start = dot + 1;
  }
  return parts;
}

std::string token_digest(std::string_view token) { return hex_encode(sha256(as_bytes(token))); }

}  // namespace

std::string_view to_string(ActionPurpose p) noexcept {
  return p == ActionPurpose::verify_email ? "verify_email" : "reset_password";
}

std::string jws_sign(const Document& payload, std::string_view key) {
  std::string signing_input =
      base64url_encode(as_bytes(kHeader)) + "." + base64url_encode(as_bytes(payload.dump()));
  auto mac = hmac_sha256(as_bytes(key), as_bytes(signing_input));
  return signing_input + "." + base64url_encode(mac);
}

Document jws_verify(std::string_view token, std::string_view key) {
  auto parts = split_dots(token);
  if (parts.size() != 3) throw Error(Errc::malformed, "token must have three segments");
  auto header = base64url_decode(parts[0]);
  auto payload = base64url_decode(parts[1]);
  auto signature = base64url_decode(parts[2]);
  if (!header || !payload || !signature) throw Error(Errc::malformed, "token is not base64url");

  auto header_doc = Document::parse(to_string(*header), nullptr, false);
  if (header_doc.is_discarded() || !header_doc.is_object() || header_doc.value("alg", "") != "HS256")
    throw Error(Errc::malformed, "unsupported token header");

  std::string signing_input(token.substr(0, parts[0].size() + 1 + parts[1].size()));
  auto expected = hmac_sha256(as_bytes(key), as_bytes(signing_input));
  if (!constant_time_equal(expected, *signature))
    throw Error(Errc::invalid_signature, "token signature does not verify");

  auto doc = Document::parse(to_string(*payload), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error(Errc::malformed, "token payload is not JSON");
  return doc;
}

TokenService::TokenService(std::string signing_key, Store& store, EntropySource& entropy,
                           TokenLifetimes lifetimes)
    : key_(std::move(signing_key)), store_(store), entropy_(entropy), lifetimes_(lifetimes) {
  if (key_.size() < 16) throw Error(Errc::bad_key, "signing key must be at least 16 bytes");
}

std::string TokenService::random_token(std::size_t n) {
  std::vector<std::byte> raw(n);
  entropy_.fill(raw);
  return base64url_encode({reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()});
}

TokenPair TokenService::issue_token_pair(const Account& account, Timestamp now) {
  if (!account.is_active) throw Error(Errc::account_inactive, "account is not activated");
  TokenPair pair;
  pair.access_expires_at = now + lifetimes_.access;
  pair.renew_expires_at = now + lifetimes_.renew;

  pair.access_token = jws_sign({{"sub", account.account_id},
                                {"role", to_string(account.role)},
                                {"typ", "access"},
                                {"iat", to_unix_seconds(now)},
                                {"iat_us", to_micros(now)},
                                {"exp", to_unix_seconds(pair.access_expires_at)},
                                {"exp_us", to_micros(pair.access_expires_at)},
                                {"jti", random_token(12)}},
                               key_);

  std::string nonce = random_token(18);
  store_.insert(kind::renew_nonce, nonce,
                {{"account_id", account.account_id},
                 {"expires_at", to_micros(pair.renew_expires_at)},
                 {"consumed", false}});
  pair.renew_token = jws_sign({{"sub", account.account_id},
                               {"typ", "renew"},
                               {"iat", to_unix_seconds(now)},
                               {"exp", to_unix_seconds(pair.renew_expires_at)},
                               {"exp_us", to_micros(pair.renew_expires_at)},
                               {"jti", nonce}},
                              key_);
  return pair;
}

AccessClaims TokenService::verify_access(std::string_view token, Timestamp now) const {
  auto claims = jws_verify(token, key_);
  if (claims.value("typ", "") != "access" || !claims.contains("exp_us") || !claims.contains("sub"))
    throw Error(Errc::malformed, "not an access token");
  AccessClaims out;
  out.expires_at = from_micros(claims.at("exp_us").get<std::int64_t>());
  if (!(now < out.expires_at)) throw Error(Errc::expired, "access token expired");
  if (now < from_micros(claims.value("iat_us", std::int64_t{0})))
    throw Error(Errc::malformed, "access token is not valid yet");
  out.account_id = claims.at("sub").get<std::string>();
  auto role = parse_role(claims.value("role", ""));
  if (!role) throw Error(Errc::malformed, "access token has no role");
  out.role = *role;
  return out;
}

TokenPair TokenService::renew_tokens(std::string_view renew_token, Timestamp now,
                                     const AccountLoader& load) {
  auto claims = jws_verify(renew_token, key_);
  if (claims.value("typ", "") != "renew" || !claims.contains("exp_us") || !claims.contains("jti"))
    throw Error(Errc::malformed, "not a renew token");
  if (!(now < from_micros(claims.at("exp_us").get<std::int64_t>())))
    throw Error(Errc::expired, "renew token expired");

  const auto nonce = claims.at("jti").get<std::string>();
  UpdateResult r;
  try {
    r = store_.conditional_update(kind::renew_nonce, nonce, {{"consumed", false}},
                                  {{"consumed", true}, {"consumed_at", to_micros(now)}});
  } catch (const Error& e) {
    if (e.code() != Errc::unknown_entity) throw;
    throw Error(Errc::consumed, "renew token is not recognised");
  }
  if (r != UpdateResult::applied) throw Error(Errc::consumed, "renew token already used");

  auto account = load(claims.at("sub").get<std::string>());
  if (!account) throw Error(Errc::invalid_signature, "account no longer exists");
  return issue_token_pair(*account, now);
}

ActionToken TokenService::create_action_token(const AccountId& account, ActionPurpose purpose,
                                              Timestamp now) {
  ActionToken t;
  t.token = random_token(24);
  t.purpose = purpose;
  t.account_id = account;
  t.expires_at = now + lifetimes_.action;
  // Only a digest is stored so a store dump cannot be replayed as links.
  store_.insert(kind::action_token, token_digest(t.token),
                {{"purpose", to_string(purpose)},
                 {"account_id", account},
                 {"expires_at", to_micros(t.expires_at)},
                 {"consumed", false}});
  return t;
}

AccountId TokenService::consume_action_token(std::string_view token, ActionPurpose purpose,
                                             Timestamp now) {
  const auto id = token_digest(token);
  auto doc = store_.get(kind::action_token, id);
  if (!doc) throw Error(Errc::unknown_token, "unknown token");
  if (doc->at("purpose").get<std::string>() != to_string(purpose))
    throw Error(Errc::wrong_purpose, "token was issued for another purpose");
  if (doc->at("consumed").get<bool>()) throw Error(Errc::consumed, "token already used");
  if (!(now < from_micros(doc->at("expires_at").get<std::int64_t>())))
    throw Error(Errc::expired, "token expired");
  if (store_.conditional_update(kind::action_token, id, {{"consumed", false}},
                                {{"consumed", true}}) != UpdateResult::applied)
    throw Error(Errc::consumed, "token already used");
  return doc->at("account_id").get<std::string>();
}

}  // namespace parcelhub
