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

#include "parcelhub/platform.hpp"

namespace parcelhub {

Platform::Platform(Config config, PlatformOptions options) : config_(std::move(config)) {
  config_.validate();
  if (options.clock) {
    clock_ = options.clock;
  } else {
    own_clock_ = std::make_unique<SystemClock>();
    clock_ = own_clock_.get();
  }
  if (options.entropy) {
    entropy_ = options.entropy;
  } else {
    own_entropy_ = std::make_unique<SystemEntropy>();
    entropy_ = own_entropy_.get();
  }

  store_ = std::make_unique<SqliteStore>(config_.database, default_indexes());
  cipher_ = std::make_unique<FieldCipher>(FieldKey::from_base64(config_.field_key_id, config_.field_key));
  records_ = std::make_unique<Records>(*store_, *cipher_);
  tokens_ = std::make_unique<TokenService>(config_.signing_key, *store_, *entropy_, config_.tokens);
  outbox_ = std::make_unique<Outbox>(*store_, *cipher_, *entropy_, *clock_, config_.retry);
  accounts_ = std::make_unique<Accounts>(
      *records_, *tokens_, *outbox_, *entropy_, *clock_,
      AccountConfig{config_.require_email_verification, config_.password});
  distance_ = options.distance ? std::move(options.distance) : std::make_unique<HaversineDistance>();
  routes_ = std::make_unique<RouteBook>(*records_);
  dispatch_ = std::make_unique<Dispatch>(*records_, *outbox_, *routes_, *distance_, *entropy_,
                                         *clock_, config_.dispatch);
  hub_ = std::make_unique<Hub>(*records_, *routes_, *tokens_, *clock_, *entropy_, config_.hub);

  if (options.transport) {
    transport_ = std::move(options.transport);
  } else if (config_.mail.transport == "file") {
    transport_ = std::make_unique<FileTransport>(config_.mail.dir);
  } else if (config_.mail.transport == "smtp") {
    transport_ = std::make_unique<SmtpTransport>(config_.mail.smtp_url, config_.mail.smtp_username,
                                                 config_.mail.smtp_password);
  }
}

Platform::~Platform() = default;

DrainReport Platform::drain_outbox(std::size_t batch) {
  if (!transport_) return {};
  return outbox_->drain(*transport_, batch, config_.mail.from, config_.effective_public_url());
}

}  // namespace parcelhub
