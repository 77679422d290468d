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

// Python bindings: geometry, state machine, credential and field crypto
// helpers, plus an in-process service handle that speaks the REST interface
// without a socket.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "parcelhub/codec.hpp"
#include "parcelhub/crypto.hpp"
#include "parcelhub/error.hpp"
#include "parcelhub/gateway.hpp"
#include "parcelhub/geo.hpp"
#include "parcelhub/password.hpp"
#include "parcelhub/platform.hpp"

namespace py = pybind11;
using namespace parcelhub;

namespace {

DeliveryState state_arg(const std::string& s) {
  auto st = parse_delivery_state(s);
  if (!st) throw Error(Errc::validation_error, "unknown delivery state: " + s);
  return *st;
}

Bytes bytes_arg(const py::object& o) {
  std::string s = py::isinstance<py::str>(o) ? o.cast<std::string>() : std::string(o.cast<py::bytes>());
  return Bytes(s.begin(), s.end());
}

class Service {
 public:
  explicit Service(const std::string& config_json)
      : platform_(Config::from_json(Document::parse(config_json))), gateway_(platform_) {}

  py::tuple request(const std::string& method, const std::string& target,
                    const std::map<std::string, std::string>& headers, const py::bytes& body) {
    http::Headers h(headers.begin(), headers.end());
    auto req = http::Request::make(method, target, std::move(h), std::string(body));
    http::Response r;
    {
      py::gil_scoped_release unlocked;
      r = gateway_.handle(req);
    }
    return py::make_tuple(r.status, r.content_type, py::bytes(r.body), r.headers);
  }

  std::string openapi() const { return gateway_.openapi().dump(); }

  std::size_t drain_outbox() {
    py::gil_scoped_release unlocked;
    return platform_.drain_outbox().sent;
  }

 private:
  Platform platform_;
  Gateway gateway_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "parcelhub native core";

  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object args = py::make_tuple(std::string(to_string(e.code())), e.what());
      PyErr_SetObject(error.ptr(), args.ptr());
    }
  });

  m.def("haversine_m",
        [](double lat1, double lon1, double lat2, double lon2) { return haversine_m({lat1, lon1}, {lat2, lon2}); },
        py::arg("lat1"), py::arg("lon1"), py::arg("lat2"), py::arg("lon2"),
        "Great-circle distance in meters.");

  m.def("is_tracking_code", [](const std::string& s) { return TrackingCode::is_well_formed(s); });

  m.def("delivery_states", [] {
    std::vector<std::string> out;
    for (auto s : kAllDeliveryStates) out.emplace_back(to_string(s));
    return out;
  });
  m.def("allowed_transitions", [](const std::string& from) {
    std::vector<std::string> out;
    for (auto s : allowed_transitions(state_arg(from))) out.emplace_back(to_string(s));
    return out;
  });
  m.def("can_transition",
        [](const std::string& from, const std::string& to) { return validate_transition(state_arg(from), state_arg(to)); });

  m.def(
      "hash_password",
      [](const std::string& plain, bool fast) {
        auto params = fast ? PasswordParams::fast_for_tests() : PasswordParams{};
        py::gil_scoped_release unlocked;
        return hash_password(plain, params);
      },
      py::arg("plain"), py::arg("fast") = false);
  m.def("verify_password", [](const std::string& plain, const std::string& hash) {
    py::gil_scoped_release unlocked;
    return verify_password(plain, hash);
  });

  m.def(
      "encrypt_field",
      [](const py::object& plaintext, const std::string& key_id, const std::string& key_b64) {
        auto key = FieldKey::from_base64(key_id, key_b64);
        return encrypt_field(bytes_arg(plaintext), key).to_wire();
      },
      py::arg("plaintext"), py::arg("key_id"), py::arg("key_b64"), "Seal a value; returns the wire form.");
  m.def(
      "decrypt_field",
      [](const std::string& wire, const std::string& key_id, const std::string& key_b64) {
        auto plain = decrypt_field(EncryptedField::from_wire(wire), FieldKey::from_base64(key_id, key_b64));
        return py::bytes(reinterpret_cast<const char*>(plain.data()), plain.size());
      },
      py::arg("wire"), py::arg("key_id"), py::arg("key_b64"));

  py::class_<Service>(m, "Service")
      .def(py::init<const std::string&>(), py::arg("config_json"))
      .def("request", &Service::request, py::arg("method"), py::arg("target"), py::arg("headers"),
           py::arg("body"))
      .def("openapi", &Service::openapi)
      .def("drain_outbox", &Service::drain_outbox);
}
