# Copyright 2026 The ParcelHub Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python access to the parcelhub core.

The native module covers distance, the delivery state machine, password
hashing and field encryption. ``Service`` runs the REST interface in-process,
which is handy for scripting and tests; nothing listens on a socket.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping

from ._core import (
    Error,
    allowed_transitions,
    can_transition,
    decrypt_field,
    delivery_states,
    encrypt_field,
    hash_password,
    haversine_m,
    is_tracking_code,
    verify_password,
)
from ._core import Service as _Service

__all__ = [
    "Error",
    "Response",
    "Service",
    "allowed_transitions",
    "can_transition",
    "decrypt_field",
    "delivery_states",
    "encrypt_field",
    "error_code",
    "hash_password",
    "haversine_m",
    "is_tracking_code",
    "verify_password",
]


def error_code(exc: Error) -> str:
    """Machine-readable code carried by a native ``Error``."""
    return exc.args[0]


@dataclass
class Response:
    status: int
    content_type: str
    body: bytes
    headers: list[tuple[str, str]] = field(default_factory=list)

    def json(self) -> Any:
        return json.loads(self.body)


class Service:
    """In-process platform plus REST gateway, configured like the daemon."""

    def __init__(self, config: Mapping[str, Any]):
        self._native = _Service(json.dumps(dict(config)))

    def request(self, method: str, target: str, *, json_body: Any = None, body: bytes = b"",
                headers: Mapping[str, str] | None = None, bearer: str | None = None) -> Response:
        h = dict(headers or {})
        if json_body is not None:
            body = json.dumps(json_body).encode()
            h.setdefault("Content-Type", "application/json")
        if bearer:
            h["Authorization"] = f"Bearer {bearer}"
        status, ctype, raw, hdrs = self._native.request(method, target, h, body)
        return Response(status, ctype, raw, list(hdrs))

    def openapi(self) -> dict:
        return json.loads(self._native.openapi())

    def drain_outbox(self) -> int:
        return self._native.drain_outbox()
