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

#include <gtest/gtest.h>

#include "parcelhub/codec.hpp"
#include "parcelhub/http.hpp"

using namespace parcelhub;
using namespace parcelhub::http;

TEST(Http, HeadersAreCaseInsensitive) {
  Headers h{{"Content-Type", "text/plain"}};
  Request r;
  r.headers = h;
  EXPECT_EQ(r.header("content-type"), "text/plain");
  EXPECT_EQ(r.header("CONTENT-TYPE"), "text/plain");
  EXPECT_EQ(r.header("x-missing"), "");
}

TEST(Http, MakeSplitsPathAndQuery) {
  auto r = Request::make("GET", "/api/a%20b/?lat=48.1&lon=-17.5&flag&name=J%C3%BCrgen+X");
  EXPECT_EQ(r.path, "/api/a b/");
  EXPECT_EQ(r.query["lat"], "48.1");
  EXPECT_EQ(r.query["lon"], "-17.5");
  EXPECT_EQ(r.query["flag"], "");
  EXPECT_EQ(r.query["name"], "J\xc3\xbcrgen X");
  EXPECT_EQ(Request::make("GET", "/x").query.size(), 0u);
}

TEST(Http, UrlDecodeLeavesBrokenEscapes) {
  EXPECT_EQ(url_decode("%41%zz%4"), "A%zz%4");
  EXPECT_EQ(url_decode("a+b"), "a b");
}

TEST(Http, MultipartParts) {
  const std::string binary("\x89PNG\r\n\x00\x01\x00", 9);
  std::string body =
      "--XYZ\r\n"
      "Content-Disposition: form-data; name=\"payload\"\r\n"
      "Content-Type: application/json\r\n\r\n"
      "{\"a\":1}\r\n"
      "--XYZ\r\n"
      "Content-Disposition: form-data; name=\"picture\"; filename=\"p.png\"\r\n"
      "Content-Type: image/png\r\n\r\n" +
      binary + "\r\n--XYZ--\r\n";
  auto parts = parse_multipart("multipart/form-data; boundary=XYZ", body);
  ASSERT_TRUE(parts);
  ASSERT_EQ(parts->size(), 2u);
  EXPECT_EQ((*parts)[0].name, "payload");
  EXPECT_EQ((*parts)[0].data, "{\"a\":1}");
  EXPECT_EQ((*parts)[1].filename, "p.png");
  EXPECT_EQ((*parts)[1].content_type, "image/png");
  EXPECT_EQ((*parts)[1].data, binary);  // CRLF and NULs survive
}

TEST(Http, MultipartRejectsMalformed) {
  EXPECT_FALSE(parse_multipart("application/json", "{}"));
  EXPECT_FALSE(parse_multipart("multipart/form-data", "--x\r\n"));
  EXPECT_FALSE(parse_multipart("multipart/form-data; boundary=B", "no delimiter"));
  EXPECT_FALSE(parse_multipart("multipart/form-data; boundary=B",
                               "--B\r\nContent-Disposition: form-data; name=\"a\"\r\n\r\nunterminated"));
  auto empty = parse_multipart("multipart/form-data; boundary=\"B\"", "--B--\r\n");
  ASSERT_TRUE(empty);
  EXPECT_TRUE(empty->empty());
}

TEST(Http, AuthorizationSchemes) {
  const std::string creds = "ann@example.org:pa:ss";
  auto basic = parse_basic_auth("Basic " + base64_encode(Bytes(creds.begin(), creds.end())));
  ASSERT_TRUE(basic);
  EXPECT_EQ(basic->first, "ann@example.org");
  EXPECT_EQ(basic->second, "pa:ss");
  EXPECT_FALSE(parse_basic_auth("Basic !!!"));
  EXPECT_FALSE(parse_basic_auth("Bearer abc"));
  EXPECT_EQ(parse_bearer("bearer  tok.en "), "tok.en");
  EXPECT_FALSE(parse_bearer("Bearer "));
  EXPECT_FALSE(parse_bearer("Basic abc"));
}

TEST(Http, ReasonPhrases) {
  EXPECT_EQ(reason_phrase(409), "Conflict");
  EXPECT_EQ(reason_phrase(413), "Payload Too Large");
  EXPECT_EQ(reason_phrase(799), "Unknown");
}
