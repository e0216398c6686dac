// Copyright 2026 The imgtrans Authors.
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

#include <thread>

#include "support.hpp"

namespace imgtrans {
namespace {

using nlohmann::json;

/// In-process HTTP server on an ephemeral port.
class FakeServer {
 public:
  FakeServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }

  void reply(const std::string& path, std::function<json(const json&)> fn) {
    server_.Post(path, [fn = std::move(fn), this](const httplib::Request& req, httplib::Response& res) {
      last_request = json::parse(req.body);
      res.set_content(fn(last_request).dump(), "application/json");
    });
  }
  void raw(const std::string& path, int status, std::string body) {
    server_.Post(path, [status, body](const httplib::Request&, httplib::Response& res) {
      res.status = status;
      res.set_content(body, "text/plain");
    });
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  json last_request;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

const LangPair kEnDe = LangPair::make("en", "de");

template <typename F>
std::optional<ErrorKind> kind_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

TEST(Endpoint, ParsesHttpUrls) {
  const auto e = remote::Endpoint::parse("http://host:8080/api/v1/");
  EXPECT_EQ(e.origin, "http://host:8080");
  EXPECT_EQ(e.prefix, "/api/v1");
  EXPECT_EQ(remote::Endpoint::parse("http://h").prefix, "");
  EXPECT_EQ(kind_of([] { remote::Endpoint::parse("https://h"); }), ErrorKind::kConfig);
  EXPECT_EQ(kind_of([] { remote::Endpoint::parse("ftp://h"); }), ErrorKind::kConfig);
  EXPECT_EQ(kind_of([] { remote::Endpoint::parse("http://"); }), ErrorKind::kConfig);
}

TEST(RemoteMt, SendsTextPairAndOptionalImage) {
  FakeServer server;
  server.reply("/translate", [](const json& req) { return json{{"text", "[" + req["text"].get<std::string>() + "]"}}; });
  remote::RemoteMt text_only(server.url(), Modality::kText);
  EXPECT_EQ(text_only.translate("Exit", kEnDe, nullptr), "[Exit]");
  EXPECT_EQ(server.last_request["src"], "en");
  EXPECT_EQ(server.last_request["tgt"], "de");
  EXPECT_FALSE(server.last_request.contains("image"));

  const RasterImage ctx(3, 2, Color{1, 2, 3});
  remote::RemoteMt multimodal(server.url(), Modality::kTextImage);
  multimodal.translate("Exit", kEnDe, &ctx);
  const auto sent = decode_image(base64::decode(server.last_request["image"].get<std::string>()));
  EXPECT_EQ(sent, ctx);
}

TEST(RemoteOcr, ParsesTokens) {
  FakeServer server;
  server.reply("/ocr", [](const json&) {
    return json{{"tokens", {{{"text", "Exit"}, {"poly", {{1, 2}, {30, 2}, {30, 12}, {1, 12}}}, {"conf", 0.8}}}}};
  });
  remote::RemoteOcr ocr(server.url());
  const auto toks = recognize(RasterImage(50, 20), OCRConfig{0.5, std::string("en")}, ocr, "x");
  ASSERT_EQ(toks.size(), 1u);
  EXPECT_EQ(toks[0].text, "Exit");
  EXPECT_EQ(toks[0].bbox(), (BBox{1, 2, 30, 12}));
  EXPECT_EQ(server.last_request["lang_hint"], "en");
}

TEST(RemoteLayout, BuildsBlocksFromIndices) {
  FakeServer server;
  server.reply("/layout", [](const json&) { return json{{"blocks", {{{"lines", {{1, 0}}}}, {{"lines", {{2}}}}}}}; });
  const std::vector<OCRToken> toks = {make_token("a", BBox{0, 0, 10, 10}), make_token("b", BBox{12, 0, 20, 10}),
                                      make_token("c", BBox{0, 50, 10, 60})};
  remote::RemoteLayout layout(server.url());
  const auto blocks = layout.analyze(toks, "");
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(blocks[0].lines[0].text(), "a b");
  EXPECT_EQ(server.last_request["tokens"].size(), 3u);

  FakeServer bad;
  bad.reply("/layout", [](const json&) { return json{{"blocks", {{{"lines", {{0, 0}}}}}}}; });
  remote::RemoteLayout bad_layout(bad.url());
  EXPECT_EQ(kind_of([&] { bad_layout.analyze(toks, ""); }), ErrorKind::kMalformedResponse);
}

TEST(RemoteInpaint, RoundTripsImageAndMask) {
  FakeServer server;
  server.reply("/inpaint", [](const json& req) {
    auto img = decode_image(base64::decode(req["image"].get<std::string>()));
    const auto mask = decode_mask_png(base64::decode(req["mask"].get<std::string>()));
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        if (mask.at(x, y)) img.set(x, y, Color{9, 9, 9});
      }
    }
    return json{{"image", base64::encode(encode_png(img))}};
  });
  remote::RemoteInpaint backend(server.url());
  Mask m(4, 3);
  m.set(1, 1);
  const auto out = inpaint(RasterImage(4, 3, Color{200, 200, 200}), m, backend);
  EXPECT_EQ(out.at(1, 1), (Color{9, 9, 9}));
  EXPECT_EQ(out.at(0, 0), (Color{200, 200, 200}));
}

TEST(Remote, UnreachableEndpoint) {
  remote::ClientOptions opts;
  opts.connect_timeout = std::chrono::milliseconds(500);
  remote::RemoteMt mt("http://127.0.0.1:1", Modality::kText, opts);
  try {
    mt.translate("x", kEnDe, nullptr);
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kBackendUnreachable);
    EXPECT_EQ(e.backend(), "remote-mt@http://127.0.0.1:1");
  }
}

TEST(Remote, MalformedRepliesCarryExcerpt) {
  FakeServer server;
  server.raw("/translate", 200, "not json at all");
  server.raw("/ocr", 500, "internal failure");
  server.reply("/inpaint", [](const json&) { return json{{"nope", 1}}; });
  remote::RemoteMt mt(server.url(), Modality::kText);
  try {
    mt.translate("x", kEnDe, nullptr);
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMalformedResponse);
    EXPECT_EQ(e.payload_excerpt(), "not json at all");
  }
  remote::RemoteOcr ocr(server.url());
  EXPECT_EQ(kind_of([&] { ocr.detect(RasterImage(2, 2), {}, ""); }), ErrorKind::kMalformedResponse);
  remote::RemoteInpaint inp(server.url());
  Mask m(2, 2);
  m.set(0, 0);
  EXPECT_EQ(kind_of([&] { inp.fill(RasterImage(2, 2), m); }), ErrorKind::kMalformedResponse);
}

TEST(Remote, WrongSizedInpaintIsAContractViolation) {
  FakeServer server;
  server.reply("/inpaint", [](const json&) { return json{{"image", base64::encode(encode_png(RasterImage(1, 1)))}}; });
  remote::RemoteInpaint backend(server.url());
  Mask m(2, 2);
  m.set(0, 0);
  EXPECT_EQ(kind_of([&] { inpaint(RasterImage(2, 2), m, backend); }), ErrorKind::kContractViolation);
}

}  // namespace
}  // namespace imgtrans
