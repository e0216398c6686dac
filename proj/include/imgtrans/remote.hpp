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

#pragma once

// HTTP adapters for model-backed stages. Each backend POSTs JSON to a fixed
// path under a base URL:
//   /ocr        {image, lang_hint}        -> {tokens: [{text, poly, conf}]}
//   /layout     {tokens: [...]}           -> {blocks: [{lines: [[token index, ...], ...]}]}
//   /translate  {text, src, tgt, image?}  -> {text}
//   /inpaint    {image, mask}             -> {image}
// Images travel as base64 PNG; masks as base64 1-bit PNG.

#include <chrono>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "imgtrans/base64.hpp"
#include "imgtrans/error.hpp"
#include "imgtrans/image_io.hpp"
#include "imgtrans/inpaint.hpp"
#include "imgtrans/layout.hpp"
#include "imgtrans/ocr.hpp"
#include "imgtrans/translation.hpp"

namespace imgtrans::remote {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing slash

  static Endpoint parse(std::string_view url) {
    const auto scheme = url.find("://");
    if (scheme == std::string_view::npos || url.substr(0, scheme) != "http") {
      throw Error(ErrorKind::kConfig, "backend url must start with http://: " + std::string(url));
    }
    const auto slash = url.find('/', scheme + 3);
    Endpoint e;
    e.origin = std::string(url.substr(0, slash));
    if (slash != std::string_view::npos) {
      e.prefix = std::string(url.substr(slash));
      while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
    }
    if (e.origin.size() <= scheme + 3) throw Error(ErrorKind::kConfig, "backend url has no host: " + std::string(url));
    return e;
  }

  std::string url() const { return origin + prefix; }
};

inline bool looks_like_url(std::string_view s) { return s.rfind("http://", 0) == 0 || s.rfind("https://", 0) == 0; }

struct ClientOptions {
  std::chrono::milliseconds connect_timeout{5000};
  std::chrono::milliseconds read_timeout{120000};
  bool concurrent = false;
};

/// POSTs `body` and returns the parsed JSON reply. Transport failures raise
/// backend-unreachable; non-200 replies and unparsable bodies raise
/// malformed-response with an excerpt of the payload.
inline nlohmann::json post_json(const std::string& backend, const Endpoint& ep, std::string_view path,
                                const nlohmann::json& body, const ClientOptions& opts) {
  httplib::Client client(ep.origin);
  client.set_connection_timeout(opts.connect_timeout);
  client.set_read_timeout(opts.read_timeout);
  client.set_write_timeout(opts.read_timeout);
  const std::string target = ep.prefix + std::string(path);
  auto res = client.Post(target, body.dump(), "application/json");
  if (!res) {
    throw BackendError(ErrorKind::kBackendUnreachable, backend,
                       ep.url() + std::string(path) + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw BackendError(ErrorKind::kMalformedResponse, backend, "HTTP status " + std::to_string(res->status),
                       excerpt(res->body));
  }
  try {
    auto j = nlohmann::json::parse(res->body);
    if (!j.is_object()) throw std::runtime_error("reply is not a JSON object");
    return j;
  } catch (const std::exception& e) {
    throw BackendError(ErrorKind::kMalformedResponse, backend, e.what(), excerpt(res->body));
  }
}

template <typename F>
auto read_reply(const std::string& backend, const nlohmann::json& reply, F&& fn) {
  try {
    return std::forward<F>(fn)(reply);
  } catch (const BackendError&) {
    throw;
  } catch (const std::exception& e) {
    throw BackendError(ErrorKind::kMalformedResponse, backend, e.what(), excerpt(reply.dump()));
  }
}

inline std::string image_payload(const RasterImage& image) { return base64::encode(encode_png(image)); }

class RemoteOcr final : public OcrBackend {
 public:
  explicit RemoteOcr(std::string_view url, ClientOptions opts = {})
      : ep_(Endpoint::parse(url)), opts_(opts), info_{"remote-ocr@" + ep_.url(), {}, opts.concurrent} {}

  const BackendInfo& info() const override { return info_; }

  std::vector<OCRToken> detect(const RasterImage& image, const OCRConfig& cfg, std::string_view) override {
    nlohmann::json body = {{"image", image_payload(image)}};
    body["lang_hint"] = cfg.lang_hint ? nlohmann::json(*cfg.lang_hint) : nlohmann::json(nullptr);
    const auto reply = post_json(info_.name, ep_, "/ocr", body, opts_);
    return read_reply(info_.name, reply, [](const nlohmann::json& j) {
      std::vector<OCRToken> tokens;
      for (const auto& t : j.at("tokens")) tokens.push_back(token_from_json(t));
      return tokens;
    });
  }

 private:
  Endpoint ep_;
  ClientOptions opts_;
  BackendInfo info_;
};

class RemoteLayout final : public LayoutBackend {
 public:
  explicit RemoteLayout(std::string_view url, ClientOptions opts = {})
      : ep_(Endpoint::parse(url)), opts_(opts), info_{"remote-layout@" + ep_.url(), {}, opts.concurrent} {}

  const BackendInfo& info() const override { return info_; }

  std::vector<TextBlock> analyze(std::span<const OCRToken> tokens, std::string_view) override {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& t : tokens) list.push_back(token_to_json(t));
    const auto reply = post_json(info_.name, ep_, "/layout", {{"tokens", list}}, opts_);
    return read_reply(info_.name, reply, [&](const nlohmann::json& j) {
      std::vector<TextBlock> blocks;
      std::vector<bool> used(tokens.size(), false);
      for (const auto& jb : j.at("blocks")) {
        std::vector<TextLine> lines;
        for (const auto& jl : jb.at("lines")) {
          std::vector<std::size_t> ids;
          for (const auto& id : jl) {
            const auto k = id.get<std::size_t>();
            if (k >= tokens.size() || used[k]) {
              throw std::runtime_error("token index " + std::to_string(k) + " invalid or repeated");
            }
            used[k] = true;
            ids.push_back(k);
          }
          if (ids.empty()) throw std::runtime_error("empty line");
          lines.push_back(make_line(tokens, std::move(ids)));
        }
        if (lines.empty()) throw std::runtime_error("empty block");
        blocks.push_back(make_block(std::move(lines)));
      }
      for (std::size_t k = 0; k < used.size(); ++k) {
        if (!used[k]) throw std::runtime_error("token " + std::to_string(k) + " not assigned to a line");
      }
      return blocks;
    });
  }

 private:
  Endpoint ep_;
  ClientOptions opts_;
  BackendInfo info_;
};

class RemoteMt final : public MtBackend {
 public:
  RemoteMt(std::string_view url, Modality modality, ClientOptions opts = {})
      : ep_(Endpoint::parse(url)), opts_(opts), info_{"remote-mt@" + ep_.url(), modality, {}, opts.concurrent} {}

  const MtInfo& info() const override { return info_; }

  std::string translate(const std::string& text, const LangPair& pair, const RasterImage* context) override {
    nlohmann::json body = {{"text", text}, {"src", pair.src}, {"tgt", pair.tgt}};
    if (context != nullptr) body["image"] = image_payload(*context);
    const auto reply = post_json(info_.name, ep_, "/translate", body, opts_);
    return read_reply(info_.name, reply, [](const nlohmann::json& j) { return j.at("text").get<std::string>(); });
  }

 private:
  Endpoint ep_;
  ClientOptions opts_;
  MtInfo info_;
};

class RemoteInpaint final : public InpaintBackend {
 public:
  explicit RemoteInpaint(std::string_view url, ClientOptions opts = {})
      : ep_(Endpoint::parse(url)), opts_(opts), info_{"remote-inpaint@" + ep_.url(), {}, opts.concurrent} {}

  const BackendInfo& info() const override { return info_; }

  RasterImage fill(const RasterImage& image, const Mask& mask) override {
    const nlohmann::json body = {{"image", image_payload(image)}, {"mask", base64::encode(encode_mask_png(mask))}};
    const auto reply = post_json(info_.name, ep_, "/inpaint", body, opts_);
    return read_reply(info_.name, reply, [](const nlohmann::json& j) {
      return decode_image(base64::decode(j.at("image").get<std::string>()));
    });
  }

 private:
  Endpoint ep_;
  ClientOptions opts_;
  BackendInfo info_;
};

}  // namespace imgtrans::remote
