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

// Minimal zip container (stored + deflate, no zip64) that keeps the stored
// bytes of untouched entries so a rewritten archive differs only where
// entries were replaced.

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <zlib.h>

#include "imgtrans/error.hpp"
#include "imgtrans/image_io.hpp"

namespace imgtrans::zip {

struct Entry {
  std::string name;
  std::uint16_t version_made_by = 20;
  std::uint16_t version_needed = 20;
  std::uint16_t flags = 0;
  std::uint16_t method = 8;
  std::uint16_t mod_time = 0;
  std::uint16_t mod_date = (1 << 5) | 1;  // 1980-01-01
  std::uint32_t crc32 = 0;
  std::uint32_t uncompressed_size = 0;
  Bytes raw;  // payload exactly as stored
  Bytes local_extra;
  Bytes central_extra;
  std::string comment;
  std::uint16_t internal_attr = 0;
  std::uint32_t external_attr = 0;
};

namespace detail {

inline std::uint16_t rd16(std::span<const std::uint8_t> b, std::size_t at) {
  if (at + 2 > b.size()) throw Error(ErrorKind::kInvalidDeck, "zip: truncated record");
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}
inline std::uint32_t rd32(std::span<const std::uint8_t> b, std::size_t at) {
  if (at + 4 > b.size()) throw Error(ErrorKind::kInvalidDeck, "zip: truncated record");
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}
inline void wr16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
inline void wr32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}
inline void append(Bytes& out, std::span<const std::uint8_t> data) {
  out.insert(out.end(), data.begin(), data.end());
}

inline std::uint32_t crc(std::span<const std::uint8_t> data) {
  return static_cast<std::uint32_t>(
      ::crc32(0L, data.data(), static_cast<uInt>(data.size())));
}

inline Bytes inflate_raw(std::span<const std::uint8_t> in, std::size_t expected) {
  Bytes out(expected + 1);
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw Error(ErrorKind::kPartParse, "zip: inflateInit failed");
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = ::inflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected) {
    throw Error(ErrorKind::kPartParse, "zip: corrupt deflate stream");
  }
  out.resize(expected);
  return out;
}

inline Bytes deflate_raw(std::span<const std::uint8_t> in) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error(ErrorKind::kIo, "zip: deflateInit failed");
  }
  Bytes out(deflateBound(&zs, static_cast<uLong>(in.size())));
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = ::deflate(&zs, Z_FINISH);
  out.resize(zs.total_out);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error(ErrorKind::kIo, "zip: deflate failed");
  return out;
}

}  // namespace detail

class Archive {
 public:
  static Archive parse(std::span<const std::uint8_t> bytes) {
    using detail::rd16;
    using detail::rd32;
    if (bytes.size() < 22) throw Error(ErrorKind::kInvalidDeck, "zip: file too small");
    std::optional<std::size_t> eocd;
    const std::size_t lowest = bytes.size() > 22 + 65535 ? bytes.size() - 22 - 65535 : 0;
    for (std::size_t pos = bytes.size() - 22 + 1; pos-- > lowest;) {
      if (rd32(bytes, pos) == 0x06054b50) {
        eocd = pos;
        break;
      }
    }
    if (!eocd) throw Error(ErrorKind::kInvalidDeck, "zip: end of central directory not found");
    Archive ar;
    const std::uint16_t count = rd16(bytes, *eocd + 10);
    const std::uint32_t cd_offset = rd32(bytes, *eocd + 16);
    const std::uint16_t comment_len = rd16(bytes, *eocd + 20);
    if (cd_offset == 0xFFFFFFFFu || count == 0xFFFF) {
      throw Error(ErrorKind::kInvalidDeck, "zip: zip64 archives are not supported");
    }
    if (*eocd + 22 + comment_len <= bytes.size()) {
      ar.comment_.assign(reinterpret_cast<const char*>(bytes.data()) + *eocd + 22, comment_len);
    }
    std::size_t pos = cd_offset;
    for (std::uint16_t i = 0; i < count; ++i) {
      if (rd32(bytes, pos) != 0x02014b50) throw Error(ErrorKind::kInvalidDeck, "zip: bad central header");
      Entry e;
      e.version_made_by = rd16(bytes, pos + 4);
      e.version_needed = rd16(bytes, pos + 6);
      e.flags = rd16(bytes, pos + 8);
      e.method = rd16(bytes, pos + 10);
      e.mod_time = rd16(bytes, pos + 12);
      e.mod_date = rd16(bytes, pos + 14);
      e.crc32 = rd32(bytes, pos + 16);
      const std::uint32_t csize = rd32(bytes, pos + 20);
      e.uncompressed_size = rd32(bytes, pos + 24);
      const std::uint16_t name_len = rd16(bytes, pos + 28);
      const std::uint16_t extra_len = rd16(bytes, pos + 30);
      const std::uint16_t cmt_len = rd16(bytes, pos + 32);
      e.internal_attr = rd16(bytes, pos + 36);
      e.external_attr = rd32(bytes, pos + 38);
      const std::uint32_t local = rd32(bytes, pos + 42);
      if (csize == 0xFFFFFFFFu || local == 0xFFFFFFFFu) {
        throw Error(ErrorKind::kInvalidDeck, "zip: zip64 entries are not supported");
      }
      const std::size_t var = pos + 46;
      if (var + name_len + extra_len + cmt_len > bytes.size()) {
        throw Error(ErrorKind::kInvalidDeck, "zip: truncated central header");
      }
      e.name.assign(reinterpret_cast<const char*>(bytes.data()) + var, name_len);
      e.central_extra.assign(bytes.begin() + static_cast<std::ptrdiff_t>(var + name_len),
                             bytes.begin() + static_cast<std::ptrdiff_t>(var + name_len + extra_len));
      e.comment.assign(reinterpret_cast<const char*>(bytes.data()) + var + name_len + extra_len, cmt_len);
      if (rd32(bytes, local) != 0x04034b50) throw Error(ErrorKind::kInvalidDeck, "zip: bad local header");
      const std::uint16_t lname = rd16(bytes, local + 26);
      const std::uint16_t lextra = rd16(bytes, local + 28);
      const std::size_t data_at = local + 30 + lname + lextra;
      if (data_at + csize > bytes.size()) throw Error(ErrorKind::kInvalidDeck, "zip: truncated entry data");
      e.local_extra.assign(bytes.begin() + static_cast<std::ptrdiff_t>(local + 30 + lname),
                           bytes.begin() + static_cast<std::ptrdiff_t>(data_at));
      e.raw.assign(bytes.begin() + static_cast<std::ptrdiff_t>(data_at),
                   bytes.begin() + static_cast<std::ptrdiff_t>(data_at + csize));
      ar.index_[e.name] = ar.entries_.size();
      ar.entries_.push_back(std::move(e));
      pos = var + name_len + extra_len + cmt_len;
    }
    return ar;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& e : entries_) out.push_back(e.name);
    return out;
  }

  bool contains(std::string_view name) const { return index_.count(std::string(name)) > 0; }

  const Entry& entry(std::string_view name) const {
    const auto it = index_.find(std::string(name));
    if (it == index_.end()) throw Error(ErrorKind::kPartParse, "zip: no entry " + std::string(name));
    return entries_[it->second];
  }

  /// Decompressed contents, CRC-checked.
  Bytes read(std::string_view name) const {
    const Entry& e = entry(name);
    Bytes data;
    if (e.method == 0) {
      data = e.raw;
    } else if (e.method == 8) {
      data = detail::inflate_raw(e.raw, e.uncompressed_size);
    } else {
      throw Error(ErrorKind::kPartParse,
                  "zip: unsupported compression method " + std::to_string(e.method) + " for " + e.name);
    }
    if (detail::crc(data) != e.crc32) throw Error(ErrorKind::kPartParse, "zip: CRC mismatch in " + e.name);
    return data;
  }

  std::string read_text(std::string_view name) const {
    const Bytes b = read(name);
    return std::string(b.begin(), b.end());
  }

  /// Replaces the contents of an existing entry (deflated) or appends a new one.
  void put(const std::string& name, std::span<const std::uint8_t> data) {
    auto it = index_.find(name);
    if (it == index_.end()) {
      Entry e;
      e.name = name;
      index_[name] = entries_.size();
      entries_.push_back(std::move(e));
      it = index_.find(name);
    }
    Entry& e = entries_[it->second];
    e.method = 8;
    e.flags &= static_cast<std::uint16_t>(~0x0008u);
    e.version_needed = std::max<std::uint16_t>(e.version_needed, 20);
    e.crc32 = detail::crc(data);
    e.uncompressed_size = static_cast<std::uint32_t>(data.size());
    e.raw = detail::deflate_raw(data);
  }

  void put(const std::string& name, std::string_view text) {
    put(name, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  }

  Bytes serialize() const {
    using detail::wr16;
    using detail::wr32;
    Bytes out;
    std::vector<std::uint32_t> offsets;
    for (const auto& e : entries_) {
      offsets.push_back(static_cast<std::uint32_t>(out.size()));
      wr32(out, 0x04034b50);
      wr16(out, e.version_needed);
      wr16(out, static_cast<std::uint16_t>(e.flags & ~0x0008u));
      wr16(out, e.method);
      wr16(out, e.mod_time);
      wr16(out, e.mod_date);
      wr32(out, e.crc32);
      wr32(out, static_cast<std::uint32_t>(e.raw.size()));
      wr32(out, e.uncompressed_size);
      wr16(out, static_cast<std::uint16_t>(e.name.size()));
      wr16(out, static_cast<std::uint16_t>(e.local_extra.size()));
      out.insert(out.end(), e.name.begin(), e.name.end());
      detail::append(out, e.local_extra);
      detail::append(out, e.raw);
    }
    const auto cd_start = static_cast<std::uint32_t>(out.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& e = entries_[i];
      wr32(out, 0x02014b50);
      wr16(out, e.version_made_by);
      wr16(out, e.version_needed);
      wr16(out, static_cast<std::uint16_t>(e.flags & ~0x0008u));
      wr16(out, e.method);
      wr16(out, e.mod_time);
      wr16(out, e.mod_date);
      wr32(out, e.crc32);
      wr32(out, static_cast<std::uint32_t>(e.raw.size()));
      wr32(out, e.uncompressed_size);
      wr16(out, static_cast<std::uint16_t>(e.name.size()));
      wr16(out, static_cast<std::uint16_t>(e.central_extra.size()));
      wr16(out, static_cast<std::uint16_t>(e.comment.size()));
      wr16(out, 0);
      wr16(out, e.internal_attr);
      wr32(out, e.external_attr);
      wr32(out, offsets[i]);
      out.insert(out.end(), e.name.begin(), e.name.end());
      detail::append(out, e.central_extra);
      out.insert(out.end(), e.comment.begin(), e.comment.end());
    }
    const auto cd_size = static_cast<std::uint32_t>(out.size() - cd_start);
    wr32(out, 0x06054b50);
    wr16(out, 0);
    wr16(out, 0);
    wr16(out, static_cast<std::uint16_t>(entries_.size()));
    wr16(out, static_cast<std::uint16_t>(entries_.size()));
    wr32(out, cd_size);
    wr32(out, cd_start);
    wr16(out, static_cast<std::uint16_t>(comment_.size()));
    out.insert(out.end(), comment_.begin(), comment_.end());
    return out;
  }

 private:
  std::vector<Entry> entries_;
  std::map<std::string, std::size_t> index_;
  std::string comment_;
};

}  // namespace imgtrans::zip
