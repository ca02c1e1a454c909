//
// opforge - fragment-seeded molecule generation toolkit
// SPDX-License-Identifier: Apache-2.0
//

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>

#include <zlib.h>

#include "opforge/error.hpp"
#include "opforge/neural.hpp"

namespace opforge::neural {
namespace {

constexpr std::string_view kMagic = "OPF";
constexpr char kVersion = '1';

void put_u32(std::string &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(std::string_view in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  return v;
}

void put_f64(std::string &out, double x) {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

double get_f64(std::string_view in, std::size_t at) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i)
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  return std::bit_cast<double>(bits);
}

std::uint32_t crc_of(std::string_view bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef *>(bytes.data()),
            static_cast<uInt>(bytes.size())));
}

template <class T>
T parse_number(const std::map<std::string, std::string> &kv, const char *key) {
  auto it = kv.find(key);
  if (it == kv.end())
    throw Error(ErrorCode::kMalformedDataFile, std::string("checkpoint header lacks ") + key);
  T value{};
  const auto &s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorCode::kMalformedDataFile, std::string("bad value for ") + key);
  return value;
}

}  // namespace

std::string checkpoint_bytes(const Checkpoint &ck) {
  ck.config.validate();
  ModelConfig shape = ck.params.shape();
  shape.window_len = ck.config.window_len;
  shape.rng_seed = ck.config.rng_seed;
  if (!(shape == ck.config))
    throw Error(ErrorCode::kShapeMismatch, "params do not match config");

  std::string header;
  header += "vocab_size=" + std::to_string(ck.config.vocab_size) + "\n";
  header += "embed_dim=" + std::to_string(ck.config.embed_dim) + "\n";
  header += "attention_dim=" + std::to_string(ck.config.attention_dim) + "\n";
  header += "hidden_dim=" + std::to_string(ck.config.hidden_dim) + "\n";
  header += "window_len=" + std::to_string(ck.config.window_len) + "\n";
  header += "rng_seed=" + std::to_string(ck.config.rng_seed) + "\n";
  if (!ck.tokens.empty()) {
    header += "tokens=";
    for (std::size_t i = 0; i < ck.tokens.size(); ++i) {
      if (i) header += ' ';
      header += ck.tokens[i];
    }
    header += "\n";
  }

  std::string out(kMagic);
  out.push_back(kVersion);
  put_u32(out, static_cast<std::uint32_t>(header.size()));
  out += header;
  out.reserve(out.size() + 8 * ck.params.parameter_count() + 4);
  for (auto t : ck.params.tensors())
    for (double x : t) put_f64(out, x);
  put_u32(out, crc_of(out));
  return out;
}

Checkpoint checkpoint_from_bytes(std::string_view bytes) {
  if (bytes.size() < 4 || bytes.substr(0, 3) != kMagic)
    throw Error(ErrorCode::kChecksumMismatch, "not an opforge checkpoint");
  if (bytes[3] != kVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                std::string("checkpoint version '") + bytes[3] + "', expected '"
                    + kVersion + "'");
  }
  if (bytes.size() < 12)
    throw Error(ErrorCode::kChecksumMismatch, "checkpoint is truncated");
  const std::string_view body = bytes.substr(0, bytes.size() - 4);
  if (crc_of(body) != get_u32(bytes, bytes.size() - 4))
    throw Error(ErrorCode::kChecksumMismatch, "checkpoint CRC32 does not match");

  const std::uint32_t header_len = get_u32(body, 4);
  if (8 + static_cast<std::size_t>(header_len) > body.size())
    throw Error(ErrorCode::kChecksumMismatch, "header length exceeds file");
  std::map<std::string, std::string> kv;
  std::istringstream lines{std::string(body.substr(8, header_len))};
  for (std::string line; std::getline(lines, line);) {
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::kMalformedDataFile, "header line without '='");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }

  Checkpoint ck;
  ck.config.vocab_size = parse_number<int>(kv, "vocab_size");
  ck.config.embed_dim = parse_number<int>(kv, "embed_dim");
  ck.config.attention_dim = parse_number<int>(kv, "attention_dim");
  ck.config.hidden_dim = parse_number<int>(kv, "hidden_dim");
  ck.config.window_len = parse_number<int>(kv, "window_len");
  ck.config.rng_seed = parse_number<std::uint64_t>(kv, "rng_seed");
  if (auto it = kv.find("tokens"); it != kv.end()) {
    std::istringstream words(it->second);
    for (std::string w; words >> w;) ck.tokens.push_back(w);
  }
  ck.params = ModelParams::zeros(ck.config);

  std::size_t at = 8 + header_len;
  if (body.size() - at != 8 * ck.params.parameter_count())
    throw Error(ErrorCode::kChecksumMismatch, "payload size does not match header");
  for (auto t : ck.params.tensors()) {
    for (double &x : t) {
      x = get_f64(body, at);
      at += 8;
    }
  }
  return ck;
}

void save_checkpoint(const Checkpoint &checkpoint,
                     const std::filesystem::path &path) {
  const std::string bytes = checkpoint_bytes(checkpoint);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIoFailure, "read failed for " + path.string());
  return checkpoint_from_bytes(bytes);
}

}  // namespace opforge::neural
