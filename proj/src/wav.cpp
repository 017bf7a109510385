// Copyright 2026 The tonelens Authors. All Rights Reserved.
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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "tonelens/corpus.hpp"
#include "tonelens/error.hpp"

namespace tonelens {

namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

bool tag_is(const std::uint8_t* p, const char* tag) { return std::memcmp(p, tag, 4) == 0; }

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

double decode_sample(const std::uint8_t* p, const FmtChunk& fmt) {
  if (fmt.format == kFormatFloat) {
    float f;
    std::uint32_t u = read_u32(p);
    std::memcpy(&f, &u, sizeof f);
    if (!std::isfinite(f)) return 0.0;
    return std::clamp(static_cast<double>(f), -1.0, 1.0);
  }
  switch (fmt.bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16:
      return static_cast<std::int16_t>(read_u16(p)) / 32768.0;
    case 24: {
      std::int32_t v = static_cast<std::int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    case 32:
      return static_cast<std::int32_t>(read_u32(p)) / 2147483648.0;
  }
  return 0.0;
}

}  // namespace

AudioClip decode_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || !tag_is(bytes.data(), "RIFF") || !tag_is(bytes.data() + 8, "WAVE")) {
    throw Error(ErrorKind::kFormat, "missing RIFF/WAVE header");
  }

  std::optional<FmtChunk> fmt;
  std::span<const std::uint8_t> data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* hdr = bytes.data() + pos;
    const std::size_t size = read_u32(hdr + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = std::min(size, bytes.size() - body);

    if (tag_is(hdr, "fmt ")) {
      if (avail < 16) throw Error(ErrorKind::kFormat, "fmt chunk shorter than 16 bytes");
      const std::uint8_t* f = bytes.data() + body;
      FmtChunk c;
      c.format = read_u16(f);
      c.channels = read_u16(f + 2);
      c.sample_rate = read_u32(f + 4);
      c.block_align = read_u16(f + 12);
      c.bits = read_u16(f + 14);
      if (c.format == kFormatExtensible) {
        if (avail < 40) throw Error(ErrorKind::kFormat, "truncated WAVE_FORMAT_EXTENSIBLE chunk");
        c.format = read_u16(f + 24);  // first two bytes of the sub-format GUID
      }
      fmt = c;
    } else if (tag_is(hdr, "data")) {
      if (!fmt) throw Error(ErrorKind::kFormat, "data chunk precedes fmt chunk");
      data = bytes.subspan(body, avail);
      have_data = true;
      break;
    }
    pos = body + size + (size & 1);
  }

  if (!fmt) throw Error(ErrorKind::kFormat, "no fmt chunk");
  if (!have_data) throw Error(ErrorKind::kFormat, "no data chunk");

  if (fmt->format != kFormatPcm && fmt->format != kFormatFloat) {
    throw Error(ErrorKind::kUnsupportedCodec,
                "format tag 0x" + [&] {
                  char buf[8];
                  std::snprintf(buf, sizeof buf, "%04X", fmt->format);
                  return std::string(buf);
                }());
  }
  if (fmt->format == kFormatFloat && fmt->bits != 32) {
    throw Error(ErrorKind::kUnsupportedCodec, "float samples must be 32-bit");
  }
  if (fmt->format == kFormatPcm && fmt->bits != 8 && fmt->bits != 16 && fmt->bits != 24 &&
      fmt->bits != 32) {
    throw Error(ErrorKind::kUnsupportedCodec, "PCM bit depth " + std::to_string(fmt->bits));
  }
  if (fmt->channels != 1 && fmt->channels != 2) {
    throw Error(ErrorKind::kFormat, "channel count " + std::to_string(fmt->channels));
  }
  if (fmt->sample_rate == 0) throw Error(ErrorKind::kFormat, "sample rate 0");
  const std::size_t sample_bytes = fmt->bits / 8;
  if (fmt->block_align != sample_bytes * fmt->channels) {
    throw Error(ErrorKind::kFormat, "block align inconsistent with channels and bit depth");
  }

  const std::size_t frames = data.size() / fmt->block_align;
  if (frames == 0) throw Error(ErrorKind::kEmptyAudio, "zero-length data chunk");

  AudioClip clip;
  clip.sample_rate = static_cast<int>(fmt->sample_rate);
  clip.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    const std::uint8_t* frame = data.data() + i * fmt->block_align;
    if (fmt->channels == 1) {
      clip.samples[i] = decode_sample(frame, *fmt);
    } else {
      clip.samples[i] =
          0.5 * (decode_sample(frame, *fmt) + decode_sample(frame + sample_bytes, *fmt));
    }
  }
  return clip;
}

AudioClip load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    AudioClip clip = decode_wav(bytes);
    clip.token_id = path.stem().string();
    return clip;
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + std::string(e.what()));
  }
}

std::vector<std::uint8_t> encode_wav16(const AudioClip& clip) {
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (double s : clip.samples) {
    const double scaled = std::round(std::clamp(s, -1.0, 1.0) * 32768.0);
    const auto v = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    put_u16(out, static_cast<std::uint16_t>(v));
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip) {
  const auto bytes = encode_wav16(clip);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

AudioClip resample(const AudioClip& clip, int target_rate) {
  if (target_rate <= 0) throw Error(ErrorKind::kParameter, "target rate must be positive");
  if (target_rate == clip.sample_rate || clip.samples.empty()) {
    AudioClip out = clip;
    out.sample_rate = target_rate;
    return out;
  }
  const std::size_t n_in = clip.samples.size();
  const auto n_out = static_cast<std::size_t>(
      std::llround(static_cast<double>(n_in) * target_rate / clip.sample_rate));
  const double step = static_cast<double>(clip.sample_rate) / target_rate;

  AudioClip out;
  out.sample_rate = target_rate;
  out.token_id = clip.token_id;
  out.samples.resize(n_out);
  for (std::size_t i = 0; i < n_out; ++i) {
    const double pos = i * step;
    const auto j = static_cast<std::size_t>(pos);
    if (j + 1 >= n_in) {
      out.samples[i] = clip.samples.back();
      continue;
    }
    const double frac = pos - j;
    out.samples[i] = clip.samples[j] + frac * (clip.samples[j + 1] - clip.samples[j]);
  }
  return out;
}

}  // namespace tonelens
