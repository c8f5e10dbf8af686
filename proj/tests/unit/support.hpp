// SPDX-License-Identifier: Apache-2.0
//
// Random instance generators shared by the unit and acceptance tests.
#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "darklight/media.hpp"
#include "darklight/rng.hpp"
#include "darklight/synthetic.hpp"

namespace darklight::testing {

inline Frame random_frame(Rng& rng, int w, int h) {
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h * 3);
  for (auto& p : px) p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  return Frame(w, h, std::move(px));
}

inline Frame random_frame(Rng& rng) {
  return random_frame(rng, static_cast<int>(rng.uniform_int(1, 24)), static_cast<int>(rng.uniform_int(1, 24)));
}

inline Frame uniform_frame(int w, int h, std::uint8_t value) {
  return Frame(w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h * 3, value));
}

inline Clip random_clip(Rng& rng, std::size_t n, int w, int h) {
  std::vector<Frame> frames;
  for (std::size_t i = 0; i < n; ++i) frames.push_back(random_frame(rng, w, h));
  return Clip(std::move(frames));
}

/// Gray frame from a texture, shifted so that out(x, y) = texture(x + dx, y + dy).
/// The texture must be at least (w + dx) x (h + dy).
inline Frame shifted_gray(const Plane& texture, int w, int h, int dx, int dy) {
  Frame f(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto v = to_channel(texture.at(x + dx, y + dy));
      for (int c = 0; c < 3; ++c) f.at(x, y, c) = v;
    }
  }
  return f;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    Rng rng(std::hash<std::string>{}(tag) ^ static_cast<std::uint64_t>(reinterpret_cast<std::uintptr_t>(this)));
    path_ = std::filesystem::temp_directory_path() / ("darklight-" + tag + "-" + std::to_string(rng.next_u64()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace darklight::testing
