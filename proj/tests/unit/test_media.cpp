// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstring>
#include <sstream>

#include "darklight/error.hpp"
#include "darklight/media.hpp"
#include "support.hpp"

using namespace darklight;
using darklight::testing::random_clip;
using darklight::testing::random_frame;
using darklight::testing::TempDir;

namespace {

std::uint32_t read_u32le(const std::string& s, std::size_t off) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(s[off])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[off + 1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[off + 2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[off + 3])) << 24;
}

}  // namespace

TEST_CASE("frame and clip invariants") {
  CHECK_THROWS_AS(Frame(0, 3), PreconditionError);
  CHECK_THROWS_AS(Frame(2, 2, std::vector<std::uint8_t>(11)), PreconditionError);
  CHECK_THROWS_AS(Clip({}), PreconditionError);
  CHECK_THROWS_AS(Clip({Frame(2, 2), Frame(2, 3)}), PreconditionError);
  Clip c({Frame(2, 2)}, std::string("walk"));
  CHECK(c.label() == "walk");
  CHECK_FALSE(Clip({Frame(1, 1)}, std::string()).label().has_value());
}

TEST_CASE("channel rounding is half away from zero, then clamped") {
  CHECK(to_channel(0.5) == 1);
  CHECK(to_channel(1.49) == 1);
  CHECK(to_channel(254.5) == 255);
  CHECK(to_channel(300.0) == 255);
  CHECK(to_channel(-3.0) == 0);
}

TEST_CASE("luma uses Rec.601 weights") {
  const auto white = darklight::testing::uniform_frame(1, 1, 255);
  CHECK(luma(white).values[0] == doctest::Approx(255.0).epsilon(1e-12));
  CHECK(luma(Frame(1, 1)).values[0] == 0.0);
  CHECK(luma(darklight::testing::uniform_frame(1, 1, 100)).values[0] == doctest::Approx(100.0).epsilon(1e-12));
  Frame red(1, 1);
  red.at(0, 0, 0) = 200;
  CHECK(luma(red).values[0] == doctest::Approx(0.299 * 200));
}

TEST_CASE("luma is monotone in each channel") {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    Frame f = random_frame(rng, 1, 1);
    const double before = luma(f).values[0];
    const int c = static_cast<int>(rng.uniform_int(0, 2));
    if (f.at(0, 0, c) == 255) continue;
    f.at(0, 0, c) = static_cast<std::uint8_t>(f.at(0, 0, c) + rng.uniform_int(1, 255 - f.at(0, 0, c)));
    CHECK(luma(f).values[0] > before);
  }
}

TEST_CASE("histogram counts and conservation") {
  const auto black = histogram(Frame(2, 2));
  for (int c = 0; c < 3; ++c) {
    CHECK(black.bins[c][0] == 4);
    for (int v = 1; v < 256; ++v) CHECK(black.bins[c][v] == 0);
  }

  Frame f(2, 2);
  const std::uint8_t reds[4] = {0, 1, 1, 255};
  for (int i = 0; i < 4; ++i) f.at(i % 2, i / 2, 0) = reds[i];
  const auto h = histogram(f);
  CHECK(h.bins[0][0] == 1);
  CHECK(h.bins[0][1] == 2);
  CHECK(h.bins[0][255] == 1);

  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = random_frame(rng);
    const auto hist = histogram(g);
    for (int c = 0; c < 3; ++c) {
      std::uint64_t sum = 0;
      for (auto n : hist.bins[c]) sum += n;
      CHECK(sum == g.pixel_count());
    }
  }
}

TEST_CASE("histogram csv dump") {
  std::ostringstream os;
  write_histogram_csv(histogram(Frame(1, 1)), os);
  const auto s = os.str();
  CHECK(s.rfind("channel,value,count\n", 0) == 0);
  CHECK(s.find("R,0,1\n") != std::string::npos);
  CHECK(s.find("B,255,0\n") != std::string::npos);
  CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 3 * 256);
}

TEST_CASE("PPM encoding") {
  const auto bytes = encode_ppm(Frame(1, 1));
  CHECK(bytes == std::string("P6\n1 1\n255\n") + std::string(3, '\0'));
  CHECK(decode_ppm(bytes) == Frame(1, 1));

  CHECK(decode_ppm("P6\n# comment\n2 1\n255\n" + std::string(6, 'a')) == Frame(2, 1, std::vector<std::uint8_t>(6, 'a')));

  CHECK_THROWS_WITH_AS(decode_ppm("P6\n1 1\n65535\n" + std::string(6, '\0')), doctest::Contains("unsupported maxval"),
                       FormatError);
  CHECK_THROWS_WITH_AS(decode_ppm("P6\n2 2\n255\n" + std::string(5, '\0')), doctest::Contains("truncated"),
                       FormatError);
  CHECK_THROWS_AS(decode_ppm("P3\n1 1\n255\n0 0 0"), FormatError);
  CHECK_THROWS_AS(decode_ppm("P6\n1"), FormatError);
  CHECK_THROWS_AS(decode_ppm(""), FormatError);
}

TEST_CASE("PPM file round trip is byte-identical") {
  TempDir dir("ppm");
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_frame(rng);
    const auto path = dir / "f.ppm";
    save_ppm(f, path);
    const auto original = read_file(path);
    const auto loaded = load_ppm(path);
    CHECK(loaded == f);
    save_ppm(loaded, path);
    CHECK(read_file(path) == original);
  }
}

TEST_CASE("DLV1 container layout") {
  std::vector<Frame> frames(16, Frame(170, 128));
  const auto bytes = encode_clip(Clip(std::move(frames)));
  CHECK(bytes.substr(0, 4) == "DLV1");
  CHECK(read_u32le(bytes, 4) == 16);
  CHECK(read_u32le(bytes, 8) == 128);
  CHECK(read_u32le(bytes, 12) == 170);
  CHECK(bytes[16] == 0);
  CHECK(bytes.size() == 17 + 16u * 128 * 170 * 3);

  const auto labeled = encode_clip(Clip({Frame(1, 1)}, std::string("run")));
  CHECK(labeled[16] == 3);
  CHECK(labeled.substr(17, 3) == "run");
}

TEST_CASE("DLV1 round trip and errors") {
  Rng rng(3);
  const auto clip = random_clip(rng, 4, 8, 6);
  CHECK(decode_clip(encode_clip(clip)) == clip);

  auto bytes = encode_clip(clip);
  CHECK_THROWS_WITH_AS(decode_clip("XXXX" + bytes.substr(4)), doctest::Contains("bad magic"), FormatError);
  CHECK_THROWS_AS(decode_clip(bytes.substr(0, bytes.size() - 1)), FormatError);
  CHECK_THROWS_AS(decode_clip(bytes + "x"), FormatError);
  CHECK_THROWS_AS(decode_clip(bytes.substr(0, 10)), FormatError);
  auto zero_frames = bytes;
  std::memset(zero_frames.data() + 4, 0, 4);
  CHECK_THROWS_AS(decode_clip(zero_frames), FormatError);

  TempDir dir("dlv");
  save_clip(clip, dir / "c.dlv");
  CHECK(load_clip(dir / "c.dlv") == clip);
  CHECK_THROWS_AS(load_clip(dir / "missing.dlv"), Error);
}

TEST_CASE("PIEH flow layout and round trip") {
  FlowField f(3, 2);
  f.set(2, 1, {1.5F, -0.25F});
  const auto bytes = encode_flow(f);
  CHECK(bytes.substr(0, 4) == "PIEH");
  CHECK(read_u32le(bytes, 4) == 3);
  CHECK(read_u32le(bytes, 8) == 2);
  CHECK(bytes.size() == 12 + 3 * 2 * 8);
  float u = 0, v = 0;
  std::memcpy(&u, bytes.data() + 12 + 5 * 8, 4);
  std::memcpy(&v, bytes.data() + 12 + 5 * 8 + 4, 4);
  CHECK(u == 1.5F);
  CHECK(v == -0.25F);
  CHECK(decode_flow(bytes) == f);

  CHECK_THROWS_AS(decode_flow("PIEX" + bytes.substr(4)), FormatError);
  CHECK_THROWS_AS(decode_flow(bytes.substr(0, bytes.size() - 2)), FormatError);
  auto nan_bytes = bytes;
  const float nan = std::nanf("");
  std::memcpy(nan_bytes.data() + 12, &nan, 4);
  CHECK_THROWS_AS(decode_flow(nan_bytes), FormatError);
  CHECK_THROWS_AS(f.set(0, 0, {std::numeric_limits<float>::infinity(), 0.0F}), PreconditionError);
}

TEST_CASE("blank frame detection") {
  CHECK(is_blank(Frame(3, 3)));
  Frame f(3, 3);
  f.at(2, 2, 1) = 1;
  CHECK_FALSE(is_blank(f));
}
