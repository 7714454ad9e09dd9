// Copyright 2026 The unitforge Authors.
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


#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "unitforge/backbone.hpp"
#include "unitforge/error.hpp"
#include "unitforge/numkit/gradcheck.hpp"
#include "unitforge/numkit/ops.hpp"

using namespace unitforge;

namespace {

// Layer-by-layer valid-convolution length, written out independently.
std::size_t walk_length(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& kernel_stride) {
  for (auto [k, s] : kernel_stride) {
    if (n < k) return 0;
    n = (n - k) / s + 1;
  }
  return n;
}

const std::vector<std::pair<std::size_t, std::size_t>> kPaperLayers{
    {10, 5}, {3, 2}, {3, 2}, {3, 2}, {3, 2}, {2, 2}, {2, 2}};

FeatureSeq random_feats(std::size_t t, std::size_t d, Rng& rng) {
  return FeatureSeq(testutil::random_tensor({t, d}, rng), 50.0);
}

}  // namespace

TEST_CASE("paper encoder: 16 kHz in, 50 frames per second out") {
  const auto enc = EncoderConfig::paper();
  CHECK(enc.total_stride() == 320);
  CHECK(enc.output_rate() == doctest::Approx(50.0));
  CHECK(enc.output_dim() == 512);
  for (std::size_t n : {1, 2, 5, 10}) {
    const std::size_t frames = output_length(16000 * n, enc);
    CHECK(std::llabs(static_cast<long long>(frames) - static_cast<long long>(50 * n)) <= 1);
  }
  CHECK(output_length(32000, enc) == walk_length(32000, kPaperLayers));
  CHECK(std::llabs(static_cast<long long>(output_length(32000, enc)) - 100) <= 1);
}

TEST_CASE("receptive field is the shortest input giving one frame") {
  const auto enc = EncoderConfig::paper();
  const std::size_t rf = receptive_field(enc);
  CHECK(walk_length(rf, kPaperLayers) == 1);
  CHECK(walk_length(rf - 1, kPaperLayers) == 0);
  CHECK(rf == 400);
  CHECK_THROWS_AS(output_length(rf - 1, enc), Error);
}

TEST_CASE("waveform encoder output count equals the length formula") {
  Backbone b(BackboneConfig{EncoderConfig::desk_waveform(4), true, ContextConfig{1, 8, 16, 2}}, 1);
  Utterance u{"u", std::vector<double>(16000, 0.0)};
  Rng rng(2);
  for (auto& s : u.samples) s = rng.normal();
  const auto feats = b.encode(u);
  CHECK(feats.num_frames() == output_length(16000, b.config().encoder));
  CHECK(feats.frame_rate == doctest::Approx(50.0));
  CHECK(feats.dim() == 4);
}

TEST_CASE("paper preset parameter count is within 10% of 95M") {
  const std::size_t n = param_count(BackboneConfig::paper());
  CHECK(std::abs(static_cast<double>(n) - 95e6) <= 0.1 * 95e6);
}

TEST_CASE("desk parameter count matches the hand sum and the instantiated tensors") {
  // conv 16*32+32, feature norm 64, proj 32*32+32, mask 32, positions 1024*32,
  // input norm 64, per block 4*(32*32+32) + (32*64+64) + (64*32+32) + 4*32.
  const std::size_t hand = 544 + 64 + 1056 + 32 + 32768 + 64 + 2 * (4224 + 2112 + 2080 + 128);
  CHECK(param_count(BackboneConfig::desk(16)) == hand);
  Backbone desk(BackboneConfig::desk(16), 0);
  CHECK(desk.params().scalar_count() == hand);

  BackboneConfig wider = BackboneConfig::desk(16);
  wider.context = ContextConfig{4, 128, 512, 8};
  Backbone b(wider, 0);
  CHECK(param_count(wider) == b.params().scalar_count());
}

TEST_CASE("fixed seed and input give bit-identical output") {
  Rng rng(4);
  const auto x = random_feats(20, 16, rng);
  Backbone a(BackboneConfig::desk(16), 9), b(BackboneConfig::desk(16), 9), c(BackboneConfig::desk(16), 10);
  const auto ya = a.context_forward(a.project_and_mask(a.encode(x), MaskSet{std::vector<bool>(20, false)}));
  const auto yb = b.context_forward(b.project_and_mask(b.encode(x), MaskSet{std::vector<bool>(20, false)}));
  const auto yc = c.context_forward(c.project_and_mask(c.encode(x), MaskSet{std::vector<bool>(20, false)}));
  CHECK(ya.frames == yb.frames);
  CHECK_FALSE(ya.frames == yc.frames);
  CHECK(ya.num_frames() == 20);
  CHECK(ya.dim() == 32);
}

TEST_CASE("masked rows all equal the mask embedding") {
  Rng rng(5);
  Backbone b(BackboneConfig::desk(16), 3);
  const auto enc = b.encode(random_feats(12, 16, rng));
  std::vector<bool> m(12, false);
  for (std::size_t t = 0; t < 12; t += 2) m[t] = true;
  const auto out = b.project_and_mask(enc, MaskSet{m});
  const auto& emb = b.params().get("mask_emb").value();
  for (std::size_t t = 0; t < 12; ++t) {
    const auto row = out.frames.row(t);
    if (m[t]) {
      for (std::size_t j = 0; j < row.size(); ++j) CHECK(row[j] == emb[j]);
    } else {
      CHECK_FALSE(row[0] == emb[0]);
    }
  }
}

TEST_CASE("per-utterance output does not depend on batch order") {
  Rng rng(6);
  Backbone b(BackboneConfig::desk(16), 3);
  const auto u1 = random_feats(10, 16, rng), u2 = random_feats(14, 16, rng);
  const auto a1 = b.layer_features(u1, 1);
  const auto a2 = b.layer_features(u2, 1);
  CHECK(b.layer_features(u2, 1).frames == a2.frames);
  CHECK(b.layer_features(u1, 1).frames == a1.frames);
}

TEST_CASE("gradient check through one transformer block") {
  BackboneConfig cfg = BackboneConfig::desk(4);
  cfg.encoder = EncoderConfig::features(4, 6);
  cfg.context = ContextConfig{1, 8, 12, 2};
  Rng rng(8);
  for (int trial = 0; trial < 3; ++trial) {
    Backbone b(cfg, 20 + static_cast<std::uint64_t>(trial));
    nk::Var x = nk::constant(testutil::random_tensor({5, 8}, rng));
    nk::Var probe = nk::constant(testutil::random_tensor({5, 8}, rng));
    std::vector<nk::Var> ps;
    for (std::size_t i = 0; i < b.params().names().size(); ++i) {
      if (b.params().names()[i].rfind("context.layer0", 0) == 0) ps.push_back(b.params().vars()[i]);
    }
    REQUIRE(ps.size() == 16);
    const auto r = nk::grad_check([&] { return nk::sum(nk::mul(b.transformer_block(x, 0), probe)); }, ps);
    CHECK(r.max_rel_error <= 1e-4);
  }
}

TEST_CASE("context network rejects sequences longer than the position table") {
  BackboneConfig cfg = BackboneConfig::desk(4);
  cfg.context.max_positions = 8;
  Backbone b(cfg, 0);
  Rng rng(1);
  CHECK_NOTHROW(b.layer_features(random_feats(8, 4, rng), 0));
  CHECK_THROWS_AS(b.layer_features(random_feats(9, 4, rng), 0), Error);
}

TEST_CASE("config JSON and checkpoint round trip") {
  const auto paper = BackboneConfig::paper();
  const auto back = backbone_config_from_json(to_json_string(paper));
  CHECK(to_json_string(back) == to_json_string(paper));
  CHECK(param_count(back) == param_count(paper));
  CHECK_THROWS_AS(backbone_config_from_json("{\"encoder\": 3}"), IoError);

  testutil::TempDir dir("backbone");
  Rng rng(2);
  Backbone b(BackboneConfig::desk(16), 4);
  b.save(dir.path());
  const Backbone c = Backbone::load(dir.path());
  const auto x = random_feats(9, 16, rng);
  CHECK(b.layer_features(x, 1).frames == c.layer_features(x, 1).frames);
}
