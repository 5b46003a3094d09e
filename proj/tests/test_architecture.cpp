/*
 * Copyright 2026 The dramnet Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <string>

#include <gtest/gtest.h>

#include "dramnet/architecture.hpp"
#include "dramnet/presets.hpp"

namespace dramnet::nn {
namespace {

TEST(Architecture, FullSizeTableMatchesReferenceRows) {
  const auto blocks = infer_shapes(train::dramnet_full()).blocks();
  ASSERT_EQ(blocks.size(), train::kReferenceDramnetTable.size());
  for (const auto& pub : train::kReferenceDramnetTable) {
    const auto& b = blocks[pub.row - 1];
    SCOPED_TRACE(block_name(pub.row));
    EXPECT_EQ(b.row, pub.row);
    EXPECT_EQ(b.type, pub.type);
    EXPECT_EQ(b.kernel, pub.kernel);
    EXPECT_EQ(b.stride, pub.stride);
    EXPECT_EQ(b.count, pub.count);
    if (pub.note.empty()) EXPECT_EQ(format_dims(b.input), pub.input);
  }
}

TEST(Architecture, InconsistentReferenceRowsAreInferred) {
  const auto blocks = infer_shapes(train::dramnet_full()).blocks();
  EXPECT_EQ(format_dims(blocks[4].input), "512 x 512 x 128");
  EXPECT_NE(format_dims(blocks[4].input), train::kReferenceDramnetTable[4].input);
  EXPECT_EQ(format_dims(blocks[6].input), "256 x 256 x 192");
  EXPECT_FALSE(train::kReferenceDramnetTable[4].note.empty());
  EXPECT_FALSE(train::kReferenceDramnetTable[6].note.empty());
}

TEST(Architecture, FullSizeFlattenWidth) {
  const auto blocks = infer_shapes(train::dramnet_full()).blocks();
  EXPECT_EQ(blocks[7].input.flat(), 128u * 128u * 192u);
}

TEST(Architecture, DeskSizeFlattenWidth) {
  const auto t = infer_shapes(train::dramnet_desk());
  const auto blocks = t.blocks();
  EXPECT_EQ(format_dims(blocks[7].input), "8 x 8 x 192");
  EXPECT_EQ(blocks[7].input.flat(), 12288u);
  EXPECT_EQ(format_dims(t.layers.back().output), "3");
}

TEST(Architecture, ParameterCountsAtDeskSize) {
  const auto blocks = infer_shapes(train::dramnet_desk()).blocks();
  // conv weights + bias + four batchnorm vectors per channel
  EXPECT_EQ(blocks[0].params, 3u * 3 * 1 * 3 + 3 + 4 * 3);
  EXPECT_EQ(blocks[1].params, 3u * 3 * 3 * 64 + 64 + 4 * 64);
  EXPECT_EQ(blocks[2].params, 0u);
  EXPECT_EQ(blocks[7].params, 12288u * 2048 + 2048 + 4 * 2048);
  EXPECT_EQ(blocks[9].params, 2048u * 3 + 3);
}

TEST(Architecture, TooSmallInputNamesTheBlock) {
  try {
    infer_shapes(train::dramnet_spec(4));
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("Layer7"), std::string::npos) << e.what();
  }
}

TEST(Architecture, ClassifierWidthMustMatchClasses) {
  auto a = train::dramnet_desk();
  a.n_classes = 4;
  EXPECT_THROW(infer_shapes(a), ShapeError);
}

TEST(Architecture, MustEndWithSoftmax) {
  auto a = train::dramnet_desk();
  a.layers.pop_back();
  EXPECT_THROW(infer_shapes(a), ShapeError);
}

TEST(Architecture, JsonRoundTrip) {
  for (const auto& [name, arch] : train::presets()) {
    SCOPED_TRACE(name);
    const nlohmann::json j = arch;
    EXPECT_EQ(j.get<ArchitectureSpec>(), arch);
  }
}

TEST(Architecture, ComparatorsInferAtDeskSize) {
  EXPECT_NO_THROW(infer_shapes(train::alexnet_s()));
  EXPECT_NO_THROW(infer_shapes(train::vggnet_s()));
  EXPECT_THROW(train::preset_for("lenet", 64), ParameterError);
}

}  // namespace
}  // namespace dramnet::nn
