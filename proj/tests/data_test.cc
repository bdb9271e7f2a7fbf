#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "reblur/data/dataset.h"
#include "reblur/data/image.h"
#include "reblur/data/png_io.h"
#include "test_util.h"

namespace reblur {
namespace {

using testing::RandomImage;
using testing::TempDir;

double KernelSum(const BlurKernel& k) {
  return std::accumulate(k.weights().begin(), k.weights().end(), 0.0);
}

TEST(MotionKernel, ZeroLengthIsDelta) {
  for (double angle : {0.0, 0.7, 2.9}) {
    const BlurKernel k = MakeMotionKernel(0.0, angle, 9);
    EXPECT_EQ(k, BlurKernel::Delta(9));
  }
}

TEST(MotionKernel, HorizontalLengthThree) {
  // The segment [-1.5, 1.5] around the centre covers exactly the three
  // middle cells of the centre row, one unit each.
  const BlurKernel k = MakeMotionKernel(3.0, 0.0, 9);
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 9; ++x) {
      const double expected = (y == 4 && x >= 3 && x <= 5) ? 1.0 / 3.0 : 0.0;
      EXPECT_NEAR(k.at(y, x), expected, 1e-3) << y << "," << x;
    }
  }
}

TEST(MotionKernel, VerticalIsTransposeOfHorizontal) {
  const BlurKernel h = MakeMotionKernel(5.0, 0.0, 9);
  const BlurKernel v = MakeMotionKernel(5.0, M_PI / 2, 9);
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 9; ++x) EXPECT_NEAR(v.at(y, x), h.at(x, y), 1e-12);
  }
}

TEST(MotionKernel, AlwaysNormalized) {
  std::mt19937_64 gen(3);
  for (int i = 0; i < 200; ++i) {
    const int size = 1 + 2 * static_cast<int>(UniformIndex(gen, 8));
    const double length = UniformDouble(gen, 0.0, size);
    const BlurKernel k = MakeMotionKernel(length, UniformDouble(gen, 0.0, 2 * M_PI), size);
    EXPECT_NEAR(KernelSum(k), 1.0, 1e-6);
    for (double w : k.weights()) EXPECT_GE(w, 0.0);
  }
}

TEST(MotionKernel, RejectsBadArguments) {
  EXPECT_THROW(MakeMotionKernel(1.0, 0.0, 8), std::invalid_argument);
  EXPECT_THROW(MakeMotionKernel(-0.5, 0.0, 9), std::invalid_argument);
  EXPECT_THROW(MakeMotionKernel(10.0, 0.0, 9), std::invalid_argument);
}

TEST(BlurKernelType, ValidatesInvariants) {
  EXPECT_THROW(BlurKernel(2, {0.5, 0.5, 0, 0}), std::invalid_argument);
  EXPECT_THROW(BlurKernel(1, {0.9}), std::invalid_argument);
  EXPECT_THROW(BlurKernel(3, {1.5, -0.5, 0, 0, 0, 0, 0, 0, 0}), std::invalid_argument);
  EXPECT_NO_THROW(BlurKernel(1, {1.0}));
}

TEST(ReflectIndex, MirrorsWithoutEdgeRepeat) {
  EXPECT_EQ(ReflectIndex(-1, 5), 1);
  EXPECT_EQ(ReflectIndex(-2, 5), 2);
  EXPECT_EQ(ReflectIndex(5, 5), 3);
  EXPECT_EQ(ReflectIndex(6, 5), 2);
  EXPECT_EQ(ReflectIndex(3, 5), 3);
  EXPECT_EQ(ReflectIndex(-9, 5), 1);
  EXPECT_EQ(ReflectIndex(4, 1), 0);
}

TEST(ApplyBlur, DeltaKernelIsIdentity) {
  const ImageTensor img = RandomImage(1, 17, 23);
  EXPECT_EQ(ApplyBlur(img, BlurKernel::Delta(9)), img);
}

TEST(ApplyBlur, ConstantImageUnchanged) {
  const ImageTensor img(20, 20, 0.37);
  const ImageTensor out = ApplyBlur(img, MakeMotionKernel(6.5, 0.4, 9));
  for (double v : out.pixels()) EXPECT_NEAR(v, 0.37, 1e-12);
}

TEST(ApplyBlur, ImpulseBecomesHorizontalSegment) {
  ImageTensor img(15, 15, 0.0);
  for (int c = 0; c < 3; ++c) img.at(c, 7, 7) = 0.9;
  const BlurKernel k = MakeMotionKernel(3.0, 0.0, 9);
  const ImageTensor out = ApplyBlur(img, k);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < 15; ++y) {
      for (int x = 0; x < 15; ++x) {
        // Hand convolution: out(y,x) = 0.9 * k(4 + y - 7, 4 + x - 7).
        const int ky = 4 + y - 7, kx = 4 + x - 7;
        const double expected =
            (ky >= 0 && ky < 9 && kx >= 0 && kx < 9) ? 0.9 * k.at(ky, kx) : 0.0;
        EXPECT_NEAR(out.at(c, y, x), expected, 1e-12);
      }
    }
    EXPECT_NEAR(out.at(c, 7, 6), 0.3, 1e-3);
    EXPECT_NEAR(out.at(c, 7, 7), 0.3, 1e-3);
    EXPECT_NEAR(out.at(c, 7, 8), 0.3, 1e-3);
    EXPECT_NEAR(out.at(c, 6, 7), 0.0, 1e-3);
  }
}

TEST(ApplyBlur, AsymmetricKernelIsConvolutionNotCorrelation) {
  std::vector<double> w(9, 0.0);
  w[5] = 1.0;  // weight at (1, 2): offset +1 in x
  const BlurKernel k(3, w);
  ImageTensor img(7, 7, 0.0);
  img.at(0, 3, 3) = 1.0;
  const ImageTensor out = Convolve(img, k);
  // Convolution shifts mass by the kernel offset: out(y,x) = img(y, x-1).
  EXPECT_DOUBLE_EQ(out.at(0, 3, 4), 1.0);
  EXPECT_DOUBLE_EQ(out.at(0, 3, 2), 0.0);
}

TEST(ApplyBlur, LinearBeforeClipping) {
  const ImageTensor x = RandomImage(2, 24, 24, 0.0, 0.5);
  const ImageTensor y = RandomImage(3, 24, 24, 0.0, 0.5);
  const double a = 0.6, b = 0.4;
  ImageTensor mix(24, 24);
  for (std::size_t i = 0; i < mix.size(); ++i) {
    mix.pixels()[i] = a * x.pixels()[i] + b * y.pixels()[i];
  }
  const BlurKernel k = MakeMotionKernel(7.0, 1.1, 9);
  const ImageTensor lhs = ApplyBlur(mix, k);
  const ImageTensor bx = ApplyBlur(x, k), by = ApplyBlur(y, k);
  for (int c = 0; c < 3; ++c) {
    for (int yy = 4; yy < 20; ++yy) {
      for (int xx = 4; xx < 20; ++xx) {
        EXPECT_NEAR(lhs.at(c, yy, xx), a * bx.at(c, yy, xx) + b * by.at(c, yy, xx), 1e-12);
      }
    }
  }
}

TEST(ApplyBlur, PreservesEnergyOfInteriorContent) {
  // Random content surrounded by a zero border wider than the kernel radius:
  // nothing reaches the padding, so total mass is conserved exactly.
  ImageTensor img(40, 40, 0.0);
  const ImageTensor patch = RandomImage(4, 20, 20);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < 20; ++y) {
      for (int x = 0; x < 20; ++x) img.at(c, 10 + y, 10 + x) = patch.at(c, y, x);
    }
  }
  const ImageTensor out = ApplyBlur(img, MakeMotionKernel(8.0, 2.2, 9));
  const double before = std::accumulate(img.pixels().begin(), img.pixels().end(), 0.0);
  const double after = std::accumulate(out.pixels().begin(), out.pixels().end(), 0.0);
  EXPECT_NEAR(after / img.size(), before / img.size(), 1e-5);
}

TEST(ApplyBlur, OutputClipped) {
  ImageTensor img = RandomImage(5, 12, 12, 0.0, 1.0);
  const ImageTensor out = ApplyBlur(img, MakeMotionKernel(4.0, 0.3, 5));
  for (double v : out.pixels()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

class SynthesisTest : public ::testing::Test {
 protected:
  void SetUp() override { WriteProceduralSources(dir_.path() / "src", 3, 96, 11); }

  DatasetConfig Config() const {
    DatasetConfig c;
    c.source_dir = dir_.path() / "src";
    c.patch_size = 32;
    c.count = 12;
    c.seed = 5;
    return c;
  }

  TempDir dir_;
};

TEST_F(SynthesisTest, DeterministicAndCounted) {
  const Dataset a = SynthesizeDataset(Config());
  const Dataset b = SynthesizeDataset(Config());
  ASSERT_EQ(a.size(), 12u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.pairs[i].blurry, b.pairs[i].blurry);
    EXPECT_EQ(a.pairs[i].sharp, b.pairs[i].sharp);
    EXPECT_EQ(a.pairs[i].sharp.height(), 32);
    EXPECT_EQ(a.pairs[i].sharp.width(), 32);
  }
  DatasetConfig other = Config();
  other.seed = 6;
  EXPECT_NE(SynthesizeDataset(other).pairs[0].blurry, a.pairs[0].blurry);
}

TEST_F(SynthesisTest, ZeroMotionGivesIdenticalPairs) {
  DatasetConfig c = Config();
  c.kernel_length_min = 0.0;
  c.kernel_length_max = 0.0;
  for (const ImagePair& p : SynthesizeDataset(c).pairs) EXPECT_EQ(p.blurry, p.sharp);
}

TEST_F(SynthesisTest, StoredKernelReproducesBlur) {
  for (const ImagePair& p : SynthesizeDataset(Config()).pairs) {
    ASSERT_TRUE(p.kernel.has_value());
    EXPECT_EQ(ApplyBlur(p.sharp, *p.kernel), p.blurry);
  }
}

TEST_F(SynthesisTest, Errors) {
  DatasetConfig c = Config();
  c.source_dir = dir_.path() / "missing";
  EXPECT_ANY_THROW(SynthesizeDataset(c));
  std::filesystem::create_directories(dir_.path() / "empty");
  c.source_dir = dir_.path() / "empty";
  EXPECT_THROW(SynthesizeDataset(c), std::invalid_argument);
  c = Config();
  c.patch_size = 128;
  EXPECT_THROW(SynthesizeDataset(c), std::invalid_argument);
  c = Config();
  c.kernel_size = 8;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c = Config();
  c.patch_size = 7;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c = Config();
  c.kernel_length_max = 10.0;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
}

TEST_F(SynthesisTest, SaveLoadRoundTrip) {
  const Dataset ds = SynthesizeDataset(Config());
  SaveDataset(dir_.path() / "ds", ds, Config());
  const Dataset loaded = LoadDataset(dir_.path() / "ds");
  ASSERT_EQ(loaded.size(), ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    // 16-bit storage: at most half a quantization step of error.
    for (std::size_t j = 0; j < ds.pairs[i].blurry.size(); ++j) {
      EXPECT_NEAR(loaded.pairs[i].blurry.pixels()[j], ds.pairs[i].blurry.pixels()[j],
                  0.5 / 65535 + 1e-12);
    }
    EXPECT_EQ(loaded.pairs[i].kernel, ds.pairs[i].kernel);
    EXPECT_EQ(loaded.records[i].source, ds.records[i].source);
  }
  // A second save of the loaded dataset is byte-identical.
  SaveDataset(dir_.path() / "ds2", loaded, Config());
  EXPECT_EQ(testing::ReadFileBytes(dir_.path() / "ds" / "blurry" / "000003.png"),
            testing::ReadFileBytes(dir_.path() / "ds2" / "blurry" / "000003.png"));
}

TEST_F(SynthesisTest, HoldoutSplit) {
  const Dataset ds = SynthesizeDataset(Config());
  const auto [train, held] = SplitHoldout(ds, 4);
  EXPECT_EQ(train.size(), 8u);
  EXPECT_EQ(held.size(), 4u);
  EXPECT_EQ(held.pairs[0].blurry, ds.pairs[8].blurry);
  EXPECT_EQ(held.records[0].id, 8u);
}

TEST(PngIo, SixteenBitRoundTrip) {
  TempDir dir;
  const ImageTensor img = RandomImage(9, 13, 19);
  WritePng(dir / "a.png", img);
  const ImageTensor back = ReadPng(dir / "a.png");
  ASSERT_TRUE(back.SameShape(img));
  for (std::size_t i = 0; i < img.size(); ++i) {
    EXPECT_NEAR(back.pixels()[i], img.pixels()[i], 0.5 / 65535 + 1e-12);
  }
  EXPECT_THROW(ReadPng(dir / "missing.png"), std::runtime_error);
}

TEST(BatchIteratorTest, SizesAndDeterminism) {
  const BatchIterator it(10, 3, 42);
  const auto batches = it.Epoch(0);
  ASSERT_EQ(batches.size(), 4u);
  EXPECT_EQ(batches[0].size(), 3u);
  EXPECT_EQ(batches[1].size(), 3u);
  EXPECT_EQ(batches[2].size(), 3u);
  EXPECT_EQ(batches[3].size(), 1u);
  std::set<std::size_t> seen;
  for (const auto& b : batches) seen.insert(b.begin(), b.end());
  EXPECT_EQ(seen.size(), 10u);

  EXPECT_EQ(BatchIterator(10, 3, 42).Epoch(0), batches);
  EXPECT_NE(BatchIterator(10, 3, 43).Epoch(0), batches);
  EXPECT_NE(it.Epoch(1), batches);
  EXPECT_THROW(BatchIterator(0, 3, 1), std::invalid_argument);
  EXPECT_THROW(BatchIterator(5, 0, 1), std::invalid_argument);
}

}  // namespace
}  // namespace reblur
