#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "shortcut/gmm.hpp"

namespace shortcut {

// Raw byte images as parsed from IDX files (or generated in-process). The
// bias recipes consume this type and emit float datasets; there is no path
// from a prepared float dataset back into a recipe, which makes accidental
// double application a type error.
struct RawImageSet {
  int n = 0, h = 0, w = 0, c = 1;
  std::vector<std::uint8_t> pixels;  // n * h * w * c, row-major per image
  std::vector<std::uint8_t> labels;  // digit classes 0-9

  std::size_t image_bytes() const { return std::size_t(h) * w * c; }
};

// IDX parsing per the de-facto format: big-endian magic 0x00000803 with
// (count, rows, cols) for images, 0x00000801 with (count) for labels.
RawImageSet load_idx(const std::string& images_path, const std::string& labels_path);
void write_idx(const std::string& images_path, const std::string& labels_path,
               const RawImageSet& set);

// Deterministic pseudo-digit corpus: one blob template per class plus
// per-sample pixel noise, dark borders so corner patches stay distinctive.
RawImageSet make_synthetic_digits(int n, int h, int w, int classes, std::uint64_t seed);

// Digits 0-4 -> -1, digits 5-9 -> +1.
std::vector<int> binarize_digits(const RawImageSet& set);

enum class PatchCorner { TopLeft, TopRight, BottomLeft, BottomRight };

struct BiasRecipe {
  enum class Kind { Patch, Color };
  Kind kind = Kind::Patch;

  // Patch: a size x size block of constant intensity at a corner.
  // size 0 is the no-patch control (marks are assigned, pixels untouched).
  int patch_size = 3;
  PatchCorner corner = PatchCorner::TopLeft;
  std::uint8_t intensity = 255;

  // Color: grayscale expanded to RGB; marked samples are tinted neg_rgb,
  // unmarked samples pos_rgb. The shortcut label keys on the positive color.
  std::array<std::uint8_t, 3> pos_rgb{0, 0, 255};
  std::array<std::uint8_t, 3> neg_rgb{255, 0, 0};

  double bias_ratio = 0.95;  // in (0, 1)
  std::uint64_t seed = 0;
};

enum class SplitKind { TrainBiased, TestBalanced };

struct PreparedDataset {
  LabeledDataset data;                  // floats in [0, 1]; shortcut labels filled
  std::vector<std::uint8_t> attribute;  // 1 where the biased attribute was applied
  int h = 0, w = 0, c = 1;
};

// Marks round(bias_ratio * n) of the -1 class and round((1-bias_ratio) * n)
// of the +1 class (TrainBiased), or exactly floor(n/2) per class
// (TestBalanced), with the biased attribute; applies the recipe's pixel
// transform to marked samples; assigns shortcut labels g = -1 where the
// attribute is present and g = +1 elsewhere. cluster_ids record the
// (label, attribute) group: 2*(y>0) + attribute.
PreparedDataset apply_recipe(const RawImageSet& set, const std::vector<int>& binary_labels,
                             const BiasRecipe& recipe, SplitKind split);

}  // namespace shortcut
