#include "shortcut/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "shortcut/rng.hpp"

namespace shortcut {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_be_u32(std::istream& in, const std::string& path) {
  std::uint8_t buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  if (!in) throw std::runtime_error("load_idx: truncated header in " + path);
  return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
         (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

void write_be_u32(std::ostream& out, std::uint32_t v) {
  const std::uint8_t buf[4] = {std::uint8_t(v >> 24), std::uint8_t(v >> 16), std::uint8_t(v >> 8),
                               std::uint8_t(v)};
  out.write(reinterpret_cast<const char*>(buf), 4);
}

}  // namespace

RawImageSet load_idx(const std::string& images_path, const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw std::runtime_error("load_idx: cannot open " + images_path);
  const std::uint32_t magic = read_be_u32(img, images_path);
  if (magic != kImageMagic)
    throw std::runtime_error("load_idx: bad image magic in " + images_path + " (got " +
                             std::to_string(magic) + ")");
  RawImageSet set;
  set.n = static_cast<int>(read_be_u32(img, images_path));
  set.h = static_cast<int>(read_be_u32(img, images_path));
  set.w = static_cast<int>(read_be_u32(img, images_path));
  set.c = 1;
  if (set.n < 0 || set.h < 1 || set.w < 1)
    throw std::runtime_error("load_idx: implausible dimensions in " + images_path);
  set.pixels.resize(std::size_t(set.n) * set.image_bytes());
  img.read(reinterpret_cast<char*>(set.pixels.data()),
           static_cast<std::streamsize>(set.pixels.size()));
  if (static_cast<std::size_t>(img.gcount()) != set.pixels.size())
    throw std::runtime_error("load_idx: truncated image data in " + images_path);

  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw std::runtime_error("load_idx: cannot open " + labels_path);
  const std::uint32_t lab_magic = read_be_u32(lab, labels_path);
  if (lab_magic != kLabelMagic)
    throw std::runtime_error("load_idx: bad label magic in " + labels_path + " (got " +
                             std::to_string(lab_magic) + ")");
  const std::uint32_t lab_count = read_be_u32(lab, labels_path);
  if (static_cast<int>(lab_count) != set.n)
    throw std::runtime_error("load_idx: image/label count mismatch (" + std::to_string(set.n) +
                             " images vs " + std::to_string(lab_count) + " labels)");
  set.labels.resize(lab_count);
  lab.read(reinterpret_cast<char*>(set.labels.data()), lab_count);
  if (static_cast<std::uint32_t>(lab.gcount()) != lab_count)
    throw std::runtime_error("load_idx: truncated label data in " + labels_path);
  return set;
}

void write_idx(const std::string& images_path, const std::string& labels_path,
               const RawImageSet& set) {
  if (set.c != 1) throw std::invalid_argument("write_idx: only single-channel sets");
  std::ofstream img(images_path, std::ios::binary);
  if (!img) throw std::runtime_error("write_idx: cannot open " + images_path);
  write_be_u32(img, kImageMagic);
  write_be_u32(img, static_cast<std::uint32_t>(set.n));
  write_be_u32(img, static_cast<std::uint32_t>(set.h));
  write_be_u32(img, static_cast<std::uint32_t>(set.w));
  img.write(reinterpret_cast<const char*>(set.pixels.data()),
            static_cast<std::streamsize>(set.pixels.size()));

  std::ofstream lab(labels_path, std::ios::binary);
  if (!lab) throw std::runtime_error("write_idx: cannot open " + labels_path);
  write_be_u32(lab, kLabelMagic);
  write_be_u32(lab, static_cast<std::uint32_t>(set.n));
  lab.write(reinterpret_cast<const char*>(set.labels.data()),
            static_cast<std::streamsize>(set.labels.size()));
}

RawImageSet make_synthetic_digits(int n, int h, int w, int classes, std::uint64_t seed) {
  if (n < 1 || h < 8 || w < 8) throw std::invalid_argument("make_synthetic_digits: n >= 1, h/w >= 8");
  if (classes < 2 || classes > 10)
    throw std::invalid_argument("make_synthetic_digits: classes in [2, 10]");

  const int margin = std::max(2, h / 8);
  std::vector<std::vector<double>> templates(static_cast<std::size_t>(classes));
  for (int cls = 0; cls < classes; ++cls) {
    SplitMix64 rng(derive_stream(seed, 0xc1a5 + static_cast<std::uint64_t>(cls)));
    auto& t = templates[static_cast<std::size_t>(cls)];
    t.assign(std::size_t(h) * w, 0.0);
    const int bumps = 3 + static_cast<int>(rng.next_below(3));
    for (int b = 0; b < bumps; ++b) {
      const double cy = margin + rng.next_double() * (h - 2 * margin);
      const double cx = margin + rng.next_double() * (w - 2 * margin);
      const double radius = 1.0 + rng.next_double() * (std::min(h, w) / 5.0);
      const double amp = 120.0 + rng.next_double() * 100.0;
      for (int r = margin; r < h - margin; ++r)
        for (int cc = margin; cc < w - margin; ++cc) {
          const double d2 = (r - cy) * (r - cy) + (cc - cx) * (cc - cx);
          t[std::size_t(r) * w + cc] += amp * std::exp(-d2 / (2.0 * radius * radius));
        }
    }
  }

  RawImageSet set;
  set.n = n;
  set.h = h;
  set.w = w;
  set.c = 1;
  set.pixels.resize(std::size_t(n) * set.image_bytes());
  set.labels.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    SplitMix64 rng(derive_stream(seed, 0xd161 + static_cast<std::uint64_t>(i)));
    const int cls = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(classes)));
    set.labels[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(cls);
    const auto& t = templates[static_cast<std::size_t>(cls)];
    for (std::size_t p = 0; p < set.image_bytes(); ++p) {
      const int r = static_cast<int>(p) / w, cc = static_cast<int>(p) % w;
      double v = t[p];
      if (r >= margin && r < h - margin && cc >= margin && cc < w - margin)
        v += 25.0 * rng.next_gaussian();
      set.pixels[std::size_t(i) * set.image_bytes() + p] =
          static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
  }
  return set;
}

std::vector<int> binarize_digits(const RawImageSet& set) {
  std::vector<int> out(set.labels.size());
  for (std::size_t i = 0; i < set.labels.size(); ++i) {
    if (set.labels[i] > 9)
      throw std::invalid_argument("binarize_digits: label out of range 0-9 at row " +
                                  std::to_string(i));
    out[i] = set.labels[i] >= 5 ? +1 : -1;
  }
  return out;
}

namespace {

void validate_recipe(const BiasRecipe& recipe) {
  if (!(recipe.bias_ratio > 0.0 && recipe.bias_ratio < 1.0))
    throw std::invalid_argument("BiasRecipe: bias_ratio must lie in (0, 1)");
  if (recipe.kind == BiasRecipe::Kind::Patch) {
    const int s = recipe.patch_size;
    if (s != 0 && s != 1 && s != 3 && s != 5 && s != 7)
      throw std::invalid_argument("BiasRecipe: patch size must be one of {1, 3, 5, 7} "
                                  "(0 = no-patch control)");
  }
}

void stamp_patch(std::vector<double>& image, int h, int w, const BiasRecipe& recipe) {
  const int s = recipe.patch_size;
  if (s == 0) return;
  if (s > h || s > w) throw std::invalid_argument("BiasRecipe: patch larger than image");
  int r0 = 0, c0 = 0;
  switch (recipe.corner) {
    case PatchCorner::TopLeft: break;
    case PatchCorner::TopRight: c0 = w - s; break;
    case PatchCorner::BottomLeft: r0 = h - s; break;
    case PatchCorner::BottomRight: r0 = h - s; c0 = w - s; break;
  }
  const double value = recipe.intensity / 255.0;
  for (int r = r0; r < r0 + s; ++r)
    for (int c = c0; c < c0 + s; ++c) image[std::size_t(r) * w + c] = value;
}

}  // namespace

PreparedDataset apply_recipe(const RawImageSet& set, const std::vector<int>& binary_labels,
                             const BiasRecipe& recipe, SplitKind split) {
  validate_recipe(recipe);
  if (static_cast<int>(binary_labels.size()) != set.n)
    throw std::invalid_argument("apply_recipe: label count mismatch");
  if (set.c != 1) throw std::invalid_argument("apply_recipe: expects single-channel input");

  std::vector<int> neg_rows, pos_rows;
  for (int i = 0; i < set.n; ++i)
    (binary_labels[static_cast<std::size_t>(i)] < 0 ? neg_rows : pos_rows).push_back(i);
  if (neg_rows.empty() || pos_rows.empty())
    throw std::invalid_argument("apply_recipe: a class has zero samples");

  // Uniform draw without replacement, one stream per class.
  auto mark_class = [&recipe](std::vector<int> rows, std::size_t count, std::uint64_t stream) {
    SplitMix64 rng(derive_stream(recipe.seed, stream));
    seeded_shuffle(rows, rng);
    rows.resize(std::min(count, rows.size()));
    return rows;
  };
  std::size_t mark_neg, mark_pos;
  if (split == SplitKind::TrainBiased) {
    mark_neg = static_cast<std::size_t>(std::lround(recipe.bias_ratio * double(neg_rows.size())));
    mark_pos =
        static_cast<std::size_t>(std::lround((1.0 - recipe.bias_ratio) * double(pos_rows.size())));
  } else {
    mark_neg = neg_rows.size() / 2;
    mark_pos = pos_rows.size() / 2;
  }

  std::vector<std::uint8_t> attribute(static_cast<std::size_t>(set.n), 0);
  for (int i : mark_class(neg_rows, mark_neg, 101)) attribute[static_cast<std::size_t>(i)] = 1;
  for (int i : mark_class(pos_rows, mark_pos, 102)) attribute[static_cast<std::size_t>(i)] = 1;

  const bool color = recipe.kind == BiasRecipe::Kind::Color;
  const int out_c = color ? 3 : 1;
  const Eigen::Index d = static_cast<Eigen::Index>(set.h) * set.w * out_c;

  PreparedDataset out;
  out.h = set.h;
  out.w = set.w;
  out.c = out_c;
  out.attribute = attribute;
  out.data.inputs.resize(set.n, d);
  out.data.labels = binary_labels;
  out.data.cluster_ids.resize(static_cast<std::size_t>(set.n));
  out.data.shortcut_labels.resize(static_cast<std::size_t>(set.n));

  const std::size_t hw = std::size_t(set.h) * set.w;
  std::vector<double> gray(hw);
  for (int i = 0; i < set.n; ++i) {
    const bool marked = attribute[static_cast<std::size_t>(i)] != 0;
    for (std::size_t p = 0; p < hw; ++p) gray[p] = set.pixels[std::size_t(i) * hw + p] / 255.0;

    if (color) {
      const auto& rgb = marked ? recipe.neg_rgb : recipe.pos_rgb;
      for (std::size_t p = 0; p < hw; ++p)
        for (int ch = 0; ch < 3; ++ch)
          out.data.inputs(i, static_cast<Eigen::Index>(p * 3 + std::size_t(ch))) =
              gray[p] * (rgb[static_cast<std::size_t>(ch)] / 255.0);
    } else {
      if (marked) stamp_patch(gray, set.h, set.w, recipe);
      for (std::size_t p = 0; p < hw; ++p)
        out.data.inputs(i, static_cast<Eigen::Index>(p)) = gray[p];
    }

    // A.1-style rule: attribute present -> shortcut label -1, absent -> +1.
    out.data.shortcut_labels[static_cast<std::size_t>(i)] = marked ? -1 : +1;
    out.data.cluster_ids[static_cast<std::size_t>(i)] =
        2 * (binary_labels[static_cast<std::size_t>(i)] > 0 ? 1 : 0) + (marked ? 1 : 0);
  }
  return out;
}

}  // namespace shortcut
