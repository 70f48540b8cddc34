#include "toporec/mask.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "toporec/errors.hpp"

namespace toporec {

std::size_t BinaryMask::foreground_count() const {
  return static_cast<std::size_t>(
      std::count(pixels.begin(), pixels.end(), static_cast<std::uint8_t>(1)));
}

int DatasetManifest::class_index(const std::string& label) const {
  auto it = std::lower_bound(classes.begin(), classes.end(), label);
  if (it == classes.end() || *it != label) return -1;
  return static_cast<int>(it - classes.begin());
}

namespace {

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

int pgm_next_token(std::istream& in, std::string& tok) {
  tok.clear();
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (!std::isspace(c)) break;
  }
  if (c == EOF) return -1;
  do {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  } while (c != EOF && !std::isspace(c) && c != '#');
  if (c == '#') in.unget();
  return 0;
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UnreadableImage(path.string());
  std::string tok;
  if (pgm_next_token(in, tok) != 0 || (tok != "P2" && tok != "P5"))
    throw UnreadableImage(path.string() + " (not a P2/P5 PGM)");
  const bool binary = tok == "P5";
  long dims[3];
  for (long& d : dims) {
    if (pgm_next_token(in, tok) != 0) throw UnreadableImage(path.string() + " (truncated header)");
    try {
      d = std::stol(tok);
    } catch (const std::exception&) {
      throw UnreadableImage(path.string() + " (bad header token '" + tok + "')");
    }
  }
  const long w = dims[0], h = dims[1], maxval = dims[2];
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
    throw UnreadableImage(path.string() + " (unsupported PGM geometry or depth)");
  GrayImage img;
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.pixels.resize(static_cast<std::size_t>(w) * h);
  if (binary) {
    // exactly one whitespace byte separates the header from the raster
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
      throw UnreadableImage(path.string() + " (truncated raster)");
  } else {
    for (auto& px : img.pixels) {
      if (pgm_next_token(in, tok) != 0)
        throw UnreadableImage(path.string() + " (truncated raster)");
      long v;
      try {
        v = std::stol(tok);
      } catch (const std::exception&) {
        throw UnreadableImage(path.string() + " (bad raster token)");
      }
      if (v < 0 || v > maxval) throw UnreadableImage(path.string() + " (sample out of range)");
      px = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

struct PngCloser {
  std::FILE* fp = nullptr;
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngCloser() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    if (fp) std::fclose(fp);
  }
};

GrayImage read_png(const std::filesystem::path& path) {
  PngCloser ctx;
  ctx.fp = std::fopen(path.string().c_str(), "rb");
  if (!ctx.fp) throw UnreadableImage(path.string());
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, ctx.fp) != 8 || png_sig_cmp(sig, 0, 8))
    throw UnreadableImage(path.string() + " (not a PNG)");
  ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!ctx.png) throw UnreadableImage(path.string() + " (libpng init)");
  ctx.info = png_create_info_struct(ctx.png);
  if (!ctx.info) throw UnreadableImage(path.string() + " (libpng init)");
  if (setjmp(png_jmpbuf(ctx.png))) throw UnreadableImage(path.string() + " (corrupt PNG)");
  png_init_io(ctx.png, ctx.fp);
  png_set_sig_bytes(ctx.png, 8);
  png_read_info(ctx.png, ctx.info);

  const png_byte color = png_get_color_type(ctx.png, ctx.info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(ctx.png);
  if (png_get_bit_depth(ctx.png, ctx.info) == 16) png_set_strip_16(ctx.png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(ctx.png, ctx.info) < 8)
    png_set_expand_gray_1_2_4_to_8(ctx.png);
  if (color & PNG_COLOR_MASK_COLOR || color == PNG_COLOR_TYPE_PALETTE)
    png_set_rgb_to_gray_fixed(ctx.png, 1, -1, -1);
  if (color & PNG_COLOR_MASK_ALPHA || png_get_valid(ctx.png, ctx.info, PNG_INFO_tRNS))
    png_set_strip_alpha(ctx.png);
  png_read_update_info(ctx.png, ctx.info);

  GrayImage img;
  img.width = static_cast<int>(png_get_image_width(ctx.png, ctx.info));
  img.height = static_cast<int>(png_get_image_height(ctx.png, ctx.info));
  if (img.width <= 0 || img.height <= 0) throw UnreadableImage(path.string() + " (bad geometry)");
  if (png_get_rowbytes(ctx.png, ctx.info) != static_cast<std::size_t>(img.width))
    throw UnreadableImage(path.string() + " (unexpected row size after gray conversion)");
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  std::vector<png_bytep> rows(img.height);
  for (int r = 0; r < img.height; ++r)
    rows[r] = img.pixels.data() + static_cast<std::size_t>(r) * img.width;
  png_read_image(ctx.png, rows.data());
  return img;
}

bool has_extension(const std::filesystem::path& p, const char* ext) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e == ext;
}

}  // namespace

BinaryMask binarize(const std::vector<std::uint8_t>& gray, int width, int height, int threshold) {
  if (threshold < 0 || threshold > 255) throw Error("threshold must be in [0, 255]");
  if (width <= 0 || height <= 0 ||
      gray.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw ShapeMismatch("grayscale buffer does not match its dimensions");
  BinaryMask mask(width, height);
  for (std::size_t i = 0; i < gray.size(); ++i)
    mask.pixels[i] = gray[i] >= threshold ? 1 : 0;
  return mask;
}

BinaryMask load_mask(const std::filesystem::path& path, int threshold) {
  GrayImage img;
  if (has_extension(path, ".png")) {
    img = read_png(path);
  } else if (has_extension(path, ".pgm")) {
    img = read_pgm(path);
  } else {
    // sniff: PNG signature, else try PGM
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw UnreadableImage(path.string());
    char sig[2] = {0, 0};
    probe.read(sig, 2);
    probe.close();
    img = (sig[0] == '\x89' && sig[1] == 'P') ? read_png(path) : read_pgm(path);
  }
  BinaryMask mask = binarize(img.pixels, img.width, img.height, threshold);
  mask.source_id = path.filename().string();
  if (mask.foreground_count() == 0) throw EmptyMask(path.string());
  return mask;
}

namespace {

// endpoint-pinned nearest neighbor: 0 -> 0 and out-1 -> in-1
int nn_source(int i, int in, int out) {
  if (out == 1 || in == 1) return 0;
  const double x = static_cast<double>(i) * (in - 1) / (out - 1);
  int s = static_cast<int>(std::floor(x + 0.5));
  return std::min(s, in - 1);
}

}  // namespace

BinaryMask normalize_mask(const BinaryMask& mask, int side) {
  if (side < 2) throw Error("normalize_mask: side must be >= 2");
  int c0 = mask.width, c1 = -1, r0 = mask.height, r1 = -1;
  for (int r = 0; r < mask.height; ++r)
    for (int c = 0; c < mask.width; ++c)
      if (mask.at(c, r)) {
        c0 = std::min(c0, c);
        c1 = std::max(c1, c);
        r0 = std::min(r0, r);
        r1 = std::max(r1, r);
      }
  if (c1 < 0) throw EmptyMask("normalize_mask input (" + mask.source_id + ")");

  const int bw = c1 - c0 + 1;
  const int bh = r1 - r0 + 1;

  // scale the box so its longer axis spans `side`, then center-pad the
  // shorter axis. Padding after the resize keeps the operation exactly
  // idempotent: a second pass crops the same box, the long-axis resize is
  // the identity, and the pad split is recomputed from the same width.
  const int longer = std::max(bw, bh);
  const int out_w = bw >= bh ? side : std::max(1, static_cast<int>(std::floor(
                                          static_cast<double>(bw) * side / longer + 0.5)));
  const int out_h = bh >= bw ? side : std::max(1, static_cast<int>(std::floor(
                                          static_cast<double>(bh) * side / longer + 0.5)));

  BinaryMask out(side, side);
  out.label = mask.label;
  out.source_id = mask.source_id;
  const int pad_c = (side - out_w) / 2;
  const int pad_r = (side - out_h) / 2;
  std::vector<int> src_col(out_w);
  for (int j = 0; j < out_w; ++j) src_col[j] = c0 + nn_source(j, bw, out_w);
  for (int i = 0; i < out_h; ++i) {
    const int sr = r0 + nn_source(i, bh, out_h);
    for (int j = 0; j < out_w; ++j) out.at(j + pad_c, i + pad_r) = mask.at(src_col[j], sr);
  }
  if (out.foreground_count() == 0)
    throw EmptyMask("normalize_mask lost all foreground while downsampling (" + mask.source_id +
                    ")");
  return out;
}

BinaryMask rotate90(const BinaryMask& mask) {
  BinaryMask out(mask.height, mask.width);
  out.label = mask.label;
  out.source_id = mask.source_id;
  // out[i][j] = in[j][W-1-i]
  for (int i = 0; i < out.height; ++i)
    for (int j = 0; j < out.width; ++j) out.at(j, i) = mask.at(mask.width - 1 - i, j);
  return out;
}

std::array<BinaryMask, 4> augment_rotations(const BinaryMask& mask) {
  if (!mask.is_square())
    throw NonSquareInput("augment_rotations requires a square mask (" + mask.source_id + ")");
  std::array<BinaryMask, 4> out;
  out[0] = mask;
  for (int i = 1; i < 4; ++i) out[i] = rotate90(out[i - 1]);
  return out;
}

namespace {

DatasetManifest load_manifest_csv(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw EmptyDataset(csv.string());
  DatasetManifest m;
  std::string line;
  bool header = true;
  const auto base = csv.parent_path();
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line == "path,label") continue;  // header optional but recommended
    }
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) throw Error("manifest CSV row without label: " + line);
    std::filesystem::path p = line.substr(0, comma);
    if (p.is_relative()) p = base / p;
    m.entries.push_back({p, line.substr(comma + 1)});
  }
  if (m.entries.empty()) throw EmptyDataset(csv.string());
  std::set<std::string> classes;
  std::set<std::string> seen_paths;
  for (const auto& e : m.entries) {
    classes.insert(e.label);
    if (!seen_paths.insert(e.path.string()).second)
      throw Error("duplicate path in manifest: " + e.path.string());
  }
  m.classes.assign(classes.begin(), classes.end());
  return m;
}

bool is_image_file(const std::filesystem::path& p) {
  return has_extension(p, ".png") || has_extension(p, ".pgm");
}

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (fs::is_regular_file(root)) return load_manifest_csv(root);
  if (!fs::is_directory(root)) throw EmptyDataset(root.string() + " is not a directory");

  std::vector<std::string> classes;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) classes.push_back(entry.path().filename().string());
  std::sort(classes.begin(), classes.end());
  if (classes.empty()) throw EmptyDataset(root.string());

  DatasetManifest m;
  m.classes = classes;
  for (const auto& cls : classes) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(root / cls))
      if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ClassWithNoImages(cls);
    for (auto& f : files) m.entries.push_back({f, cls});
  }
  return m;
}

void write_pgm(const std::filesystem::path& path, const BinaryMask& mask) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "P5\n" << mask.width << " " << mask.height << "\n255\n";
  std::vector<std::uint8_t> raster(mask.pixels.size());
  for (std::size_t i = 0; i < raster.size(); ++i) raster[i] = mask.pixels[i] ? 255 : 0;
  out.write(reinterpret_cast<const char*>(raster.data()),
            static_cast<std::streamsize>(raster.size()));
}

}  // namespace toporec
