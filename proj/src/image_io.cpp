#include <png.h>

#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>

#include "smc/error.hpp"
#include "smc/imaging.hpp"

namespace smc {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string token;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  return token;
}

}  // namespace

Raster read_png(const std::filesystem::path& path) {
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "rb"));
  if (!file) fail(ErrorCode::IoError, "cannot open " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail(ErrorCode::IoError, "libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(ErrorCode::IoError, "libpng initialization failed");
  }

  Raster raster;
  volatile bool ok = false;
  if (setjmp(png_jmpbuf(png)) == 0) {
    png_init_io(png, file.get());
    png_read_png(png, info, PNG_TRANSFORM_EXPAND, nullptr);
    raster.width = static_cast<int>(png_get_image_width(png, info));
    raster.height = static_cast<int>(png_get_image_height(png, info));
    raster.channels = png_get_channels(png, info);
    const int depth = png_get_bit_depth(png, info);
    raster.max_value = depth == 16 ? 65535u : 255u;
    png_bytepp rows = png_get_rows(png, info);
    const auto row_samples =
        static_cast<std::size_t>(raster.width) * static_cast<std::size_t>(raster.channels);
    raster.samples.resize(row_samples * static_cast<std::size_t>(raster.height));
    for (int y = 0; y < raster.height; ++y) {
      const png_bytep row = rows[y];
      std::uint16_t* dst = raster.samples.data() + static_cast<std::size_t>(y) * row_samples;
      for (std::size_t i = 0; i < row_samples; ++i) {
        dst[i] = depth == 16 ? static_cast<std::uint16_t>((row[2 * i] << 8) | row[2 * i + 1])
                             : row[i];
      }
    }
    ok = true;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (!ok) fail(ErrorCode::IoError, "failed to decode PNG " + path.string());
  return raster;
}

Raster read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  const std::string magic = pgm_token(in);
  if (magic != "P2" && magic != "P5") {
    fail(ErrorCode::IoError, path.string() + " is not a PGM file");
  }
  Raster raster;
  try {
    raster.width = std::stoi(pgm_token(in));
    raster.height = std::stoi(pgm_token(in));
    raster.max_value = static_cast<std::uint32_t>(std::stoul(pgm_token(in)));
  } catch (const std::exception&) {
    fail(ErrorCode::IoError, "malformed PGM header in " + path.string());
  }
  if (raster.width < 1 || raster.height < 1 || raster.max_value < 1 ||
      raster.max_value > 65535) {
    fail(ErrorCode::IoError, "unsupported PGM header in " + path.string());
  }
  raster.channels = 1;
  const std::size_t count =
      static_cast<std::size_t>(raster.width) * static_cast<std::size_t>(raster.height);
  raster.samples.resize(count);
  if (magic == "P5") {
    const bool wide = raster.max_value > 255;
    std::vector<unsigned char> bytes(count * (wide ? 2 : 1));
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
      fail(ErrorCode::IoError, "truncated PGM data in " + path.string());
    }
    for (std::size_t i = 0; i < count; ++i) {
      raster.samples[i] = wide ? static_cast<std::uint16_t>((bytes[2 * i] << 8) | bytes[2 * i + 1])
                               : bytes[i];
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      unsigned v;
      if (!(in >> v)) fail(ErrorCode::IoError, "truncated PGM data in " + path.string());
      raster.samples[i] = static_cast<std::uint16_t>(v);
    }
  }
  for (std::uint16_t s : raster.samples) {
    if (s > raster.max_value) fail(ErrorCode::IoError, "PGM sample exceeds maxval");
  }
  return raster;
}

Raster read_raster(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".pgm") return read_pgm(path);
  fail(ErrorCode::IoError, "unsupported image format: " + path.string());
}

GrayImage read_gray(const std::filesystem::path& path) { return to_grayscale(read_raster(path)); }

void write_pgm(const std::filesystem::path& path, const GrayImage& img, std::uint32_t max_value) {
  require(max_value >= 1 && max_value <= 65535, "PGM maxval must be in [1, 65535]");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << "P5\n" << img.width() << ' ' << img.height() << '\n' << max_value << '\n';
  const bool wide = max_value > 255;
  std::vector<unsigned char> bytes;
  bytes.reserve(img.data().size() * (wide ? 2 : 1));
  for (double v : img.data()) {
    const auto q = static_cast<std::uint32_t>(std::lround(v * max_value));
    if (wide) bytes.push_back(static_cast<unsigned char>(q >> 8));
    bytes.push_back(static_cast<unsigned char>(q & 0xFF));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::IoError, "failed writing " + path.string());
}

}  // namespace smc
