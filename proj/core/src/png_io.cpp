#include "packscope/png_io.hpp"

#include <png.h>

#include <array>
#include <cstring>

#include "packscope/error.hpp"

namespace packscope {

namespace {

constexpr std::array<std::uint8_t, 8> kSignature{0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
constexpr std::uint8_t kColorTypeGray = 0;

// The simplified libpng API silently expands low bit depths and palettes, so
// the raw IHDR is inspected first.
void require_gray8(std::span<const std::uint8_t> data) {
  if (data.size() < 33 || std::memcmp(data.data(), kSignature.data(), kSignature.size()) != 0 ||
      std::memcmp(data.data() + 12, "IHDR", 4) != 0) {
    throw Error(ErrorCode::FormatError, "not a PNG file");
  }
  const std::uint8_t bit_depth = data[24];
  const std::uint8_t color_type = data[25];
  if (color_type != kColorTypeGray) {
    throw Error(ErrorCode::FormatError, "PNG is not single-channel grayscale (color type " +
                                            std::to_string(color_type) + ")");
  }
  if (bit_depth != 8) {
    throw Error(ErrorCode::FormatError, "PNG bit depth is " + std::to_string(bit_depth) + ", expected 8");
  }
}

}  // namespace

Bytes encode_png(const ByteImage& img) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_GRAY;

  png_alloc_size_t size = 0;
  const auto stride = static_cast<png_int_32>(img.width());
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.pixels().data(), stride, nullptr)) {
    throw Error(ErrorCode::IoError, std::string("PNG encode failed: ") + image.message);
  }
  Bytes out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.pixels().data(), stride, nullptr)) {
    throw Error(ErrorCode::IoError, std::string("PNG encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

namespace {

struct MemorySource {
  std::span<const std::uint8_t> data;
  std::size_t pos = 0;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t length) {
  auto* src = static_cast<MemorySource*>(png_get_io_ptr(png));
  if (length > src->data.size() - src->pos) png_error(png, "truncated PNG stream");
  std::memcpy(out, src->data.data() + src->pos, length);
  src->pos += length;
}

}  // namespace

// Raw rows are read with the low-level API so no gamma or colour conversion
// can touch the stored intensities.
ByteImage decode_png(std::span<const std::uint8_t> data) {
  require_gray8(data);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) throw Error(ErrorCode::IoError, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorCode::IoError, "png_create_info_struct failed");
  }

  MemorySource source{data};
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
  png_uint_32 width = 0;
  png_uint_32 height = 0;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::FormatError, "corrupt PNG stream");
  }
  png_set_read_fn(png, &source, read_from_memory);
  png_read_info(png, info);
  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  pixels.resize(std::size_t{width} * height);
  rows.resize(height);
  for (png_uint_32 r = 0; r < height; ++r) rows[r] = pixels.data() + std::size_t{r} * width;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const std::size_t n = pixels.size();
  return {width, height, std::move(pixels), n};
}

void export_png(const ByteImage& img, const std::filesystem::path& path) {
  write_file_atomic(path, encode_png(img));
}

ByteImage import_png(const std::filesystem::path& path) { return decode_png(read_file(path)); }

}  // namespace packscope
