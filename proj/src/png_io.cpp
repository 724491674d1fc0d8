#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include <png.h>

#include "fracfilter/errors.hpp"
#include "fracfilter/io.hpp"

namespace fracfilter::io {

namespace {

constexpr std::array<unsigned char, 8> kPngSignature{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

std::string describe_format(png_uint_32 format) {
    std::string name = (format & PNG_FORMAT_FLAG_COLOR) ? "RGB" : "gray";
    if (format & PNG_FORMAT_FLAG_ALPHA) name += "+alpha";
    if (format & PNG_FORMAT_FLAG_COLORMAP) name += " palette";
    name += (format & PNG_FORMAT_FLAG_LINEAR) ? " 16-bit" : " 8-bit";
    return name;
}

struct ImageGuard {
    png_image* image;
    ~ImageGuard() { png_image_free(image); }
};

} // namespace

std::uint8_t to_byte(double v) {
    const double c = std::clamp(std::isfinite(v) ? v : 0.0, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(c * 255.0));
}

LoadedImage read_png(const std::filesystem::path& path) {
    {
        std::ifstream probe(path, std::ios::binary);
        if (!probe) throw IoError("cannot open '" + path.string() + "' for reading");
        std::array<unsigned char, 8> head{};
        probe.read(reinterpret_cast<char*>(head.data()), head.size());
        if (probe.gcount() != 8 || head != kPngSignature) {
            const auto ext = path.extension().string();
            throw IoError("unsupported image format '" + (ext.empty() ? std::string("unknown") : ext) + "' in '" +
                          path.string() + "': only 8-bit grayscale or RGB PNG is accepted");
        }
    }

    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    ImageGuard guard{&image};
    if (!png_image_begin_read_from_file(&image, path.string().c_str()))
        throw IoError("cannot decode PNG '" + path.string() + "': " + image.message);

    const png_uint_32 natural = image.format;
    if (natural & (PNG_FORMAT_FLAG_ALPHA | PNG_FORMAT_FLAG_LINEAR | PNG_FORMAT_FLAG_COLORMAP))
        throw IoError("unsupported image format '" + describe_format(natural) + " PNG' in '" + path.string() +
                      "': only 8-bit grayscale or RGB PNG is accepted");

    const bool color = (natural & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    const int channels = color ? 3 : 1;
    if (image.width < 2 || image.height < 2)
        throw IoError("image '" + path.string() + "' is smaller than 2x2");
    std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr))
        throw IoError("cannot decode PNG '" + path.string() + "': " + image.message);

    const Eigen::Index rows = image.height, cols = image.width;
    LoadedImage out;
    out.channels = channels;
    std::array<ImagePlane<double>*, 3> planes{&out.image.r, &out.image.g, &out.image.b};
    for (auto* p : planes) p->resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            const png_byte* px = buffer.data() + (r * cols + c) * channels;
            for (int ch = 0; ch < 3; ++ch) (*planes[ch])(r, c) = px[color ? ch : 0] / 255.0;
        }
    }
    return out;
}

void write_png(const std::filesystem::path& path, const RgbImage<double>& img, int channels) {
    validate(img);
    if (channels != 1 && channels != 3) throw InvalidArgument("write_png: channels must be 1 or 3");
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.r.cols());
    image.height = static_cast<png_uint_32>(img.r.rows());
    image.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
    const std::array<const ImagePlane<double>*, 3> planes{&img.r, &img.g, &img.b};
    for (Eigen::Index r = 0; r < img.r.rows(); ++r)
        for (Eigen::Index c = 0; c < img.r.cols(); ++c)
            for (int ch = 0; ch < channels; ++ch)
                buffer[(r * img.r.cols() + c) * channels + ch] = to_byte((*planes[ch])(r, c));
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, buffer.data(), 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw IoError("cannot write PNG '" + path.string() + "': " + msg);
    }
}

} // namespace fracfilter::io
