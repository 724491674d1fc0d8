#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fracfilter/entropy.hpp"
#include "fracfilter/spectral.hpp"

namespace fracfilter::io {

/// Shortest decimal text that reads back to exactly the same double.
std::string format_number(double value);

double parse_number(const std::string& text, const std::string& what);

// Spectrum CSV: header `nu,intensity`, one sample per line, `#` starts a comment line.

Signal1D<double> read_spectrum_csv(std::istream& in, const std::string& source = "<stream>");
Signal1D<double> read_spectrum_csv(const std::filesystem::path& path);
void write_spectrum_csv(std::ostream& out, const Signal1D<double>& signal);
void write_spectrum_csv(const std::filesystem::path& path, const Signal1D<double>& signal);

/// Header `alpha,lambda,H`, one row per cell, then `best,<alpha>,<lambda>,<H>`.
void write_surface_csv(std::ostream& out, const EntropySurface<double>& surface);
void write_surface_csv(const std::filesystem::path& path, const EntropySurface<double>& surface);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// `key = value` lines; blank lines and lines starting with `#` or `;` are ignored.
KeyValues read_key_values(std::istream& in, const std::string& source = "<stream>");
KeyValues read_key_values(const std::filesystem::path& path);

/// Sidecar for an output file: same stem, `.meta` extension.
std::filesystem::path sidecar_path(const std::filesystem::path& output);
void write_metadata(const std::filesystem::path& output, const KeyValues& entries);

/// Writes `text` to `path`, naming the path on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

// 8-bit PNG, grayscale or RGB. Intensities are scaled to [0, 1] on read; on
// write they are clamped to [0, 1] and rounded to 0..255. Grayscale input is
// replicated into all three planes and written back as grayscale.

struct LoadedImage {
    RgbImage<double> image;
    int channels{3};  // 1 = grayscale, 3 = RGB
};

LoadedImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const RgbImage<double>& image, int channels = 3);

std::uint8_t to_byte(double v);

} // namespace fracfilter::io
