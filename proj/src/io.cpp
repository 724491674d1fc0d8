#include "fracfilter/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "fracfilter/errors.hpp"

namespace fracfilter::io {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

bool parse_double(std::string_view text, double& value) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    const char* begin = t.data();
    if (*begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, t.data() + t.size(), value);
    return ec == std::errc() && ptr == t.data() + t.size();
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

} // namespace

std::string format_number(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) throw NumericalError("format_number: conversion failed");
    return std::string(buf.data(), ptr);
}

double parse_number(const std::string& text, const std::string& what) {
    double v = 0;
    if (!parse_double(text, v)) throw InvalidArgument(what + ": not a number: '" + text + "'");
    return v;
}

Signal1D<double> read_spectrum_csv(std::istream& in, const std::string& source) {
    std::vector<double> nu, intensity;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (!have_header) {
            if (t != "nu,intensity") throw ParseError(source, line_no, "expected header 'nu,intensity', got '" + t + "'");
            have_header = true;
            continue;
        }
        const auto comma = t.find(',');
        if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos)
            throw ParseError(source, line_no, "expected two comma-separated fields");
        double x = 0, y = 0;
        if (!parse_double(std::string_view(t).substr(0, comma), x) ||
            !parse_double(std::string_view(t).substr(comma + 1), y))
            throw ParseError(source, line_no, "malformed number in '" + t + "'");
        if (!std::isfinite(x) || !std::isfinite(y)) throw ParseError(source, line_no, "non-finite value");
        nu.push_back(x);
        intensity.push_back(y);
    }
    if (in.bad()) throw IoError(source + ": read failure");
    if (!have_header) throw ParseError(source, line_no, "missing header 'nu,intensity'");
    Signal1D<double> s;
    s.abscissa = Eigen::Map<const Vector<double>>(nu.data(), static_cast<Eigen::Index>(nu.size()));
    s.intensity = Eigen::Map<const Vector<double>>(intensity.data(), static_cast<Eigen::Index>(intensity.size()));
    try {
        validate(s);
    } catch (const InvalidArgument& e) {
        throw ParseError(source, line_no, e.what());
    }
    return s;
}

Signal1D<double> read_spectrum_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return read_spectrum_csv(in, path.string());
}

void write_spectrum_csv(std::ostream& out, const Signal1D<double>& signal) {
    out << "nu,intensity\n";
    for (Eigen::Index i = 0; i < signal.size(); ++i)
        out << format_number(signal.abscissa[i]) << ',' << format_number(signal.intensity[i]) << '\n';
}

void write_spectrum_csv(const std::filesystem::path& path, const Signal1D<double>& signal) {
    auto out = open_for_write(path);
    write_spectrum_csv(out, signal);
    finish_write(out, path);
}

void write_surface_csv(std::ostream& out, const EntropySurface<double>& surface) {
    out << "alpha,lambda,H\n";
    for (const auto& e : surface.entries)
        out << format_number(e.alpha) << ',' << format_number(e.lambda) << ',' << format_number(e.entropy) << '\n';
    const auto& b = surface.best();
    out << "best," << format_number(b.alpha) << ',' << format_number(b.lambda) << ',' << format_number(b.entropy)
        << '\n';
}

void write_surface_csv(const std::filesystem::path& path, const EntropySurface<double>& surface) {
    auto out = open_for_write(path);
    write_surface_csv(out, surface);
    finish_write(out, path);
}

KeyValues read_key_values(std::istream& in, const std::string& source) {
    KeyValues kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#' || t.front() == ';') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError(source, line_no, "expected 'key = value'");
        std::string key = trim(std::string_view(t).substr(0, eq));
        std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key.empty()) throw ParseError(source, line_no, "empty key");
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        kv.emplace_back(std::move(key), std::move(value));
    }
    if (in.bad()) throw IoError(source + ": read failure");
    return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config '" + path.string() + "'");
    return read_key_values(in, path.string());
}

std::filesystem::path sidecar_path(const std::filesystem::path& output) {
    auto p = output;
    p.replace_extension(".meta");
    return p;
}

void write_metadata(const std::filesystem::path& output, const KeyValues& entries) {
    std::ostringstream text;
    text << "# run metadata for " << output.filename().string() << '\n';
    for (const auto& [k, v] : entries) text << k << " = " << v << '\n';
    write_text_file(sidecar_path(output), text.str());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    auto out = open_for_write(path);
    out << text;
    finish_write(out, path);
}

} // namespace fracfilter::io
