// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmp/error.hpp"
#include "gmp/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

namespace gmp {

namespace {

std::ofstream open_binary(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(ErrorCode::IoError, "cannot write " + path.string());
    return os;
}

unsigned char to_byte(double c) {
    return static_cast<unsigned char>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0));
}

} // namespace

void write_ppm(const std::filesystem::path& path, const RenderOutput& image) {
    auto os = open_binary(path);
    os << "P6\n" << image.width << " " << image.height << "\n255\n";
    std::string bytes;
    bytes.reserve(image.color.size() * 3);
    for (const Vec3& c : image.color) {
        bytes.push_back(static_cast<char>(to_byte(c.x())));
        bytes.push_back(static_cast<char>(to_byte(c.y())));
        bytes.push_back(static_cast<char>(to_byte(c.z())));
    }
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void write_label_pgm(const std::filesystem::path& path, const RenderOutput& image) {
    const int max_label = image.instance_map.empty() ? -1 : *std::max_element(image.instance_map.begin(), image.instance_map.end());
    if (max_label + 1 > 65535) fail(ErrorCode::InvalidArgument, "instance label too large for PGM");
    const bool wide = max_label + 1 > 255;
    auto os = open_binary(path);
    os << "P5\n" << image.width << " " << image.height << "\n" << (wide ? 65535 : 255) << "\n";
    std::string bytes;
    for (int label : image.instance_map) {
        const int v = label + 1;
        if (wide) bytes.push_back(static_cast<char>((v >> 8) & 0xff));
        bytes.push_back(static_cast<char>(v & 0xff));
    }
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

LabelImage read_label_pgm(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(ErrorCode::IoError, "cannot read " + path.string());
    std::string magic;
    int maxval = 0;
    LabelImage img;
    is >> magic >> img.width >> img.height >> maxval;
    if (magic != "P5" || img.width < 1 || img.height < 1 || maxval < 1 || maxval > 65535) {
        fail(ErrorCode::ParseError, path.string() + ": not a binary PGM");
    }
    is.get();
    const bool wide = maxval > 255;
    const auto n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
    std::string bytes(n * (wide ? 2 : 1), '\0');
    if (!is.read(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
        fail(ErrorCode::ParseError, path.string() + ": truncated PGM");
    }
    img.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int v = wide ? (static_cast<unsigned char>(bytes[2 * i]) << 8) | static_cast<unsigned char>(bytes[2 * i + 1])
                           : static_cast<unsigned char>(bytes[i]);
        img.labels[i] = v - 1;
    }
    return img;
}

} // namespace gmp
