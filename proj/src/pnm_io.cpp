#include "gglr/pnm_io.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace gglr {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& why) {
    throw std::runtime_error(path + ": " + why);
}

// Next whitespace-delimited token, skipping '#' comment lines.
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

int parse_positive(std::istream& in, const std::string& path, const char* what) {
    const std::string tok = next_token(in);
    if (tok.empty()) fail(path, std::string("missing ") + what);
    try {
        const int v = std::stoi(tok);
        if (v <= 0) fail(path, std::string("non-positive ") + what);
        return v;
    } catch (const std::logic_error&) {
        fail(path, std::string("malformed ") + what);
    }
}

}  // namespace

ImageGrid read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    if (next_token(in) != "P5") fail(path, "not a binary PGM (P5)");
    const int cols = parse_positive(in, path, "width");
    const int rows = parse_positive(in, path, "height");
    const int maxval = parse_positive(in, path, "maxval");
    if (maxval > 255) fail(path, "unsupported maxval > 255");
    // Exactly one whitespace byte separates the header from the raster.
    std::vector<std::uint8_t> raster(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    in.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
    if (in.gcount() != static_cast<std::streamsize>(raster.size())) fail(path, "truncated raster");

    ImageGrid img = ImageGrid::zero(rows, cols);
    for (int k = 0; k < rows; ++k) {
        for (int l = 0; l < cols; ++l) {
            img.at(k, l) = static_cast<double>(raster[static_cast<std::size_t>(k) * cols + l]) / maxval;
        }
    }
    return img;
}

void write_pgm(const std::string& path, const ImageGrid& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    out << "P5\n" << img.cols << " " << img.rows << "\n255\n";
    std::vector<std::uint8_t> raster(img.values.size());
    for (int k = 0; k < img.rows; ++k) {
        for (int l = 0; l < img.cols; ++l) {
            double v = img.at(k, l);
            v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
            raster[static_cast<std::size_t>(k) * img.cols + l] =
                static_cast<std::uint8_t>(std::lround(v * 255.0));
        }
    }
    out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
    if (!out) fail(path, "write failed");
}

PixelMask read_pbm_mask(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    if (next_token(in) != "P4") fail(path, "not a binary PBM (P4)");
    const int cols = parse_positive(in, path, "width");
    const int rows = parse_positive(in, path, "height");
    const std::size_t row_bytes = (static_cast<std::size_t>(cols) + 7) / 8;
    std::vector<std::uint8_t> raster(row_bytes * static_cast<std::size_t>(rows));
    in.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
    if (in.gcount() != static_cast<std::streamsize>(raster.size())) fail(path, "truncated raster");

    PixelMask mask = PixelMask::all_known(rows, cols);
    for (int k = 0; k < rows; ++k) {
        for (int l = 0; l < cols; ++l) {
            const std::uint8_t byte = raster[static_cast<std::size_t>(k) * row_bytes + static_cast<std::size_t>(l) / 8];
            const bool missing = (byte >> (7 - l % 8)) & 1;
            if (missing) mask.known[vec_index(rows, k, l)] = 0;
        }
    }
    return mask;
}

void write_pbm_mask(const std::string& path, const PixelMask& mask) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    out << "P4\n" << mask.cols << " " << mask.rows << "\n";
    const std::size_t row_bytes = (static_cast<std::size_t>(mask.cols) + 7) / 8;
    std::vector<std::uint8_t> raster(row_bytes * static_cast<std::size_t>(mask.rows), 0);
    for (int k = 0; k < mask.rows; ++k) {
        for (int l = 0; l < mask.cols; ++l) {
            if (!mask.is_known(k, l)) {
                raster[static_cast<std::size_t>(k) * row_bytes + static_cast<std::size_t>(l) / 8] |=
                    static_cast<std::uint8_t>(1u << (7 - l % 8));
            }
        }
    }
    out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
    if (!out) fail(path, "write failed");
}

}  // namespace gglr
