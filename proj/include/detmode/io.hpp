#pragma once

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mode.hpp"

namespace detmode {

/// CSV layout: header "x,y,re,im", one row per cell, row-major
/// (x fastest), full double precision.
inline void write_mode_csv(const SampledMode& mode, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw error("write_mode_csv: cannot open " + path.string());
    out << "x,y,re,im\n";
    out.precision(17);
    for (int iy = 0; iy < mode.grid.ny; ++iy)
        for (int ix = 0; ix < mode.grid.nx; ++ix) {
            const cplx a = mode.at(ix, iy);
            out << mode.grid.x_center(ix) << ',' << mode.grid.y_center(iy) << ','
                << a.real() << ',' << a.imag() << '\n';
        }
    if (!out)
        throw error("write_mode_csv: write failed for " + path.string());
}

/// Reads a mode written by write_mode_csv back onto `grid`. The stored
/// coordinates must match the grid's cell centres.
inline SampledMode read_mode_csv(const std::filesystem::path& path, const Grid& grid) {
    std::ifstream in(path);
    if (!in)
        throw error("read_mode_csv: cannot open " + path.string());
    std::string line;
    Eigen::VectorXcd amp(grid.cells());
    int row = 0;
    const double coord_tol = 1e-9 * std::max({1.0, grid.width_x, grid.width_y});
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (line.find_first_not_of("0123456789+-.eE, \t\r") != std::string::npos)
            continue; // header or comment
        std::istringstream ss(line);
        double x, y, re, im;
        char c1, c2, c3;
        if (!(ss >> x >> c1 >> y >> c2 >> re >> c3 >> im) ||
            c1 != ',' || c2 != ',' || c3 != ',')
            throw error("read_mode_csv: malformed row " + std::to_string(row) +
                        " in " + path.string());
        if (row >= grid.cells())
            throw error("read_mode_csv: more rows than grid cells in " + path.string());
        const int ix = row % grid.nx;
        const int iy = row / grid.nx;
        if (std::abs(x - grid.x_center(ix)) > coord_tol ||
            std::abs(y - grid.y_center(iy)) > coord_tol)
            throw error("read_mode_csv: row " + std::to_string(row) +
                        " coordinates do not match the grid in " + path.string());
        amp[grid.index(ix, iy)] = cplx(re, im);
        ++row;
    }
    if (row != grid.cells())
        throw error("read_mode_csv: expected " + std::to_string(grid.cells()) +
                    " rows, got " + std::to_string(row) + " in " + path.string());
    return SampledMode(grid, std::move(amp));
}

/// 8-bit binary PGM of the intensity |amp|^2, scaled so the brightest
/// cell maps to 255. Image rows run top-down, so the first row is the
/// largest y.
inline void write_mode_pgm(const SampledMode& mode, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw error("write_mode_pgm: cannot open " + path.string());
    double peak = 0.0;
    for (int i = 0; i < mode.amp.size(); ++i)
        peak = std::max(peak, std::norm(mode.amp[i]));
    out << "P5\n" << mode.grid.nx << ' ' << mode.grid.ny << "\n255\n";
    for (int iy = mode.grid.ny - 1; iy >= 0; --iy)
        for (int ix = 0; ix < mode.grid.nx; ++ix) {
            double v = peak > 0.0 ? std::norm(mode.at(ix, iy)) / peak : 0.0;
            out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * v))));
        }
    if (!out)
        throw error("write_mode_pgm: write failed for " + path.string());
}

struct LabelImage {
    int nx = 0;
    int ny = 0;
    /// Row-major with x fastest and iy increasing upward, i.e. already
    /// flipped from the top-down PGM row order.
    std::vector<int> labels;
};

namespace detail {

inline int pgm_next_int(std::istream& in, const std::string& path) {
    // Skips whitespace and '#' comments, as the format allows in headers.
    for (;;) {
        int c = in.peek();
        if (c == '#') {
            std::string dummy;
            std::getline(in, dummy);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int value;
    if (!(in >> value))
        throw error("read_label_pgm: truncated header in " + path);
    return value;
}

} // namespace detail

/// Reads a P5 or P2 PGM whose pixel values are region labels.
inline LabelImage read_label_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw error("read_label_pgm: cannot open " + path.string());
    std::string magic;
    in >> magic;
    if (magic != "P5" && magic != "P2")
        throw error("read_label_pgm: " + path.string() + " is not a P2/P5 PGM");
    LabelImage img;
    img.nx = detail::pgm_next_int(in, path.string());
    img.ny = detail::pgm_next_int(in, path.string());
    const int maxval = detail::pgm_next_int(in, path.string());
    if (img.nx <= 0 || img.ny <= 0 || maxval <= 0 || maxval > 65535)
        throw error("read_label_pgm: bad header in " + path.string());
    img.labels.assign(static_cast<size_t>(img.nx) * img.ny, 0);
    auto store = [&](int row, int col, int v) {
        const int iy = img.ny - 1 - row; // top image row is largest y
        img.labels[static_cast<size_t>(iy) * img.nx + col] = v;
    };
    if (magic == "P2") {
        for (int row = 0; row < img.ny; ++row)
            for (int col = 0; col < img.nx; ++col)
                store(row, col, detail::pgm_next_int(in, path.string()));
    } else {
        in.get(); // single whitespace after maxval
        const int bytes = maxval > 255 ? 2 : 1;
        for (int row = 0; row < img.ny; ++row)
            for (int col = 0; col < img.nx; ++col) {
                int v = 0;
                for (int b = 0; b < bytes; ++b) {
                    int c = in.get();
                    if (c == EOF)
                        throw error("read_label_pgm: truncated data in " + path.string());
                    v = (v << 8) | c;
                }
                store(row, col, v);
            }
    }
    return img;
}

/// Writes region labels as a PGM readable by read_label_pgm. Labels must
/// lie in [0, 255].
inline void write_label_pgm(const LabelImage& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw error("write_label_pgm: cannot open " + path.string());
    int maxval = 1;
    for (int v : img.labels) {
        if (v < 0 || v > 255)
            throw error("write_label_pgm: label out of [0,255]");
        maxval = std::max(maxval, v);
    }
    out << "P5\n" << img.nx << ' ' << img.ny << "\n" << maxval << "\n";
    for (int row = 0; row < img.ny; ++row) {
        const int iy = img.ny - 1 - row;
        for (int col = 0; col < img.nx; ++col)
            out.put(static_cast<char>(
                static_cast<unsigned char>(img.labels[static_cast<size_t>(iy) * img.nx + col])));
    }
    if (!out)
        throw error("write_label_pgm: write failed for " + path.string());
}

} // namespace detmode
