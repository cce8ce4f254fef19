#include "sgdtheta/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace sgdtheta {

namespace {

static_assert(std::endian::native == std::endian::little,
              "on-disk formats are little-endian; add byte swapping for this platform");

template <typename T>
void write_raw(std::ofstream& out, const T* data, std::size_t count) {
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(T)));
}

template <typename T>
void read_raw(std::ifstream& in, T* data, std::size_t count) {
    in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(T)));
    if (!in) throw IoError("unexpected end of file");
}

}  // namespace

void write_sparse_binary(const std::string& path, const SparseRowBlock& block) {
    block.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_sparse_binary: cannot open " + path);
    const std::uint64_t header[3] = {block.rows, block.cols, block.nnz()};
    write_raw(out, header, 3);
    write_raw(out, block.offsets.data(), block.offsets.size());
    write_raw(out, block.indices.data(), block.indices.size());
    write_raw(out, block.values.data(), block.values.size());
    if (!out) throw IoError("write_sparse_binary: write failure on " + path);
}

SparseRowBlock read_sparse_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("read_sparse_binary: cannot open " + path);
    std::uint64_t header[3];
    read_raw(in, header, 3);
    SparseRowBlock block;
    block.rows = header[0];
    block.cols = header[1];
    block.offsets.resize(block.rows + 1);
    block.indices.resize(header[2]);
    block.values.resize(header[2]);
    read_raw(in, block.offsets.data(), block.offsets.size());
    read_raw(in, block.indices.data(), block.indices.size());
    read_raw(in, block.values.data(), block.values.size());
    block.validate();
    return block;
}

void write_matrix_market(const std::string& path, const SparseRowBlock& block) {
    block.validate();
    std::ofstream out(path);
    if (!out) throw IoError("write_matrix_market: cannot open " + path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << block.rows << ' ' << block.cols << ' ' << block.nnz() << '\n';
    char buf[64];
    for (std::size_t r = 0; r < block.rows; ++r)
        for (std::uint64_t k = block.offsets[r]; k < block.offsets[r + 1]; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", block.values[k]);
            out << (r + 1) << ' ' << (block.indices[k] + 1) << ' ' << buf << '\n';
        }
    if (!out) throw IoError("write_matrix_market: write failure on " + path);
}

SparseRowBlock read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("read_matrix_market: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
        throw IoError("read_matrix_market: missing MatrixMarket banner in " + path);
    if (line.find("coordinate") == std::string::npos || line.find("general") == std::string::npos)
        throw IoError("read_matrix_market: only 'coordinate real general' is supported");
    do {
        if (!std::getline(in, line)) throw IoError("read_matrix_market: missing size line");
    } while (!line.empty() && line[0] == '%');

    std::istringstream sizes(line);
    std::uint64_t rows, cols, nnz;
    if (!(sizes >> rows >> cols >> nnz)) throw IoError("read_matrix_market: bad size line");

    struct Entry {
        std::uint64_t r, c;
        double v;
    };
    std::vector<Entry> entries;
    entries.reserve(nnz);
    for (std::uint64_t k = 0; k < nnz; ++k) {
        std::uint64_t r, c;
        double v;
        if (!(in >> r >> c >> v)) throw IoError("read_matrix_market: truncated entry list");
        if (r == 0 || c == 0 || r > rows || c > cols)
            throw IoError("read_matrix_market: entry index out of range");
        entries.push_back({r - 1, c - 1, v});
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.r != b.r ? a.r < b.r : a.c < b.c; });

    SparseRowBlock block;
    block.rows = rows;
    block.cols = cols;
    block.offsets.assign(rows + 1, 0);
    block.indices.reserve(nnz);
    block.values.reserve(nnz);
    std::size_t pos = 0;
    for (std::uint64_t r = 0; r < rows; ++r) {
        while (pos < entries.size() && entries[pos].r == r) {
            block.indices.push_back(entries[pos].c);
            block.values.push_back(entries[pos].v);
            ++pos;
        }
        block.offsets[r + 1] = block.values.size();
    }
    block.validate();
    return block;
}

void write_image_f64(const std::string& path, std::span<const double> data, GridShape grid,
                     const std::map<std::string, std::string>& extra) {
    if (data.size() != grid.size()) throw DimensionError("write_image_f64: size mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_image_f64: cannot open " + path);
    write_raw(out, data.data(), data.size());
    if (!out) throw IoError("write_image_f64: write failure on " + path);

    std::ofstream hdr(path + ".hdr");
    if (!hdr) throw IoError("write_image_f64: cannot open " + path + ".hdr");
    hdr << "rows " << grid.rows << "\ncols " << grid.cols << '\n';
    for (const auto& [k, v] : extra) hdr << k << ' ' << v << '\n';
    if (!hdr) throw IoError("write_image_f64: header write failure");
}

Vector read_image_f64(const std::string& path, GridShape& grid) {
    std::ifstream hdr(path + ".hdr");
    if (!hdr) throw IoError("read_image_f64: missing sidecar header " + path + ".hdr");
    grid = GridShape{};
    std::string key;
    while (hdr >> key) {
        if (key == "rows")
            hdr >> grid.rows;
        else if (key == "cols")
            hdr >> grid.cols;
        else {
            std::string rest;
            std::getline(hdr, rest);
        }
    }
    if (grid.size() == 0) throw IoError("read_image_f64: header lacks dimensions");

    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("read_image_f64: cannot open " + path);
    Vector data(grid.size());
    read_raw(in, data.data(), data.size());
    return data;
}

void write_pgm_preview(const std::string& path, std::span<const double> data, GridShape grid) {
    if (data.size() != grid.size()) throw DimensionError("write_pgm_preview: size mismatch");
    double lo = data[0], hi = data[0];
    for (double v : data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double range = hi > lo ? hi - lo : 1.0;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_pgm_preview: cannot open " + path);
    out << "P5\n" << grid.cols << ' ' << grid.rows << "\n255\n";
    std::vector<unsigned char> bytes(data.size());
    for (std::size_t k = 0; k < data.size(); ++k)
        bytes[k] = static_cast<unsigned char>(std::lround(255.0 * (data[k] - lo) / range));
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write_pgm_preview: write failure on " + path);
}

}  // namespace sgdtheta
