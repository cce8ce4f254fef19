#pragma once

#include <map>
#include <string>

#include "sgdtheta/operators.hpp"
#include "sgdtheta/types.hpp"

namespace sgdtheta {

/// Binary sparse container, little-endian. Layout:
///   u64 rows, u64 cols, u64 nnz,
///   u64 offsets[rows+1], u64 indices[nnz], f64 values[nnz].
void write_sparse_binary(const std::string& path, const SparseRowBlock& block);
SparseRowBlock read_sparse_binary(const std::string& path);

/// Matrix Market coordinate format (1-based indices) for interoperability.
void write_matrix_market(const std::string& path, const SparseRowBlock& block);
SparseRowBlock read_matrix_market(const std::string& path);

/// Flat little-endian f64 image (row-major) with a sidecar text header at
/// <path>.hdr holding "key value" lines; "rows"/"cols" are always written,
/// callers may add model/seed/delta entries.
void write_image_f64(const std::string& path, std::span<const double> data, GridShape grid,
                     const std::map<std::string, std::string>& extra = {});
Vector read_image_f64(const std::string& path, GridShape& grid);

/// 8-bit PGM preview, linearly rescaled to the data range.
void write_pgm_preview(const std::string& path, std::span<const double> data, GridShape grid);

}  // namespace sgdtheta
