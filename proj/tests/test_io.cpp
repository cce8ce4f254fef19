#include <cstdio>
#include <filesystem>

#include <doctest.h>

#include "sgdtheta/io.hpp"
#include "sgdtheta/rng.hpp"

using namespace sgdtheta;

namespace {
std::string tmp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}
}  // namespace

TEST_CASE("sparse binary container round trip") {
    const SparseRowBlock F = build_parallel_tomo(12, {15.0, 75.0, 140.0}, 12);
    const std::string path = tmp_path("sgdtheta_f.bin");
    write_sparse_binary(path, F);
    const SparseRowBlock back = read_sparse_binary(path);
    CHECK(back.rows == F.rows);
    CHECK(back.cols == F.cols);
    CHECK(back.offsets == F.offsets);
    CHECK(back.indices == F.indices);
    CHECK(back.values == F.values);
    std::filesystem::remove(path);
}

TEST_CASE("matrix market round trip preserves the operator action") {
    const SparseRowBlock F = build_parallel_tomo(10, {33.0, 88.0}, 10);
    const std::string path = tmp_path("sgdtheta_f.mtx");
    write_matrix_market(path, F);
    const SparseRowBlock back = read_matrix_market(path);
    CHECK(back.rows == F.rows);
    CHECK(back.cols == F.cols);
    CHECK(back.nnz() == F.nnz());
    CounterRng rng(3);
    Vector x(F.cols), a(F.rows), b(F.rows);
    for (double& v : x) v = rng.next_symmetric();
    F.apply(x, a);
    back.apply(x, b);
    for (std::size_t r = 0; r < F.rows; ++r) CHECK(a[r] == doctest::Approx(b[r]).epsilon(1e-15));
    std::filesystem::remove(path);
}

TEST_CASE("matrix market rejects malformed input") {
    const std::string path = tmp_path("sgdtheta_bad.mtx");
    {
        std::FILE* f = std::fopen(path.c_str(), "w");
        std::fputs("not a matrix market file\n", f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(read_matrix_market(path), IoError);
    std::filesystem::remove(path);
}

TEST_CASE("image f64 round trip with sidecar header") {
    const GridShape grid{5, 7};
    CounterRng rng(9);
    Vector img(grid.size());
    for (double& v : img) v = rng.next_symmetric();
    const std::string path = tmp_path("sgdtheta_img.f64");
    write_image_f64(path, img, grid, {{"model", "gaussian"}, {"seed", "7"}});
    GridShape back_grid;
    const Vector back = read_image_f64(path, back_grid);
    CHECK(back_grid == grid);
    CHECK(back == img);
    std::filesystem::remove(path);
    std::filesystem::remove(path + ".hdr");
}

TEST_CASE("missing files raise io errors") {
    CHECK_THROWS_AS(read_sparse_binary(tmp_path("does_not_exist.bin")), IoError);
    GridShape g;
    CHECK_THROWS_AS(read_image_f64(tmp_path("does_not_exist.f64"), g), IoError);
}

TEST_CASE("pgm preview has the right header and size") {
    const GridShape grid{4, 6};
    Vector img(grid.size(), 0.0);
    img[5] = 1.0;
    const std::string path = tmp_path("sgdtheta_img.pgm");
    write_pgm_preview(path, img, grid);
    CHECK(std::filesystem::file_size(path) > 24u - 1u);
    std::FILE* f = std::fopen(path.c_str(), "rb");
    char magic[3] = {};
    REQUIRE(std::fread(magic, 1, 2, f) == 2);
    std::fclose(f);
    CHECK(magic[0] == 'P');
    CHECK(magic[1] == '5');
    std::filesystem::remove(path);
}
