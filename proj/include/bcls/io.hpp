#ifndef BCLS_IO_HPP
#define BCLS_IO_HPP

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "bcls/core_model.hpp"

namespace bcls {

/// Shortest-safe lossless text form of a double ("%.17g").
std::string format_real(double value);

/// Row-major CSV without header.
std::string matrix_to_csv(const Matrix& m);
Matrix matrix_from_csv(std::string_view text);
std::string mask_to_csv(const Mask& m);
/// Accepts 0/1 cells only.
Mask mask_from_csv(std::string_view text);

Matrix read_matrix_csv(const std::filesystem::path& path);
Mask read_mask_csv(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Model file: {kind, n1, n2, k1, k2, M, z1, z2, q} with 1-based labels.
struct ModelFile {
    ModelSpec spec;
    BiclusterAssignment assignment;
    BlockValueMatrix q;
};

nlohmann::json model_to_json(const ModelFile& model);
ModelFile model_from_json(const nlohmann::json& j);

nlohmann::json matrix_to_json(const Matrix& m);

}  // namespace bcls

#endif
