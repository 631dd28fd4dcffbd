#include "bcls/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace bcls {

namespace {

template <typename T, typename Parse>
Grid<T> grid_from_csv(std::string_view text, Parse parse) {
    std::vector<T> cells;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

        std::size_t count = 0;
        while (true) {
            const auto comma = line.find(',');
            std::string cell(line.substr(0, comma));
            cells.push_back(parse(cell, line_no));
            ++count;
            if (comma == std::string_view::npos) break;
            line = line.substr(comma + 1);
        }
        if (rows == 0) {
            cols = count;
        } else if (count != cols) {
            throw std::invalid_argument("CSV line " + std::to_string(line_no) + " has " +
                                        std::to_string(count) + " cells, expected " +
                                        std::to_string(cols));
        }
        ++rows;
    }
    if (rows == 0) throw std::invalid_argument("CSV has no rows");
    Grid<T> out(rows, cols);
    std::copy(cells.begin(), cells.end(), out.flat().begin());
    return out;
}

double parse_real(const std::string& cell, std::size_t line_no) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    while (*end == ' ' || *end == '\t') ++end;
    if (end == begin || *end != '\0' || (errno == ERANGE && std::isinf(v))) {
        throw std::invalid_argument("bad number '" + cell + "' on CSV line " + std::to_string(line_no));
    }
    return v;
}

std::uint8_t parse_flag(const std::string& cell, std::size_t line_no) {
    const double v = parse_real(cell, line_no);
    if (v == 0.0) return 0;
    if (v == 1.0) return 1;
    throw std::invalid_argument("mask cell '" + cell + "' on CSV line " + std::to_string(line_no) +
                                " is not 0 or 1");
}

template <typename T, typename Format>
std::string grid_to_csv(const Grid<T>& g, Format format) {
    std::string out;
    for (std::size_t i = 0; i < g.rows(); ++i) {
        for (std::size_t j = 0; j < g.cols(); ++j) {
            if (j > 0) out += ',';
            out += format(g(i, j));
        }
        out += '\n';
    }
    return out;
}

}  // namespace

std::string format_real(double value) {
    if (value == 0.0) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string matrix_to_csv(const Matrix& m) { return grid_to_csv(m, format_real); }

Matrix matrix_from_csv(std::string_view text) { return grid_from_csv<double>(text, parse_real); }

std::string mask_to_csv(const Mask& m) {
    return grid_to_csv(m, [](std::uint8_t v) { return std::string(v ? "1" : "0"); });
}

Mask mask_from_csv(std::string_view text) { return grid_from_csv<std::uint8_t>(text, parse_flag); }

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Matrix read_matrix_csv(const std::filesystem::path& path) { return matrix_from_csv(read_file(path)); }

Mask read_mask_csv(const std::filesystem::path& path) { return mask_from_csv(read_file(path)); }

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

nlohmann::json matrix_to_json(const Matrix& m) {
    auto rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto row = m.row(i);
        rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return rows;
}

nlohmann::json model_to_json(const ModelFile& model) {
    auto one_based = [](const std::vector<int>& z) {
        std::vector<int> out(z);
        for (auto& v : out) ++v;
        return out;
    };
    return {
        {"kind", to_string(model.spec.kind)},
        {"n1", model.spec.n1},
        {"n2", model.spec.n2},
        {"k1", model.spec.k1},
        {"k2", model.spec.k2},
        {"M", model.spec.bound},
        {"z1", one_based(model.assignment.z1)},
        {"z2", one_based(model.assignment.z2)},
        {"q", matrix_to_json(model.q.q)},
    };
}

ModelFile model_from_json(const nlohmann::json& j) {
    ModelFile model;
    model.spec.kind = model_kind_from_string(j.at("kind").get<std::string>());
    model.spec.n1 = j.at("n1").get<std::size_t>();
    model.spec.n2 = j.at("n2").get<std::size_t>();
    model.spec.k1 = j.at("k1").get<int>();
    model.spec.k2 = j.at("k2").get<int>();
    model.spec.bound = j.at("M").get<double>();
    model.spec.validate();

    auto zero_based = [](std::vector<int> z) {
        for (auto& v : z) --v;
        return z;
    };
    model.assignment = {zero_based(j.at("z1").get<std::vector<int>>()),
                        zero_based(j.at("z2").get<std::vector<int>>()), model.spec.k1, model.spec.k2};
    model.assignment.validate();

    const auto rows = j.at("q").get<std::vector<std::vector<double>>>();
    Matrix q(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t a = 0; a < rows.size(); ++a) {
        if (rows[a].size() != q.cols()) throw std::invalid_argument("ragged q matrix");
        for (std::size_t b = 0; b < q.cols(); ++b) q(a, b) = rows[a][b];
    }
    if (q.rows() != static_cast<std::size_t>(model.spec.k1) || q.cols() != static_cast<std::size_t>(model.spec.k2)) {
        throw std::invalid_argument("q must be k1 x k2");
    }
    for (double v : q.flat()) {
        if (!(std::abs(v) <= model.spec.bound)) throw std::invalid_argument("q entry exceeds M");
    }
    model.q = {std::move(q), model.spec.bound};
    return model;
}

}  // namespace bcls
