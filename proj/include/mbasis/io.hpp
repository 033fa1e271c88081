#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mbasis/biorth.hpp"
#include "mbasis/perturbations.hpp"
#include "mbasis/representing.hpp"

namespace mbasis {

/// 12 significant digits, shortest of fixed/scientific ("%.12g").
std::string format_number(double v);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void add(std::vector<std::string> row);
    std::string str() const;
    void write(const std::filesystem::path& path) const;
    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// One row per ambient coordinate, one column per vector.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_csv(const std::filesystem::path& path);

/// One vector per row (the transpose of the column layout used in memory).
void write_vectors_csv(const std::filesystem::path& path, const Matrix& cols);
Matrix read_vectors_csv(const std::filesystem::path& path);

/// A stored system is a directory with X.csv and F.csv (one vector per row)
/// and system.txt (ambient_dim, size, tolerances).
void save_system(const std::filesystem::path& dir, const System& sys);
System load_system(const std::filesystem::path& dir, ToleranceConfig tol = {});

/// Lines `A j: n(j) | k1 k2 ... | eps_j`.
std::string format_partition(const BlockPartition& p);
BlockPartition parse_partition(const std::string& text);

/// Lines `m r(m) p(m) delta(m)` after a header.
std::string format_indices(const RepresentingIndices& r);

}  // namespace mbasis
