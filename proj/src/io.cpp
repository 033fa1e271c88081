#include "mbasis/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mbasis {

std::string format_number(double v) {
    if (v == 0.0) return "0";  // also folds -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::add(std::vector<std::string> row) {
    if (row.size() != header_.size())
        throw Error("csv row has " + std::to_string(row.size()) + " fields, header has " +
                    std::to_string(header_.size()));
    rows_.push_back(std::move(row));
}

std::string CsvWriter::str() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return os.str();
}

void CsvWriter::write(const std::filesystem::path& path) const { write_text(path, str()); }

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
    std::ostringstream os;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << format_number(m(i, j));
        os << '\n';
    }
    write_text(path, os.str());
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
    std::istringstream in(read_text(path));
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> r;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                std::size_t used = 0;
                r.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw Error(path.string() + ":" + std::to_string(lineno) + ": not a number: '" + cell + "'");
            }
        }
        if (!rows.empty() && r.size() != rows.front().size())
            throw Error(path.string() + ":" + std::to_string(lineno) + ": ragged row");
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw Error(path.string() + ": empty matrix");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

void write_vectors_csv(const std::filesystem::path& path, const Matrix& cols) {
    write_matrix_csv(path, cols.transpose());
}

Matrix read_vectors_csv(const std::filesystem::path& path) { return read_matrix_csv(path).transpose(); }

void save_system(const std::filesystem::path& dir, const System& sys) {
    write_vectors_csv(dir / "X.csv", sys.xs());
    write_vectors_csv(dir / "F.csv", sys.fs());
    const auto& t = sys.tol();
    write_text(dir / "system.txt", "ambient_dim = " + std::to_string(sys.ambient_dim()) +
                                       "\nsize = " + std::to_string(sys.size()) +
                                       "\nrank_tol = " + format_number(t.rank_tol) +
                                       "\nbiorth_tol = " + format_number(t.biorth_tol) +
                                       "\nspan_tol = " + format_number(t.span_tol) +
                                       "\nnet_resolution = " + format_number(t.net_resolution) + "\n");
}

System load_system(const std::filesystem::path& dir, ToleranceConfig tol) {
    const Matrix xs = read_vectors_csv(dir / "X.csv");
    const Matrix fs = read_vectors_csv(dir / "F.csv");
    // the header is informative; only the dimensions are cross-checked
    if (std::filesystem::exists(dir / "system.txt")) {
        std::istringstream in(read_text(dir / "system.txt"));
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = line.substr(0, line.find_last_not_of(" \t", eq - 1) + 1);
            long long v = 0;
            try {
                v = std::stoll(line.substr(eq + 1));
            } catch (const std::exception&) {
                continue;
            }
            const auto where = (dir / "system.txt").string() + ":" + std::to_string(lineno) + ": ";
            if (key == "ambient_dim" && v != xs.rows())
                throw Error(where + "ambient_dim " + std::to_string(v) + " but X.csv rows have " +
                            std::to_string(xs.rows()) + " entries");
            if (key == "size" && v != xs.cols())
                throw Error(where + "size " + std::to_string(v) + " but X.csv has " + std::to_string(xs.cols()) +
                            " rows");
        }
    }
    return System(xs, fs, tol);
}

std::string format_partition(const BlockPartition& p) {
    std::ostringstream os;
    for (std::size_t j = 0; j < p.blocks.size(); ++j) {
        os << "A " << j + 1 << ": " << p.anchors[j] << " |";
        for (int k : p.blocks[j]) os << ' ' << k;
        os << " | " << format_number(p.epsilons[j]) << '\n';
    }
    return os.str();
}

BlockPartition parse_partition(const std::string& text) {
    BlockPartition p;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
        auto bad = [&](const std::string& why) {
            return Error("partition line " + std::to_string(lineno) + ": " + why);
        };
        const auto colon = line.find(':');
        const auto bar1 = line.find('|');
        const auto bar2 = bar1 == std::string::npos ? bar1 : line.find('|', bar1 + 1);
        if (line.rfind("A ", 0) != 0 || colon == std::string::npos || bar2 == std::string::npos)
            throw bad("expected 'A j: n | members | eps'");
        int j = 0, anchor = 0;
        double eps = 0;
        std::vector<int> members;
        try {
            j = std::stoi(line.substr(2, colon - 2));
            anchor = std::stoi(line.substr(colon + 1, bar1 - colon - 1));
            std::istringstream ms(line.substr(bar1 + 1, bar2 - bar1 - 1));
            int k;
            while (ms >> k) members.push_back(k);
            if (!ms.eof()) throw bad("non-integer member");
            eps = std::stod(line.substr(bar2 + 1));
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            throw bad("malformed number");
        }
        if (j != static_cast<int>(p.blocks.size()) + 1) throw bad("blocks must be numbered 1, 2, ... in order");
        p.blocks.push_back(std::move(members));
        p.anchors.push_back(anchor);
        p.epsilons.push_back(eps);
    }
    return p;
}

std::string format_indices(const RepresentingIndices& r) {
    std::ostringstream os;
    os << "m r p delta\n";
    for (int m = 1; m <= r.depth(); ++m) {
        const auto i = static_cast<std::size_t>(m - 1);
        os << m << ' ' << r.r[i] << ' ' << r.interim_p[i] << ' ' << format_number(r.deltas[i]) << '\n';
    }
    return os.str();
}

}  // namespace mbasis
