#include "klnmf/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace klnmf {

namespace {

std::string fmt(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("cannot read " + path);
    return ss.str();
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

/// Whitespace-separated number stream over a file buffer; parsing is
/// locale-independent and round-trip exact.
struct NumberReader {
    const char* p;
    const char* end;

    explicit NumberReader(const std::string& s) : p(s.data()), end(s.data() + s.size()) {}

    void skip_space() {
        while (p < end && (std::isspace(static_cast<unsigned char>(*p)) || *p == ',')) ++p;
    }

    bool next_double(double& out) {
        skip_space();
        if (p >= end) return false;
        const auto res = std::from_chars(p, end, out);
        if (res.ec != std::errc{}) return false;
        p = res.ptr;
        return true;
    }

    bool next_index(std::size_t& out) {
        skip_space();
        if (p >= end) return false;
        const auto res = std::from_chars(p, end, out);
        if (res.ec != std::errc{}) return false;
        p = res.ptr;
        return true;
    }

    bool exhausted() {
        skip_space();
        return p >= end;
    }
};

struct MmHeader {
    bool coordinate = false;
};

MmHeader parse_mm_banner(const std::string& line, const std::string& path) {
    std::istringstream ss(lower(line));
    std::string banner, object, format, field, qualifier;
    ss >> banner >> object >> format >> field >> qualifier;
    if (object != "matrix") throw FormatError(path + ": unsupported MatrixMarket object");
    if (format != "coordinate" && format != "array")
        throw FormatError(path + ": unsupported MatrixMarket format '" + format + "'");
    if (field != "real") throw FormatError(path + ": unsupported MatrixMarket field '" + field + "'");
    if (qualifier != "general")
        throw FormatError(path + ": unsupported MatrixMarket qualifier '" + qualifier + "'");
    return {format == "coordinate"};
}

// Strips the banner plus any %-comment lines, returns the rest of the buffer.
std::string mm_body(const std::string& content) {
    std::size_t pos = 0;
    std::string body;
    bool first = true;
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        const std::string line = content.substr(pos, eol - pos);
        pos = eol + 1;
        if (first) {
            first = false;
            continue; // banner
        }
        if (!line.empty() && line[0] == '%') continue;
        body += line;
        body += '\n';
    }
    return body;
}

AnyMatrix read_mm(const std::string& content, const std::string& first_line,
                  const std::string& path) {
    const MmHeader header = parse_mm_banner(first_line, path);
    const std::string body = mm_body(content);
    NumberReader in(body);

    std::size_t rows = 0, cols = 0;
    if (!in.next_index(rows) || !in.next_index(cols))
        throw FormatError(path + ": malformed size line");

    if (header.coordinate) {
        std::size_t nnz = 0;
        if (!in.next_index(nnz)) throw FormatError(path + ": malformed size line");
        std::vector<std::tuple<std::size_t, std::size_t, double>> trips;
        trips.reserve(nnz);
        for (std::size_t k = 0; k < nnz; ++k) {
            std::size_t i = 0, j = 0;
            double x = 0.0;
            if (!in.next_index(i) || !in.next_index(j) || !in.next_double(x))
                throw FormatError(path + ": expected " + std::to_string(nnz) +
                                  " entries, found " + std::to_string(k));
            if (i < 1 || i > rows || j < 1 || j > cols)
                throw FormatError(path + ": entry index out of bounds");
            if (x < 0.0 || !std::isfinite(x))
                throw FormatError(path + ": negative or non-finite value");
            trips.emplace_back(i - 1, j - 1, x);
        }
        if (!in.exhausted()) throw FormatError(path + ": trailing data after declared entries");
        return SparseMatrix::from_triplets(rows, cols, std::move(trips));
    }

    DenseMatrix m(rows, cols);
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t i = 0; i < rows; ++i) {
            double x = 0.0;
            if (!in.next_double(x)) throw FormatError(path + ": array body too short");
            if (x < 0.0 || !std::isfinite(x))
                throw FormatError(path + ": negative or non-finite value");
            m(i, j) = x;
        }
    if (!in.exhausted()) throw FormatError(path + ": trailing data after declared entries");
    return m;
}

AnyMatrix read_csv(const std::string& content, const std::string& path) {
    std::vector<std::vector<double>> rows;
    std::size_t pos = 0;
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        std::string line = content.substr(pos, eol - pos);
        pos = eol + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        bool blank = true;
        for (const char c : line) blank = blank && std::isspace(static_cast<unsigned char>(c));
        if (blank) continue;

        std::vector<double> vals;
        NumberReader in(line);
        double x = 0.0;
        while (in.next_double(x)) {
            if (x < 0.0 || !std::isfinite(x))
                throw FormatError(path + ": negative or non-finite value");
            vals.push_back(x);
        }
        if (!in.exhausted() || vals.empty()) throw FormatError(path + ": malformed CSV line");
        if (!rows.empty() && vals.size() != rows.front().size())
            throw FormatError(path + ": ragged CSV rows");
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw FormatError(path + ": empty CSV file");

    DenseMatrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    return m;
}

std::string first_line_of(const std::string& content) {
    const std::size_t eol = content.find('\n');
    return eol == std::string::npos ? content : content.substr(0, eol);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("cannot write " + path);
}

} // namespace

AnyMatrix read_matrix(const std::string& path) {
    const std::string content = read_file(path);
    const std::string head = first_line_of(content);
    if (lower(head).rfind("%%matrixmarket", 0) == 0) return read_mm(content, head, path);
    return read_csv(content, path);
}

MatrixFileInfo probe_matrix(const std::string& path) {
    const auto m = read_matrix(path);
    MatrixFileInfo info;
    info.rows = matrix_rows(m);
    info.cols = matrix_cols(m);
    if (std::holds_alternative<SparseMatrix>(m)) {
        info.format = MatrixFormat::matrixmarket_coordinate;
        info.nnz = std::get<SparseMatrix>(m).nnz();
    } else {
        const std::string head = lower(first_line_of(read_file(path)));
        info.format = head.rfind("%%matrixmarket", 0) == 0 ? MatrixFormat::matrixmarket_array
                                                           : MatrixFormat::csv_dense;
        info.nnz = info.rows * info.cols;
    }
    return info;
}

void write_matrix(const DenseMatrix& m, const std::string& path, MatrixFormat format) {
    std::string out;
    switch (format) {
    case MatrixFormat::csv_dense:
        for (std::size_t i = 0; i < m.rows(); ++i) {
            for (std::size_t j = 0; j < m.cols(); ++j) {
                if (j) out += ',';
                out += fmt(m(i, j));
            }
            out += '\n';
        }
        break;
    case MatrixFormat::matrixmarket_array:
        out += "%%MatrixMarket matrix array real general\n";
        out += std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
        for (std::size_t j = 0; j < m.cols(); ++j)
            for (std::size_t i = 0; i < m.rows(); ++i) out += fmt(m(i, j)) + "\n";
        break;
    case MatrixFormat::matrixmarket_coordinate: {
        std::size_t nnz = 0;
        for (std::size_t j = 0; j < m.cols(); ++j)
            for (std::size_t i = 0; i < m.rows(); ++i) nnz += m(i, j) != 0.0 ? 1 : 0;
        out += "%%MatrixMarket matrix coordinate real general\n";
        out += std::to_string(m.rows()) + " " + std::to_string(m.cols()) + " " +
               std::to_string(nnz) + "\n";
        for (std::size_t j = 0; j < m.cols(); ++j)
            for (std::size_t i = 0; i < m.rows(); ++i)
                if (m(i, j) != 0.0)
                    out += std::to_string(i + 1) + " " + std::to_string(j + 1) + " " +
                           fmt(m(i, j)) + "\n";
        break;
    }
    }
    write_file(path, out);
}

void write_matrix(const SparseMatrix& m, const std::string& path, MatrixFormat format) {
    if (format != MatrixFormat::matrixmarket_coordinate) {
        write_matrix(m.to_dense(), path, format);
        return;
    }
    std::string out = "%%MatrixMarket matrix coordinate real general\n";
    out += std::to_string(m.rows()) + " " + std::to_string(m.cols()) + " " +
           std::to_string(m.nnz()) + "\n";
    for (std::size_t j = 0; j < m.cols(); ++j)
        for (std::size_t k = m.col_begin(j); k < m.col_end(j); ++k)
            out += std::to_string(m.row_index(k) + 1) + " " + std::to_string(j + 1) + " " +
                   fmt(m.value(k)) + "\n";
    write_file(path, out);
}

void write_matrix(const AnyMatrix& m, const std::string& path) {
    const bool sparse = std::holds_alternative<SparseMatrix>(m);
    const MatrixFormat format = format_for_path(path, sparse);
    std::visit([&](const auto& mm) { write_matrix(mm, path, format); }, m);
}

MatrixFormat format_for_path(const std::string& path, bool sparse) {
    if (sparse) return MatrixFormat::matrixmarket_coordinate;
    const std::size_t dot = path.rfind('.');
    if (dot != std::string::npos && lower(path.substr(dot)) == ".csv")
        return MatrixFormat::csv_dense;
    return MatrixFormat::matrixmarket_array;
}

void write_convergence_log(const std::vector<ConvergenceRecord>& records,
                           const std::string& path) {
    std::string out = "iteration,objective,wall_ms,dna_wins_h,dna_wins_w\n";
    for (const auto& r : records) {
        out += std::to_string(r.iteration) + "," + fmt(r.objective.total) + "," + fmt(r.wall_ms) +
               "," + std::to_string(r.dna_wins_h) + "," + std::to_string(r.dna_wins_w) + "\n";
    }
    write_file(path, out);
}

} // namespace klnmf
