#include "dpinv/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "dpinv/error.hpp"

namespace dpinv::io {

namespace {

std::vector<std::string_view> fields(std::string_view line, std::string_view seps = " \t\r") {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && seps.find(line[i]) != std::string_view::npos) ++i;
        const std::size_t j = i;
        while (i < line.size() && seps.find(line[i]) == std::string_view::npos) ++i;
        if (i > j) out.push_back(line.substr(j, i - j));
    }
    return out;
}

std::string where(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

double parse_real(std::string_view s, std::size_t line_no) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw InputError(where(line_no) + "cannot parse number '" + std::string(s) + "'");
    return v;
}

std::size_t parse_index(std::string_view s, std::size_t line_no) {
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw InputError(where(line_no) + "cannot parse index '" + std::string(s) + "'");
    return static_cast<std::size_t>(v);
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::ifstream open_in(const std::string& path, bool binary = false) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw InputError("cannot open '" + path + "'");
    return in;
}

bool has_mm_header(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string first;
    std::getline(in, first);
    return first.rfind("%%MatrixMarket", 0) == 0;
}

struct TripletText {
    std::size_t n = 0;
    bool n_given = false;
    std::vector<Triplet> entries;
};

// Shared reader for edge lists and 0-based triplet files.
TripletText read_triplet_text(std::istream& in, bool weight_required) {
    TripletText t;
    std::size_t max_id = 0;
    bool any = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv(line);
        const auto f = fields(sv);
        if (f.empty()) continue;
        if (f[0].front() == '#') {
            if (f.size() >= 3 && f[0] == "#" && f[1] == "nodes") {
                t.n = parse_index(f[2], line_no);
                t.n_given = true;
            }
            continue;
        }
        if (f.size() < 2 || f.size() > 3 || (weight_required && f.size() != 3))
            throw InputError(where(line_no) + "expected 'src dst" + (weight_required ? " value'" : " [weight]'"));
        const std::size_t a = parse_index(f[0], line_no);
        const std::size_t b = parse_index(f[1], line_no);
        const double w = f.size() == 3 ? parse_real(f[2], line_no) : 1.0;
        if (!std::isfinite(w)) throw InputError(where(line_no) + "non-finite value");
        t.entries.push_back({a, b, w});
        max_id = std::max({max_id, a, b});
        any = true;
    }
    if (!t.n_given) t.n = any ? max_id + 1 : 0;
    else if (any && max_id >= t.n)
        throw InputError("node id " + std::to_string(max_id) + " exceeds declared node count " + std::to_string(t.n));
    return t;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

Digraph read_edge_list(std::istream& in) {
    TripletText t = read_triplet_text(in, false);
    Digraph g;
    g.n = t.n;
    g.edges.reserve(t.entries.size());
    for (const auto& e : t.entries) g.edges.push_back({e.row, e.col, e.value});
    g.validate();
    return g;
}

void write_edge_list(std::ostream& out, const Digraph& g) {
    out << "# nodes " << g.n << '\n';
    for (const auto& e : g.edges) out << e.src << '\t' << e.dst << '\t' << format_double(e.weight) << '\n';
}

SparseMatrix read_matrix_market(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw InputError("empty Matrix Market input");
    const auto head = fields(line);
    if (head.size() < 5 || head[0] != "%%MatrixMarket")
        throw InputError("missing %%MatrixMarket header");
    const std::string object = lower(head[1]), format = lower(head[2]), field = lower(head[3]),
                      symmetry = lower(head[4]);
    if (object != "matrix" || format != "coordinate")
        throw InputError("only coordinate matrices are supported");
    if (field != "real" && field != "integer" && field != "pattern")
        throw InputError("unsupported Matrix Market field '" + field + "'");
    if (symmetry != "general" && symmetry != "symmetric")
        throw InputError("unsupported Matrix Market symmetry '" + symmetry + "'");
    const bool pattern = field == "pattern";
    const bool symmetric = symmetry == "symmetric";

    std::size_t rows = 0, cols = 0, nnz = 0;
    bool have_size = false;
    std::vector<Triplet> t;
    while (std::getline(in, line)) {
        ++line_no;
        const auto f = fields(line);
        if (f.empty() || f[0].front() == '%') continue;
        if (!have_size) {
            if (f.size() != 3) throw InputError(where(line_no) + "expected 'rows cols entries'");
            rows = parse_index(f[0], line_no);
            cols = parse_index(f[1], line_no);
            nnz = parse_index(f[2], line_no);
            have_size = true;
            t.reserve(symmetric ? 2 * nnz : nnz);
            continue;
        }
        if (f.size() != (pattern ? 2u : 3u)) throw InputError(where(line_no) + "malformed entry");
        const std::size_t i = parse_index(f[0], line_no);
        const std::size_t j = parse_index(f[1], line_no);
        if (i == 0 || j == 0 || i > rows || j > cols) throw InputError(where(line_no) + "index out of range");
        const double v = pattern ? 1.0 : parse_real(f[2], line_no);
        t.push_back({i - 1, j - 1, v});
        if (symmetric && i != j) t.push_back({j - 1, i - 1, v});
    }
    if (!have_size) throw InputError("Matrix Market size line missing");
    std::size_t stored = 0;
    for (const auto& e : t) stored += (symmetric && e.row < e.col) ? 0 : 1;
    if (stored != nnz)
        throw InputError("Matrix Market declares " + std::to_string(nnz) + " entries but lists " +
                         std::to_string(stored));
    return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

void write_matrix_market(std::ostream& out, const SparseMatrix& m) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto c = m.row_cols(i);
        const auto v = m.row_values(i);
        for (std::size_t k = 0; k < c.size(); ++k)
            out << i + 1 << ' ' << c[k] + 1 << ' ' << format_double(v[k]) << '\n';
    }
}

Digraph digraph_from_matrix(const SparseMatrix& m) {
    require_dims(m.rows() == m.cols(), "adjacency matrix must be square");
    Digraph g;
    g.n = m.rows();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto c = m.row_cols(i);
        const auto v = m.row_values(i);
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (v[k] < 0.0)
                throw InputError("adjacency entry (" + std::to_string(i) + ", " + std::to_string(c[k]) + ") is negative");
            if (v[k] > 0.0) g.edges.push_back({i, static_cast<std::size_t>(c[k]), v[k]});
        }
    }
    return g;
}

Digraph read_graph_file(const std::string& path) {
    if (has_mm_header(path)) {
        std::ifstream in = open_in(path);
        return digraph_from_matrix(read_matrix_market(in));
    }
    std::ifstream in = open_in(path);
    return read_edge_list(in);
}

SparseMatrix read_matrix_file(const std::string& path) {
    std::ifstream in = open_in(path);
    if (has_mm_header(path)) return read_matrix_market(in);
    TripletText t = read_triplet_text(in, true);
    return SparseMatrix::from_triplets(t.n, t.n, std::move(t.entries));
}

Vector read_vector(std::istream& in) {
    Vector v;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        for (auto f : fields(line, " \t\r,")) {
            if (f.front() == '#') break;
            v.push_back(parse_real(f, line_no));
        }
    }
    return v;
}

Vector read_vector_file(const std::string& path) {
    std::ifstream in = open_in(path);
    return read_vector(in);
}

void write_vector(std::ostream& out, const Vector& v) {
    char buf[64];
    for (double x : v) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        out << buf << '\n';
    }
}

void write_block_csv(std::ostream& out, const ColumnBlock& b) {
    char buf[64];
    for (std::size_t i = 0; i < b.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", b(i, j));
            if (j) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

ColumnBlock read_block_csv(std::istream& in) {
    std::vector<Vector> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto f = fields(line, ",\r");
        if (f.empty()) continue;
        Vector r;
        for (auto x : f) {
            const auto t = fields(x, " \t");
            if (t.size() != 1) throw InputError(where(line_no) + "malformed CSV field");
            r.push_back(parse_real(t[0], line_no));
        }
        if (!rows.empty() && r.size() != rows.front().size())
            throw InputError(where(line_no) + "ragged CSV row");
        rows.push_back(std::move(r));
    }
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    ColumnBlock b(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j) b(i, j) = rows[i][j];
    return b;
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw InputError("truncated binary block header");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_block_binary(std::ostream& out, const ColumnBlock& b) {
    if (b.rows() > UINT32_MAX || b.cols() > UINT32_MAX) throw InputError("block too large for binary header");
    put_u32(out, static_cast<std::uint32_t>(b.rows()));
    put_u32(out, static_cast<std::uint32_t>(b.cols()));
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            const std::uint64_t bits = std::bit_cast<std::uint64_t>(b(i, j));
            unsigned char c[8];
            for (int k = 0; k < 8; ++k) c[k] = static_cast<unsigned char>(bits >> (8 * k));
            out.write(reinterpret_cast<const char*>(c), 8);
        }
}

ColumnBlock read_block_binary(std::istream& in) {
    const std::uint32_t n = get_u32(in);
    const std::uint32_t m = get_u32(in);
    ColumnBlock b(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            unsigned char c[8];
            if (!in.read(reinterpret_cast<char*>(c), 8)) throw InputError("truncated binary block");
            std::uint64_t bits = 0;
            for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(c[k]) << (8 * k);
            b(i, j) = std::bit_cast<double>(bits);
        }
    return b;
}

}  // namespace dpinv::io
