#include "smm/harness/sample_io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string_view>

#include "smm/errors.hpp"

namespace smm::harness {

namespace {

static_assert(sizeof(double) == 8);

void put_le(std::ostream& out, double x) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

bool get_le(std::istream& in, double& x) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) return false;
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    x = std::bit_cast<double>(bits);
    return true;
}

void check_shapes(Index n, Index q) {
    if (n <= 0 || q <= 0) throw std::invalid_argument("sample file: N and Q must be positive");
}

void write_number(std::ostream& out, double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    out.write(buf, res.ptr - buf);
}

}  // namespace

void write_samples_binary(std::ostream& out, const std::vector<Sample>& samples) {
    for (const Sample& s : samples) {
        for (Index q = 0; q < s.X.cols(); ++q) {
            for (Index i = 0; i < s.X.rows(); ++i) put_le(out, s.X(i, q));
            put_le(out, s.y(q));
        }
    }
    if (!out) throw std::runtime_error("sample file: write failed");
}

std::vector<Sample> read_samples_binary(std::istream& in, Index n, Index q) {
    check_shapes(n, q);
    std::vector<Sample> samples;
    for (;;) {
        Sample s{MatrixXd(n, q), VectorXd(q)};
        double x = 0.0;
        if (!get_le(in, x)) break;
        for (Index c = 0; c < q; ++c) {
            for (Index i = 0; i < n; ++i) {
                if (!(c == 0 && i == 0) && !get_le(in, x)) {
                    throw std::runtime_error("sample file: truncated binary record");
                }
                s.X(i, c) = x;
            }
            if (!get_le(in, x)) throw std::runtime_error("sample file: truncated binary record");
            s.y(c) = x;
        }
        samples.push_back(std::move(s));
    }
    return samples;
}

void write_samples_csv(std::ostream& out, const std::vector<Sample>& samples) {
    for (const Sample& s : samples) {
        for (Index q = 0; q < s.X.cols(); ++q) {
            for (Index i = 0; i < s.X.rows(); ++i) {
                write_number(out, s.X(i, q));
                out << ',';
            }
            write_number(out, s.y(q));
            out << '\n';
        }
    }
    if (!out) throw std::runtime_error("sample file: write failed");
}

std::vector<Sample> read_samples_csv(std::istream& in, Index n, Index q) {
    check_shapes(n, q);
    std::vector<Sample> samples;
    Sample cur{MatrixXd(n, q), VectorXd(q)};
    Index row = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const char* p = line.data();
        const char* end = p + line.size();
        for (Index k = 0; k <= n; ++k) {
            double x = 0.0;
            while (p < end && *p == ' ') ++p;
            const auto res = std::from_chars(p, end, x);
            if (res.ec != std::errc()) {
                throw std::runtime_error("sample file: bad number on line " + std::to_string(lineno));
            }
            p = res.ptr;
            while (p < end && *p == ' ') ++p;
            if (k < n) {
                if (p == end || *p != ',') {
                    throw std::runtime_error("sample file: expected " + std::to_string(n + 1) +
                                             " fields on line " + std::to_string(lineno));
                }
                ++p;
                cur.X(k, row) = x;
            } else {
                if (p != end) {
                    throw std::runtime_error("sample file: trailing fields on line " + std::to_string(lineno));
                }
                cur.y(row) = x;
            }
        }
        if (++row == q) {
            samples.push_back(cur);
            row = 0;
        }
    }
    if (row != 0) throw std::runtime_error("sample file: trailing partial block");
    return samples;
}

std::vector<Sample> load_samples(const std::string& path, const std::string& format, Index n,
                                 Index q) {
    if (format == "binary") {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open sample file '" + path + "'");
        return read_samples_binary(in, n, q);
    }
    if (format == "csv") {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open sample file '" + path + "'");
        return read_samples_csv(in, n, q);
    }
    throw std::invalid_argument("unknown sample format '" + format + "'");
}

}  // namespace smm::harness
