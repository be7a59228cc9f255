#ifndef FRSVT_MATRIX_IO_HPP
#define FRSVT_MATRIX_IO_HPP

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "frsvt/matrix.hpp"

namespace frsvt {

//
// Matrix files.
//
// CSV: one matrix row per line, comma separated, 17 significant digits.
// BIN: "FRSM", rows and cols as u64 little-endian, then rows*cols IEEE-754
//      doubles, little-endian, column-major.
//

enum class MatrixFormat { csv, bin };

inline MatrixFormat parse_format(std::string_view s)
{
    if (s == "csv")
        return MatrixFormat::csv;
    if (s == "bin")
        return MatrixFormat::bin;
    throw InvalidArgument("unknown matrix format: " + std::string(s));
}

namespace detail {

inline void put_u64_le(std::string& out, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

inline std::uint64_t get_u64_le(std::string_view in, std::size_t pos)
{
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + static_cast<std::size_t>(i)])) << (8 * i);
    return v;
}

constexpr std::string_view bin_magic = "FRSM";
constexpr std::size_t bin_header = 4 + 8 + 8;

} // namespace detail

inline std::string encode_bin(const Matrix& A)
{
    std::string out;
    out.reserve(detail::bin_header + static_cast<std::size_t>(A.size()) * 8);
    out.append(detail::bin_magic);
    detail::put_u64_le(out, static_cast<std::uint64_t>(A.rows()));
    detail::put_u64_le(out, static_cast<std::uint64_t>(A.cols()));
    const double* data = A.data();
    for (Index i = 0; i < A.size(); ++i)
        detail::put_u64_le(out, std::bit_cast<std::uint64_t>(data[i]));
    return out;
}

inline Matrix decode_bin(std::string_view in)
{
    if (in.size() < 4)
        throw ParseError("truncated magic", in.size());
    if (in.substr(0, 4) != detail::bin_magic)
        throw ParseError("bad magic, expected FRSM", 0);
    if (in.size() < detail::bin_header)
        throw ParseError("truncated header", in.size());

    const std::uint64_t rows = detail::get_u64_le(in, 4);
    const std::uint64_t cols = detail::get_u64_le(in, 12);
    const std::uint64_t payload = in.size() - detail::bin_header;
    if (rows != 0 && cols > payload / 8 / rows)
        throw ParseError("dimensions exceed payload", 4);
    if (rows * cols * 8 != payload)
        throw ParseError("payload size does not match " + std::to_string(rows) + "x" + std::to_string(cols),
                         std::min<std::size_t>(in.size(), detail::bin_header + rows * cols * 8));

    Matrix A(static_cast<Index>(rows), static_cast<Index>(cols));
    double* data = A.data();
    for (std::uint64_t i = 0; i < rows * cols; ++i)
    {
        const std::size_t pos = detail::bin_header + i * 8;
        const double v = std::bit_cast<double>(detail::get_u64_le(in, pos));
        if (!std::isfinite(v))
            throw ParseError("non-finite value", pos);
        data[i] = v;
    }
    return A;
}

inline std::string encode_csv(const Matrix& A)
{
    std::string out;
    char buf[64];
    for (Index i = 0; i < A.rows(); ++i)
    {
        for (Index j = 0; j < A.cols(); ++j)
        {
            if (j > 0)
                out.push_back(',');
            const auto r = std::to_chars(buf, buf + sizeof buf, A(i, j), std::chars_format::general, 17);
            out.append(buf, r.ptr);
        }
        out.push_back('\n');
    }
    return out;
}

inline Matrix decode_csv(std::string_view in)
{
    std::vector<double> values;   // row-major while reading
    Index cols = -1;
    Index rows = 0;
    std::size_t pos = 0;

    // drop trailing blank lines
    std::size_t end = in.size();
    while (end > 0 && (in[end - 1] == '\n' || in[end - 1] == '\r' || in[end - 1] == ' '))
        --end;
    if (end == 0)
        throw ParseError("empty CSV input", 0);

    while (pos < end)
    {
        const std::size_t line_start = pos;
        std::size_t line_end = in.find('\n', pos);
        if (line_end == std::string_view::npos || line_end > end)
            line_end = end;

        Index count = 0;
        std::size_t cur = line_start;
        while (true)
        {
            std::size_t field_end = in.find(',', cur);
            if (field_end == std::string_view::npos || field_end > line_end)
                field_end = line_end;

            std::size_t a = cur;
            std::size_t b = field_end;
            while (a < b && (in[a] == ' ' || in[a] == '\t'))
                ++a;
            while (b > a && (in[b - 1] == ' ' || in[b - 1] == '\t' || in[b - 1] == '\r'))
                --b;

            double v = 0.0;
            const char* first = in.data() + a;
            const char* last = in.data() + b;
            if (a < b && *first == '+')
                ++first;
            const auto r = std::from_chars(first, last, v);
            if (a == b || r.ec != std::errc() || r.ptr != last)
                throw ParseError("malformed number", a);
            if (!std::isfinite(v))
                throw ParseError("non-finite value", a);
            values.push_back(v);
            ++count;

            if (field_end == line_end)
                break;
            cur = field_end + 1;
        }

        if (cols < 0)
            cols = count;
        else if (count != cols)
            throw ParseError("row " + std::to_string(rows) + " has " + std::to_string(count)
                                 + " fields, expected " + std::to_string(cols),
                             line_start);
        ++rows;
        pos = line_end + 1;
    }

    Matrix A(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            A(i, j) = values[static_cast<std::size_t>(i * cols + j)];
    return A;
}

inline void write_matrix(const std::filesystem::path& path, const Matrix& A, MatrixFormat fmt)
{
    ensure_finite(A, "write_matrix");
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw std::runtime_error("cannot open for writing: " + path.string());
    const std::string bytes = fmt == MatrixFormat::bin ? encode_bin(A) : encode_csv(A);
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os)
        throw std::runtime_error("write failed: " + path.string());
}

inline Matrix read_matrix(const std::filesystem::path& path, MatrixFormat fmt)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open for reading: " + path.string());
    const std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return fmt == MatrixFormat::bin ? decode_bin(bytes) : decode_csv(bytes);
}

} // namespace frsvt

#endif // FRSVT_MATRIX_IO_HPP
