#ifndef FRSVT_MATRIX_HPP
#define FRSVT_MATRIX_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace frsvt {

// Column-major dense storage; every kernel walks columns.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

//
// error types
//

class InvalidArgument : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

class SingularMatrixError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class NonConvergenceError : public std::runtime_error
{
public:
    NonConvergenceError(const std::string& what, int iterations, double last_residual)
        : std::runtime_error(what + " (iterations " + std::to_string(iterations) + ", residual "
                             + std::to_string(last_residual) + ")"),
          iterations_(iterations),
          last_residual_(last_residual)
    {}

    int iterations() const noexcept { return iterations_; }
    double last_residual() const noexcept { return last_residual_; }

private:
    int iterations_;
    double last_residual_;
};

class UnsupportedError : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

class ParseError : public std::runtime_error
{
public:
    ParseError(const std::string& what, std::size_t byte_offset)
        : std::runtime_error(what + " at byte " + std::to_string(byte_offset)),
          offset_(byte_offset)
    {}

    std::size_t byte_offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

inline void require(bool cond, std::string_view msg)
{
    if (!cond)
        throw InvalidArgument(std::string(msg));
}

inline bool all_finite(const Matrix& A)
{
    return A.allFinite();
}

// Entry-point check: operands must not carry NaN/Inf.
inline void ensure_finite(const Matrix& A, std::string_view what)
{
    if (!A.allFinite())
        throw InvalidArgument(std::string(what) + ": matrix has non-finite entries");
}

// ceil() that ignores representation noise such as 0.1 * 200 = 20.000000000000004
inline Index ceil_count(double x)
{
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x)))
        return static_cast<Index>(r);
    return static_cast<Index>(std::ceil(x));
}

inline Matrix identity(Index n)
{
    return Matrix::Identity(n, n);
}

} // namespace frsvt

#endif // FRSVT_MATRIX_HPP
