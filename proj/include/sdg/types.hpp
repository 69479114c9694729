#pragma once

/// @file types.hpp
/// @brief Small geometric aliases and the exception hierarchy shared by all modules.

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace sdg {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or degenerate geometry (inverted cells, bad tags, glue mismatch).
class MeshError : public Error {
public:
    using Error::Error;
};

/// Misuse of an API: bad arguments, out-of-range ids, unsupported options.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Assembly integrity failures (empty rows, non-invertible coefficients).
class AssemblyError : public Error {
public:
    using Error::Error;
};

/// Linear algebra failures (singular factorization, stagnation).
class SolverError : public Error {
public:
    using Error::Error;
};

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace sdg
