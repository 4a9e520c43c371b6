#include "fstwfr/error.hpp"

#include "fstwfr/matrix.hpp"

namespace fstwfr {

std::string_view ToString(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kNotFound: return "not_found";
    case ErrorKind::kMismatch: return "mismatch";
  }
  return "unknown";
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  Require(data_.size() == rows_ * cols_, "matrix data size does not match shape");
}

}  // namespace fstwfr
