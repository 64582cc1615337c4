#include "crl/core/matrix.hpp"

#include <cmath>

#include "crl/core/error.hpp"

namespace crl {

std::vector<std::string> index_ids(std::size_t n) {
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  return ids;
}

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dims, std::vector<float> data)
    : EmbeddingMatrix(rows, dims, std::move(data), index_ids(rows)) {}

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dims, std::vector<float> data,
                                 std::vector<std::string> ids)
    : rows_(rows), dims_(dims), data_(std::move(data)), ids_(std::move(ids)) {
  if (rows_ * dims_ != data_.size()) {
    throw ShapeError("matrix payload holds " + std::to_string(data_.size()) +
                         " values, expected " + std::to_string(rows_) + "x" +
                         std::to_string(dims_),
                     {{"rows", static_cast<std::int64_t>(rows_)},
                      {"dims", static_cast<std::int64_t>(dims_)},
                      {"values", static_cast<std::int64_t>(data_.size())}});
  }
  if (ids_.size() != rows_) {
    throw Error(ErrorKind::consistency,
                "matrix has " + std::to_string(rows_) + " rows but " +
                    std::to_string(ids_.size()) + " ids",
                {{"rows", static_cast<std::int64_t>(rows_)},
                 {"ids", static_cast<std::int64_t>(ids_.size())}});
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw Error(ErrorKind::invalid_value,
                  "non-finite value at row " + std::to_string(i / (dims_ ? dims_ : 1)),
                  {{"index", static_cast<std::int64_t>(i)}});
    }
  }
  index_.reserve(ids_.size());
  for (std::size_t r = 0; r < ids_.size(); ++r) {
    if (!index_.emplace(ids_[r], r).second) {
      throw Error(ErrorKind::consistency, "duplicate row id '" + ids_[r] + "'",
                  {{"id", ids_[r]}});
    }
  }
}

EmbeddingMatrix EmbeddingMatrix::zeros(std::size_t rows, std::size_t dims) {
  return EmbeddingMatrix(rows, dims, std::vector<float>(rows * dims, 0.0f));
}

EmbeddingMatrix EmbeddingMatrix::from_rows(const std::vector<std::vector<float>>& rows) {
  const std::size_t dims = rows.empty() ? 0 : rows.front().size();
  std::vector<float> data;
  data.reserve(rows.size() * dims);
  for (const auto& r : rows) {
    if (r.size() != dims) {
      throw ShapeError("ragged rows: expected " + std::to_string(dims) + " columns, got " +
                       std::to_string(r.size()));
    }
    data.insert(data.end(), r.begin(), r.end());
  }
  return EmbeddingMatrix(rows.size(), dims, std::move(data));
}

EmbeddingMatrix EmbeddingMatrix::identity(std::size_t n) {
  std::vector<float> data(n * n, 0.0f);
  for (std::size_t i = 0; i < n; ++i) data[i * n + i] = 1.0f;
  return EmbeddingMatrix(n, n, std::move(data));
}

std::optional<std::size_t> EmbeddingMatrix::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t EmbeddingMatrix::index_of(std::string_view id) const {
  if (auto idx = find(id)) return *idx;
  throw Error(ErrorKind::consistency, "unknown row id '" + std::string(id) + "'",
              {{"id", std::string(id)}});
}

EmbeddingMatrix EmbeddingMatrix::with_ids(std::vector<std::string> ids) const {
  return EmbeddingMatrix(rows_, dims_, data_, std::move(ids));
}

EmbeddingMatrix EmbeddingMatrix::select_rows(std::span<const std::size_t> indices) const {
  std::vector<float> data;
  data.reserve(indices.size() * dims_);
  std::vector<std::string> ids;
  ids.reserve(indices.size());
  for (std::size_t idx : indices) {
    if (idx >= rows_) {
      throw ShapeError("row index " + std::to_string(idx) + " out of range for " +
                       shape_string());
    }
    auto r = row(idx);
    data.insert(data.end(), r.begin(), r.end());
    ids.push_back(ids_[idx]);
  }
  return EmbeddingMatrix(indices.size(), dims_, std::move(data), std::move(ids));
}

std::string EmbeddingMatrix::shape_string() const {
  return std::to_string(rows_) + "x" + std::to_string(dims_);
}

bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
  return a.rows_ == b.rows_ && a.dims_ == b.dims_ && a.data_ == b.data_ && a.ids_ == b.ids_;
}

}  // namespace crl
