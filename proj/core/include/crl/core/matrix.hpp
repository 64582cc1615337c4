#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace crl {

/// Dense row-major matrix of 32-bit embedding vectors with stable row ids.
///
/// Immutable after construction. The constructor validates shape, id
/// uniqueness and finiteness, so every live instance satisfies those
/// invariants. Rows without explicit ids are named by their index.
class EmbeddingMatrix {
public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t rows, std::size_t dims, std::vector<float> data);
  EmbeddingMatrix(std::size_t rows, std::size_t dims, std::vector<float> data,
                  std::vector<std::string> ids);

  static EmbeddingMatrix zeros(std::size_t rows, std::size_t dims);
  static EmbeddingMatrix from_rows(const std::vector<std::vector<float>>& rows);
  static EmbeddingMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dims() const noexcept { return dims_; }
  bool empty() const noexcept { return rows_ == 0; }

  std::span<const float> data() const noexcept { return data_; }
  std::span<const float> row(std::size_t r) const noexcept {
    return {data_.data() + r * dims_, dims_};
  }
  float at(std::size_t r, std::size_t c) const noexcept { return data_[r * dims_ + c]; }

  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::string& id(std::size_t r) const noexcept { return ids_[r]; }
  std::optional<std::size_t> find(std::string_view id) const;
  /// Index of `id`; throws ConsistencyError when absent.
  std::size_t index_of(std::string_view id) const;

  /// Same payload, new ids.
  EmbeddingMatrix with_ids(std::vector<std::string> ids) const;
  /// Rows picked by index, in the given order (ids carried along).
  EmbeddingMatrix select_rows(std::span<const std::size_t> indices) const;

  std::string shape_string() const;

  friend bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b);

private:
  std::size_t rows_ = 0;
  std::size_t dims_ = 0;
  std::vector<float> data_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
};

std::vector<std::string> index_ids(std::size_t n);

}  // namespace crl
