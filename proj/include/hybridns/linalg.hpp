#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

#include <vector>

namespace hybridns {

/// Dense LU with partial pivoting that rejects numerically singular input:
/// a pivot below 1e-14 * max|A| raises SingularMatrix with the pivot row.
class DenseLU {
public:
  DenseLU() = default;
  explicit DenseLU(const Eigen::MatrixXd& a) { compute(a); }

  void compute(const Eigen::MatrixXd& a);
  [[nodiscard]] Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const { return lu_.solve(b); }
  [[nodiscard]] Eigen::Index rows() const { return lu_.rows(); }

private:
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

[[nodiscard]] Eigen::VectorXd dense_lu_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed-row matrix. Column indices are sorted within each row and
/// unique.
class SparseMatrix {
public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), offsets_(rows + 1, 0) {}

  /// Duplicates are summed in input order, so the result does not depend on
  /// anything but the triplet sequence.
  [[nodiscard]] static SparseMatrix from_triplets(int rows, int cols, const std::vector<Triplet>& t);

  [[nodiscard]] int rows() const { return rows_; }
  [[nodiscard]] int cols() const { return cols_; }
  [[nodiscard]] long nnz() const { return static_cast<long>(values_.size()); }
  [[nodiscard]] const std::vector<long>& offsets() const { return offsets_; }
  [[nodiscard]] const std::vector<int>& columns() const { return columns_; }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }

  /// Entry (i, j), zero when not stored.
  [[nodiscard]] double coeff(int i, int j) const;
  [[nodiscard]] Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
  [[nodiscard]] Eigen::MatrixXd to_dense() const;
  [[nodiscard]] double max_abs() const;

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<long> offsets_{0};
  std::vector<int> columns_;
  std::vector<double> values_;
};

/// Direct sparse solve with a fill-reducing ordering.
[[nodiscard]] Eigen::VectorXd sparse_lu_solve(const SparseMatrix& a, const Eigen::VectorXd& b);

/// Name of the sparse factorization backend in use.
[[nodiscard]] const char* sparse_backend();

}  // namespace hybridns
