#include "hybridns/linalg.hpp"

#include "hybridns/error.hpp"

#include <Eigen/SparseCore>
#ifdef HYBRIDNS_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#else
#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>
#endif

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace hybridns {

void DenseLU::compute(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("DenseLU: matrix is not square");
  const double scale = a.size() > 0 ? a.cwiseAbs().maxCoeff() : 0.0;
  lu_.compute(a);
  const auto& u = lu_.matrixLU();
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    if (!(std::abs(u(i, i)) > 1e-14 * scale)) {
      throw SingularMatrix("DenseLU: pivot " + std::to_string(i) + " below 1e-14 max|A|", static_cast<long>(i));
    }
  }
}

Eigen::VectorXd dense_lu_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (b.size() != a.rows()) throw InvalidArgument("dense_lu_solve: size mismatch");
  return DenseLU(a).solve(b);
}

// ---------------------------------------------------------------------------

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, const std::vector<Triplet>& t) {
  SparseMatrix m(rows, cols);
  // Counting sort by row keeps the input order within each row.
  std::vector<long> count(rows + 1, 0);
  for (const Triplet& e : t) {
    if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols) {
      throw InvalidArgument("SparseMatrix::from_triplets: index out of range");
    }
    ++count[e.row + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<int> order(t.size());
  {
    std::vector<long> next(count.begin(), count.end() - 1);
    for (std::size_t i = 0; i < t.size(); ++i) order[next[t[i].row]++] = static_cast<int>(i);
  }

  m.columns_.reserve(t.size());
  m.values_.reserve(t.size());
  std::vector<int> row_entries;
  for (int r = 0; r < rows; ++r) {
    row_entries.assign(order.begin() + count[r], order.begin() + count[r + 1]);
    std::stable_sort(row_entries.begin(), row_entries.end(),
                     [&t](int a, int b) { return t[a].col < t[b].col; });
    for (std::size_t i = 0; i < row_entries.size();) {
      const int col = t[row_entries[i]].col;
      double v = 0.0;
      for (; i < row_entries.size() && t[row_entries[i]].col == col; ++i) v += t[row_entries[i]].value;
      m.columns_.push_back(col);
      m.values_.push_back(v);
    }
    m.offsets_[r + 1] = static_cast<long>(m.columns_.size());
  }
  return m;
}

double SparseMatrix::coeff(int i, int j) const {
  const auto begin = columns_.begin() + offsets_[i];
  const auto end = columns_.begin() + offsets_[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  return it != end && *it == j ? values_[it - columns_.begin()] : 0.0;
}

Eigen::VectorXd SparseMatrix::multiply(const Eigen::VectorXd& x) const {
  if (x.size() != cols_) throw InvalidArgument("SparseMatrix::multiply: size mismatch");
  Eigen::VectorXd y(rows_);
  for (int r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (long k = offsets_[r]; k < offsets_[r + 1]; ++k) s += values_[k] * x[columns_[k]];
    y[r] = s;
  }
  return y;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows_, cols_);
  for (int r = 0; r < rows_; ++r) {
    for (long k = offsets_[r]; k < offsets_[r + 1]; ++k) d(r, columns_[k]) = values_[k];
  }
  return d;
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

// ---------------------------------------------------------------------------

const char* sparse_backend() {
#ifdef HYBRIDNS_HAVE_UMFPACK
  return "umfpack";
#else
  return "eigen-sparselu";
#endif
}

Eigen::VectorXd sparse_lu_solve(const SparseMatrix& a, const Eigen::VectorXd& b) {
  if (a.rows() != a.cols()) throw InvalidArgument("sparse_lu_solve: matrix is not square");
  if (b.size() != a.rows()) throw InvalidArgument("sparse_lu_solve: size mismatch");
  if (a.rows() == 0) return Eigen::VectorXd();

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(a.nnz()));
  for (int r = 0; r < a.rows(); ++r) {
    for (long k = a.offsets()[r]; k < a.offsets()[r + 1]; ++k) trips.emplace_back(r, a.columns()[k], a.values()[k]);
  }
  Eigen::SparseMatrix<double> m(a.rows(), a.cols());
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();

#ifdef HYBRIDNS_HAVE_UMFPACK
  Eigen::UmfPackLU<Eigen::SparseMatrix<double>> lu;
#else
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
#endif
  lu.compute(m);
  if (lu.info() != Eigen::Success) throw SingularMatrix("sparse_lu_solve: factorization failed", -1);
  Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    throw SingularMatrix("sparse_lu_solve: solve failed", -1);
  }
  return x;
}

}  // namespace hybridns
