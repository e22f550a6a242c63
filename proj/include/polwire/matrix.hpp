#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace polwire {

using cplx = std::complex<double>;

// Dense column-major complex matrix, sized once at construction.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), store_(rows * cols) {}

  cplx& operator()(std::size_t i, std::size_t j) { return store_[j * rows_ + i]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return store_[j * rows_ + i]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  cplx* data() { return store_.data(); }
  const cplx* data() const { return store_.data(); }
  std::span<const cplx> column(std::size_t j) const {
    return {store_.data() + j * rows_, rows_};
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> store_;
};

struct EighResult {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // orthonormal columns
};

// Full eigendecomposition of a Hermitian matrix (divide and conquer).
// Consumes its argument. Throws ConvergenceError if LAPACK fails.
EighResult eigh(ComplexMatrix matrix);

// y = op(A) x with op = A or A^H. Requires len(x) == cols/rows accordingly.
std::vector<cplx> matvec(const ComplexMatrix& a, std::span<const cplx> x, bool adjoint = false);

// y = A[0:m,:] x, the first m rows only (column-major submatrix product).
void matvec_rows(const ComplexMatrix& a, std::size_t m, std::span<const cplx> x,
                 std::span<cplx> y);

// Pins the BLAS backend to a single thread for the calling process.
// Ensemble execution uses this so results do not depend on worker count.
void use_single_threaded_blas();

}  // namespace polwire
