#include "polwire/matrix.hpp"

#include <string>

#include "polwire/errors.hpp"

// Fortran LAPACK / OpenBLAS entry points. Linking against OpenBLAS only
// keeps every BLAS and LAPACK call on the same (thread-controllable) backend.
extern "C" {
void zheevd_(const char* jobz, const char* uplo, const int* n, std::complex<double>* a,
             const int* lda, double* w, std::complex<double>* work, const int* lwork,
             double* rwork, const int* lrwork, int* iwork, const int* liwork, int* info);
void zgemv_(const char* trans, const int* m, const int* n, const std::complex<double>* alpha,
            const std::complex<double>* a, const int* lda, const std::complex<double>* x,
            const int* incx, const std::complex<double>* beta, std::complex<double>* y,
            const int* incy);
void openblas_set_num_threads(int n);
}

namespace polwire {

EighResult eigh(ComplexMatrix matrix) {
  if (matrix.rows() != matrix.cols()) {
    throw DimensionError("eigh: matrix must be square");
  }
  const int n = static_cast<int>(matrix.rows());
  EighResult result;
  result.values.resize(n);
  if (n == 0) return result;

  int info = 0;
  int lwork = -1, lrwork = -1, liwork = -1;
  cplx work_query;
  double rwork_query;
  int iwork_query;
  zheevd_("V", "L", &n, matrix.data(), &n, result.values.data(), &work_query, &lwork,
          &rwork_query, &lrwork, &iwork_query, &liwork, &info);
  if (info != 0) throw ConvergenceError("zheevd workspace query failed");

  lwork = static_cast<int>(work_query.real());
  lrwork = static_cast<int>(rwork_query);
  liwork = iwork_query;
  std::vector<cplx> work(lwork);
  std::vector<double> rwork(lrwork);
  std::vector<int> iwork(liwork);
  zheevd_("V", "L", &n, matrix.data(), &n, result.values.data(), work.data(), &lwork,
          rwork.data(), &lrwork, iwork.data(), &liwork, &info);
  if (info != 0) {
    throw ConvergenceError("zheevd failed to converge, info=" + std::to_string(info));
  }
  result.vectors = std::move(matrix);
  return result;
}

std::vector<cplx> matvec(const ComplexMatrix& a, std::span<const cplx> x, bool adjoint) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  if (x.size() != static_cast<std::size_t>(adjoint ? m : n)) {
    throw DimensionError("matvec: operand length mismatch");
  }
  std::vector<cplx> y(adjoint ? n : m);
  const cplx one{1.0, 0.0}, zero{0.0, 0.0};
  const int inc = 1;
  zgemv_(adjoint ? "C" : "N", &m, &n, &one, a.data(), &m, x.data(), &inc, &zero, y.data(),
         &inc);
  return y;
}

void matvec_rows(const ComplexMatrix& a, std::size_t m, std::span<const cplx> x,
                 std::span<cplx> y) {
  if (x.size() != a.cols() || y.size() != m || m > a.rows()) {
    throw DimensionError("matvec_rows: operand length mismatch");
  }
  const int mm = static_cast<int>(m);
  const int n = static_cast<int>(a.cols());
  const int lda = static_cast<int>(a.rows());
  const cplx one{1.0, 0.0}, zero{0.0, 0.0};
  const int inc = 1;
  zgemv_("N", &mm, &n, &one, a.data(), &lda, x.data(), &inc, &zero, y.data(), &inc);
}

void use_single_threaded_blas() { openblas_set_num_threads(1); }

}  // namespace polwire
