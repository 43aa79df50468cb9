#include <lapacke.h>

#include <algorithm>
#include <sstream>
#include <vector>

#include "vortex/errors.hpp"
#include "vortex/spectra.hpp"

namespace vortex::spectra {

EigenSystem eig_general(const Eigen::MatrixXd& A, bool want_vectors) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  Eigen::MatrixXd a = A;
  std::vector<double> wr(n), wi(n);
  Eigen::MatrixXd vr;
  if (want_vectors) vr.resize(n, n);
  const lapack_int info =
      LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', want_vectors ? 'V' : 'N', n, a.data(), n, wr.data(),
                    wi.data(), nullptr, 1, want_vectors ? vr.data() : nullptr, want_vectors ? n : 1);
  if (info != 0) {
    std::ostringstream os;
    os << "dgeev failed with info=" << info << " (n=" << n << ")";
    throw Error(ErrorCode::EigensolverFailure, os.str());
  }
  EigenSystem out;
  out.values.resize(n);
  for (lapack_int i = 0; i < n; ++i) out.values[i] = {wr[i], wi[i]};
  if (!want_vectors) return out;

  // Complex pairs are stored as (re, im) in consecutive columns.
  out.vectors.resize(n, n);
  for (lapack_int j = 0; j < n; ++j) {
    if (wi[j] == 0.0) {
      out.vectors.col(j) = vr.col(j).cast<std::complex<double>>();
    } else {
      const Eigen::VectorXcd v =
          vr.col(j).cast<std::complex<double>>() + std::complex<double>(0, 1) * vr.col(j + 1);
      out.vectors.col(j) = v;
      out.vectors.col(j + 1) = v.conjugate();
      ++j;
    }
  }
  for (lapack_int j = 0; j < n; ++j) out.vectors.col(j).normalize();
  return out;
}

EigenSystem eig_general_selected(const Eigen::MatrixXd& A,
                                 const std::function<bool(std::complex<double>)>& select,
                                 std::vector<bool>* have_vector) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  Eigen::MatrixXd a = A;
  std::vector<double> tau(std::max<lapack_int>(n - 1, 1));
  auto check = [n](lapack_int info, const char* what) {
    if (info != 0) {
      std::ostringstream os;
      os << what << " failed with info=" << info << " (n=" << n << ")";
      throw Error(ErrorCode::EigensolverFailure, os.str());
    }
  };
  check(LAPACKE_dgehrd(LAPACK_COL_MAJOR, n, 1, n, a.data(), n, tau.data()), "dgehrd");
  Eigen::MatrixXd H = a;
  for (lapack_int j = 0; j < n; ++j)
    for (lapack_int i = j + 2; i < n; ++i) H(i, j) = 0.0;
  Eigen::MatrixXd T = H;
  std::vector<double> wr(n), wi(n);
  check(LAPACKE_dhseqr(LAPACK_COL_MAJOR, 'E', 'N', n, 1, n, T.data(), n, wr.data(), wi.data(),
                       nullptr, 1),
        "dhseqr");

  EigenSystem out;
  out.values.resize(n);
  for (lapack_int i = 0; i < n; ++i) out.values[i] = {wr[i], wi[i]};

  std::vector<lapack_logical> sel(n, 0);
  lapack_int cols = 0;
  for (lapack_int j = 0; j < n; ++j) {
    if (!select(out.values[j])) continue;
    if (wi[j] != 0.0) {
      // A complex pair is addressed through its first member.
      const lapack_int first = wi[j] > 0.0 ? j : j - 1;
      if (!sel[first]) cols += 2;
      sel[first] = 1;
    } else {
      sel[j] = 1;
      ++cols;
    }
  }
  out.vectors = Eigen::MatrixXcd::Zero(n, n);
  if (have_vector) have_vector->assign(static_cast<std::size_t>(n), false);
  if (cols == 0) return out;

  // LAPACKE scans vr for NaN on entry, so it must be initialised.
  Eigen::MatrixXd vr = Eigen::MatrixXd::Zero(n, cols);
  std::vector<double> wr_copy = wr;
  std::vector<lapack_int> ifaill(cols), ifailr(cols);
  lapack_int used = 0;
  const lapack_int info =
      LAPACKE_dhsein(LAPACK_COL_MAJOR, 'R', 'Q', 'N', sel.data(), n, H.data(), n, wr_copy.data(),
                     wi.data(), nullptr, 1, vr.data(), n, cols, &used, ifaill.data(),
                     ifailr.data());
  if (info < 0) check(info, "dhsein");
  check(LAPACKE_dormhr(LAPACK_COL_MAJOR, 'L', 'N', n, cols, 1, n, a.data(), n, tau.data(),
                       vr.data(), n),
        "dormhr");

  lapack_int c = 0;
  for (lapack_int j = 0; j < n; ++j) {
    if (!sel[j]) continue;
    if (wi[j] == 0.0) {
      if (ifailr[c] == 0) {
        out.vectors.col(j) = vr.col(c).normalized().cast<std::complex<double>>();
        if (have_vector) (*have_vector)[j] = true;
      }
      ++c;
    } else {
      if (ifailr[c] == 0 && ifailr[c + 1] == 0) {
        const Eigen::VectorXcd v = (vr.col(c).cast<std::complex<double>>() +
                                    std::complex<double>(0, 1) * vr.col(c + 1))
                                       .normalized();
        out.vectors.col(j) = v;
        out.vectors.col(j + 1) = v.conjugate();
        if (have_vector) (*have_vector)[j] = (*have_vector)[j + 1] = true;
      }
      c += 2;
    }
  }
  return out;
}

Eigen::VectorXd eig_symmetric(const Eigen::MatrixXd& A) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  Eigen::MatrixXd a = A;
  Eigen::VectorXd w(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', n, a.data(), n, w.data());
  if (info != 0) {
    std::ostringstream os;
    os << "dsyevd failed with info=" << info << " (n=" << n << ")";
    throw Error(ErrorCode::EigensolverFailure, os.str());
  }
  return w;
}

}  // namespace vortex::spectra
