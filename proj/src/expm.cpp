#include "leakycav/expm.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace leakycav {

namespace {

template <typename Mat>
void pade_low(const Mat& A, int m, Mat& U, Mat& V) {
  static const double b3[] = {120., 60., 12., 1.};
  static const double b5[] = {30240., 15120., 3360., 420., 30., 1.};
  static const double b7[] = {17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.};
  static const double b9[] = {17643225600., 8821612800., 2075673600., 302702400., 30270240.,
                              2162160.,     110880.,     3960.,       90.,        1.};
  const double* b = m == 3 ? b3 : m == 5 ? b5 : m == 7 ? b7 : b9;
  const Mat I = Mat::Identity(A.rows(), A.cols());
  const Mat A2 = A * A;
  Mat P = I;  // A^{2k}
  Mat u = b[1] * I;
  Mat v = b[0] * I;
  for (int k = 1; 2 * k <= m; ++k) {
    P = P * A2;
    u += b[2 * k + 1] * P;
    v += b[2 * k] * P;
  }
  U = A * u;
  V = v;
}

template <typename Mat>
void pade13(const Mat& A, Mat& U, Mat& V) {
  static const double b[] = {64764752532480000., 32382376266240000., 7771770303897600.,
                             1187353796428800.,  129060195264000.,   10559470521600.,
                             670442572800.,      33522128640.,       1323241920.,
                             40840800.,          960960.,            16380.,
                             182.,               1.};
  const Mat I = Mat::Identity(A.rows(), A.cols());
  const Mat A2 = A * A;
  const Mat A4 = A2 * A2;
  const Mat A6 = A4 * A2;
  Mat tmp = b[13] * A6 + b[11] * A4 + b[9] * A2;
  U = A * (A6 * tmp + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
  tmp = b[12] * A6 + b[10] * A4 + b[8] * A2;
  V = A6 * tmp + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
}

template <typename Mat>
Mat expm_impl(const Mat& A) {
  const double norm = A.cwiseAbs().colwise().sum().maxCoeff();
  static const double theta[] = {1.495585217958292e-2, 2.539398330063230e-1,
                                 9.504178996162932e-1, 2.097847961257068e0};
  static const int degree[] = {3, 5, 7, 9};
  Mat U, V;
  for (int i = 0; i < 4; ++i) {
    if (norm <= theta[i]) {
      pade_low(A, degree[i], U, V);
      return (V - U).partialPivLu().solve(V + U);
    }
  }
  constexpr double theta13 = 5.371920351148152;
  int s = 0;
  if (norm > theta13) s = static_cast<int>(std::ceil(std::log2(norm / theta13)));
  const Mat As = A * std::ldexp(1.0, -s);
  pade13(As, U, V);
  Mat X = (V - U).partialPivLu().solve(V + U);
  for (int i = 0; i < s; ++i) X = X * X;
  return X;
}

}  // namespace

Eigen::MatrixXd expm(const Eigen::MatrixXd& A) { return expm_impl(A); }
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& A) { return expm_impl(A); }

Eigen::MatrixXcd expm_eig(const Eigen::MatrixXd& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(A);
  const Eigen::MatrixXcd V = es.eigenvectors();
  const Eigen::VectorXcd lam = es.eigenvalues().array().exp();
  return V * lam.asDiagonal() * V.inverse();
}

}  // namespace leakycav
