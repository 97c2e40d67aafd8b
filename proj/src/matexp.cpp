#include "delayctl/matexp.hpp"

#include <Eigen/LU>
#include <cmath>

namespace delayctl {

namespace {

// Pade numerator/denominator split: U odd part, V even part, so that
// exp(A) ~ (V - U)^(-1) (V + U).
void pade3(const Mat& A, Mat& U, Mat& V) {
  static const double b[] = {120., 60., 12., 1.};
  const Mat A2 = A * A;
  const Mat I = Mat::Identity(A.rows(), A.cols());
  U = A * (b[3] * A2 + b[1] * I);
  V = b[2] * A2 + b[0] * I;
}

void pade5(const Mat& A, Mat& U, Mat& V) {
  static const double b[] = {30240., 15120., 3360., 420., 30., 1.};
  const Mat A2 = A * A;
  const Mat A4 = A2 * A2;
  const Mat I = Mat::Identity(A.rows(), A.cols());
  U = A * (b[5] * A4 + b[3] * A2 + b[1] * I);
  V = b[4] * A4 + b[2] * A2 + b[0] * I;
}

void pade7(const Mat& A, Mat& U, Mat& V) {
  static const double b[] = {17297280., 8648640., 1995840., 277200.,
                             25200.,    1512.,    56.,      1.};
  const Mat A2 = A * A;
  const Mat A4 = A2 * A2;
  const Mat A6 = A4 * A2;
  const Mat I = Mat::Identity(A.rows(), A.cols());
  U = A * (b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
  V = b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
}

void pade9(const Mat& A, Mat& U, Mat& V) {
  static const double b[] = {17643225600., 8821612800., 2075673600.,
                             302702400.,   30270240.,   2162160.,
                             110880.,      3960.,       90.,
                             1.};
  const Mat A2 = A * A;
  const Mat A4 = A2 * A2;
  const Mat A6 = A4 * A2;
  const Mat A8 = A6 * A2;
  const Mat I = Mat::Identity(A.rows(), A.cols());
  U = A * (b[9] * A8 + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
  V = b[8] * A8 + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
}

void pade13(const Mat& A, Mat& U, Mat& V) {
  static const double b[] = {64764752532480000., 32382376266240000.,
                             7771770303897600.,  1187353796428800.,
                             129060195264000.,   10559470521600.,
                             670442572800.,      33522128640.,
                             1323241920.,        40840800.,
                             960960.,            16380.,
                             182.,               1.};
  const Mat A2 = A * A;
  const Mat A4 = A2 * A2;
  const Mat A6 = A4 * A2;
  const Mat I = Mat::Identity(A.rows(), A.cols());
  U = A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 +
           b[5] * A4 + b[3] * A2 + b[1] * I);
  V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 +
      b[2] * A2 + b[0] * I;
}

}  // namespace

Mat expm(const Mat& A) {
  if (A.rows() != A.cols()) {
    throw ContractViolation{"expm: matrix must be square"};
  }
  if (A.rows() == 0) return A;
  if (!A.allFinite()) throw ContractViolation{"expm: non-finite entries"};

  const double norm = A.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
  Mat U, V;
  int squarings = 0;
  if (norm < 1.495585217958292e-2) {
    pade3(A, U, V);
  } else if (norm < 2.539398330063230e-1) {
    pade5(A, U, V);
  } else if (norm < 9.504178996162932e-1) {
    pade7(A, U, V);
  } else if (norm < 2.097847961257068) {
    pade9(A, U, V);
  } else {
    const double theta13 = 5.371920351148152;
    if (norm > theta13) {
      squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
    }
    const Mat scaled = A * std::pow(2.0, -squarings);
    pade13(scaled, U, V);
  }

  Mat numer = V + U;
  Mat denom = V - U;
  Mat result = denom.partialPivLu().solve(numer);
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

}  // namespace delayctl
