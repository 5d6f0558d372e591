#pragma once

#include <cstddef>

namespace pawnprint::nn {

// Small row-major GEMM kernels, templated so the finite-difference oracle
// can run the identical math in double. Shapes here are tiny by BLAS
// standards (channels x batch*64); a register-blocked loop with FMA-friendly
// inner axpys is plenty.

// C[M x N] += A[M x K] * B[K x N]
template <typename T>
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const T* a,
             const T* b, T* c) {
  constexpr std::size_t kRowBlock = 4;
  std::size_t i = 0;
  for (; i + kRowBlock <= m; i += kRowBlock) {
    T* c0 = c + (i + 0) * n;
    T* c1 = c + (i + 1) * n;
    T* c2 = c + (i + 2) * n;
    T* c3 = c + (i + 3) * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T a0 = a[(i + 0) * k + p];
      const T a1 = a[(i + 1) * k + p];
      const T a2 = a[(i + 2) * k + p];
      const T a3 = a[(i + 3) * k + p];
      const T* bp = b + p * n;
      for (std::size_t j = 0; j < n; ++j) {
        const T bj = bp[j];
        c0[j] += a0 * bj;
        c1[j] += a1 * bj;
        c2[j] += a2 * bj;
        c3[j] += a3 * bj;
      }
    }
  }
  for (; i < m; ++i) {
    T* ci = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T ai = a[i * k + p];
      const T* bp = b + p * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += ai * bp[j];
    }
  }
}

// C[M x K] += A[M x N] * B[K x N]^T  (i.e. C[i][p] += sum_j A[i][j]*B[p][j])
template <typename T>
void gemm_nt(std::size_t m, std::size_t k, std::size_t n, const T* a,
             const T* b, T* c) {
  for (std::size_t i = 0; i < m; ++i) {
    const T* ai = a + i * n;
    std::size_t p = 0;
    for (; p + 2 <= k; p += 2) {
      const T* b0 = b + (p + 0) * n;
      const T* b1 = b + (p + 1) * n;
      T acc0 = 0, acc1 = 0;
      for (std::size_t j = 0; j < n; ++j) {
        acc0 += ai[j] * b0[j];
        acc1 += ai[j] * b1[j];
      }
      c[i * k + p + 0] += acc0;
      c[i * k + p + 1] += acc1;
    }
    for (; p < k; ++p) {
      const T* bp = b + p * n;
      T acc = 0;
      for (std::size_t j = 0; j < n; ++j) acc += ai[j] * bp[j];
      c[i * k + p] += acc;
    }
  }
}

// C[K x N] += A[M x K]^T * B[M x N]  (i.e. C[p][j] += sum_i A[i][p]*B[i][j])
template <typename T>
void gemm_tn(std::size_t k, std::size_t n, std::size_t m, const T* a,
             const T* b, T* c) {
  for (std::size_t i = 0; i < m; ++i) {
    const T* bi = b + i * n;
    const T* ai = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const T ap = ai[p];
      if (ap == T(0)) continue;
      T* cp = c + p * n;
      for (std::size_t j = 0; j < n; ++j) cp[j] += ap * bi[j];
    }
  }
}

}  // namespace pawnprint::nn
