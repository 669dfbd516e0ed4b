/* A(i) := B(i, j) * C(j) * (i = 0) * (j >= 0) * (-j + n_j - 1 >= 0) */
#include <stdint.h>

static inline int64_t pp_floord(int64_t a, int64_t b) { int64_t q = a / b; return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q; }
static inline int64_t pp_ceild(int64_t a, int64_t b) { return -pp_floord(-a, b); }
static inline int64_t pp_max(int64_t a, int64_t b) { return a > b ? a : b; }
static inline int64_t pp_min(int64_t a, int64_t b) { return a < b ? a : b; }
static inline int64_t pp_mod(int64_t a, int64_t m) { int64_t r = a % m; return r < 0 ? r + m : r; }

void A_0(int64_t n_i, int64_t n_j, double* buf0, double* buf1, const double* buf2, const double* buf3, const double* buf4) {
  const int64_t r0_0 = 0;
  const int64_t r1_0 = 0;
  const int64_t r2_0 = 0;
  {
    int64_t i = 0;
    const int64_t r0_1 = r0_0;
    const int64_t r1_1 = r1_0;
    const int64_t r2_1 = r2_0;
    for (int64_t j = 0; j <= n_j - 1; j++) {
      const int64_t r0_2 = r0_1;
      const int64_t r1_2 = r1_1 + j;
      const int64_t r2_2 = r2_1 + j;
      const int64_t r0 = r0_2;
      const int64_t r1 = r1_2;
      const int64_t r2 = r2_2;
      buf0[r0] += buf2[r1] * buf4[r2];
    }
  }
}
