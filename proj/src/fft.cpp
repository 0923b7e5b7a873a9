#include "hrqhd/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace hrqhd::fft {

namespace {

enum class Kind { R2C, C2R, C2CF, C2CB, C2D_F, C2D_B };

struct PlanCache {
  std::mutex mutex;
  std::map<std::tuple<Kind, int, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto &kv : plans)
      fftw_destroy_plan(kv.second);
  }

  fftw_plan get(Kind kind, int n, int howmany) {
    std::lock_guard lock(mutex);
    auto key = std::make_tuple(kind, n, howmany);
    if (auto it = plans.find(key); it != plans.end())
      return it->second;
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = nullptr;
    const int nc = n / 2 + 1;
    switch (kind) {
    case Kind::R2C: {
      double *in = fftw_alloc_real(std::size_t(n) * howmany);
      fftw_complex *out = fftw_alloc_complex(std::size_t(nc) * howmany);
      p = fftw_plan_many_dft_r2c(1, &n, howmany, in, nullptr, 1, n, out, nullptr, 1, nc, flags);
      fftw_free(in);
      fftw_free(out);
      break;
    }
    case Kind::C2R: {
      fftw_complex *in = fftw_alloc_complex(std::size_t(nc) * howmany);
      double *out = fftw_alloc_real(std::size_t(n) * howmany);
      p = fftw_plan_many_dft_c2r(1, &n, howmany, in, nullptr, 1, nc, out, nullptr, 1, n, flags);
      fftw_free(in);
      fftw_free(out);
      break;
    }
    case Kind::C2CF:
    case Kind::C2CB: {
      fftw_complex *in = fftw_alloc_complex(std::size_t(n) * howmany);
      fftw_complex *out = fftw_alloc_complex(std::size_t(n) * howmany);
      p = fftw_plan_many_dft(1, &n, howmany, in, nullptr, 1, n, out, nullptr, 1, n,
                             kind == Kind::C2CF ? FFTW_FORWARD : FFTW_BACKWARD, flags);
      fftw_free(in);
      fftw_free(out);
      break;
    }
    case Kind::C2D_F:
    case Kind::C2D_B: {
      // n is n0, howmany is n1
      fftw_complex *in = fftw_alloc_complex(std::size_t(n) * howmany);
      fftw_complex *out = fftw_alloc_complex(std::size_t(n) * howmany);
      p = fftw_plan_dft_2d(n, howmany, in, out, kind == Kind::C2D_F ? FFTW_FORWARD : FFTW_BACKWARD, flags);
      fftw_free(in);
      fftw_free(out);
      break;
    }
    }
    plans.emplace(key, p);
    return p;
  }
};

PlanCache &cache() {
  static PlanCache c;
  return c;
}

fftw_complex *fc(cplx *p) { return reinterpret_cast<fftw_complex *>(p); }
fftw_complex *fc(const cplx *p) { return reinterpret_cast<fftw_complex *>(const_cast<cplx *>(p)); }

} // namespace

void r2c_lines(const double *in, cplx *out, int n, int howmany) {
  fftw_execute_dft_r2c(cache().get(Kind::R2C, n, howmany), const_cast<double *>(in), fc(out));
}

void c2r_lines(const cplx *in, double *out, int n, int howmany) {
  // c2r overwrites its input
  std::vector<cplx> scratch(in, in + std::size_t(n / 2 + 1) * howmany);
  fftw_execute_dft_c2r(cache().get(Kind::C2R, n, howmany), fc(scratch.data()), out);
}

void c2c_lines(const cplx *in, cplx *out, int n, int howmany, int sign) {
  fftw_execute_dft(cache().get(sign < 0 ? Kind::C2CF : Kind::C2CB, n, howmany), fc(in), fc(out));
}

void c2c_2d(const cplx *in, cplx *out, int n0, int n1, int sign) {
  fftw_execute_dft(cache().get(sign < 0 ? Kind::C2D_F : Kind::C2D_B, n0, n1), fc(in), fc(out));
}

} // namespace hrqhd::fft
