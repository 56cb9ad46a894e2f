#pragma once

// Hand-rolled generators and independent oracles shared by the test binaries.
// Nothing here calls into the library's update rules.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <fstream>
#include <string>
#include <random>
#include <vector>

#include <unistd.h>

#include "mvfc/matrix.hpp"

namespace testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  std::size_t size(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
  }
  int label(int classes) { return std::uniform_int_distribution<int>(0, classes - 1)(engine_); }

  mvfc::Matrix matrix(std::size_t rows, std::size_t cols, double lo = 0.0, double hi = 1.0) {
    mvfc::Matrix m(rows, cols);
    for (std::size_t j = 0; j < cols; ++j) {
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = uniform(lo, hi);
    }
    return m;
  }

  // Columns on the open simplex.
  mvfc::Matrix simplex_columns(std::size_t rows, std::size_t cols) {
    auto m = matrix(rows, cols, 0.05, 1.0);
    for (std::size_t j = 0; j < cols; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < rows; ++i) s += m(i, j);
      for (std::size_t i = 0; i < rows; ++i) m(i, j) /= s;
    }
    return m;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

using Objective = std::function<double(const std::vector<double>&)>;

inline std::vector<double> numeric_gradient(const Objective& f, std::vector<double> x) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
    const double keep = x[i];
    x[i] = keep + h;
    const double fp = f(x);
    x[i] = keep - h;
    const double fm = f(x);
    x[i] = keep;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// Quasi-Newton descent with finite-difference gradients and Armijo
// backtracking. Returns the best point found.
inline std::vector<double> bfgs_minimize(const Objective& f, std::vector<double> x, int max_iter = 500) {
  const std::size_t n = x.size();
  std::vector<double> hinv(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) hinv[i * n + i] = 1.0;
  double fx = f(x);
  auto g = numeric_gradient(f, x);
  for (int it = 0; it < max_iter; ++it) {
    double gnorm = 0.0;
    for (double v : g) gnorm = std::max(gnorm, std::abs(v));
    if (gnorm < 1e-11) break;
    std::vector<double> dir(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) dir[i] -= hinv[i * n + j] * g[j];
    }
    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) slope += dir[i] * g[i];
    if (slope >= 0.0) {
      std::fill(hinv.begin(), hinv.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        hinv[i * n + i] = 1.0;
        dir[i] = -g[i];
      }
      slope = -gnorm * gnorm;
    }
    double step = 1.0;
    std::vector<double> xn(n);
    double fn = fx;
    bool moved = false;
    for (int ls = 0; ls < 80; ++ls) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + step * dir[i];
      fn = f(xn);
      if (fn <= fx + 1e-4 * step * slope) {
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
    auto gn = numeric_gradient(f, xn);
    std::vector<double> s(n), y(n);
    double sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = xn[i] - x[i];
      y[i] = gn[i] - g[i];
      sy += s[i] * y[i];
    }
    x = xn;
    fx = fn;
    g = gn;
    if (sy <= 1e-300) continue;
    std::vector<double> hy(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) hy[i] += hinv[i * n + j] * y[j];
    }
    double yhy = 0.0;
    for (std::size_t i = 0; i < n; ++i) yhy += y[i] * hy[i];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        hinv[i * n + j] += ((sy + yhy) * s[i] * s[j]) / (sy * sy) - (hy[i] * s[j] + s[i] * hy[j]) / sy;
      }
    }
  }
  return x;
}

// Minimizes a convex f over the simplex of dimension `dim` by pairwise
// coordinate descent: each step moves mass between two coordinates, with the
// amount found by golden-section search. Starts at the barycenter. Endpoints
// of a segment are never evaluated, so f may be singular on the boundary.
inline std::vector<double> simplex_minimize(const Objective& f, std::size_t dim) {
  std::vector<double> x(dim, 1.0 / static_cast<double>(dim));
  if (dim < 2) return x;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int sweep = 0; sweep < 5000; ++sweep) {
    double moved = 0.0;
    for (std::size_t a = 0; a < dim; ++a) {
      for (std::size_t b = a + 1; b < dim; ++b) {
        // x_a + t, x_b - t with t in [-x_a, x_b].
        const double xa = x[a], xb = x[b];
        auto at = [&](double t) {
          x[a] = xa + t;
          x[b] = xb - t;
          return f(x);
        };
        double lo = -xa, hi = xb;
        double p = hi - inv_phi * (hi - lo), q = lo + inv_phi * (hi - lo);
        double fp = at(p), fq = at(q);
        for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
          if (fp <= fq) {
            hi = q;
            q = p;
            fq = fp;
            p = hi - inv_phi * (hi - lo);
            fp = at(p);
          } else {
            lo = p;
            p = q;
            fp = fq;
            q = lo + inv_phi * (hi - lo);
            fq = at(q);
          }
        }
        double t = 0.5 * (lo + hi);
        if (at(t) > at(0.0)) t = 0.0;
        x[a] = xa + t;
        x[b] = xb - t;
        moved = std::max(moved, std::abs(t));
      }
    }
    if (moved < 1e-15) break;
  }
  return x;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Pair-enumeration Rand index.
inline double brute_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t agree = 0, pairs = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      ++pairs;
      if ((a[i] == a[j]) == (b[i] == b[j])) ++agree;
    }
  }
  return static_cast<double>(agree) / static_cast<double>(pairs);
}

// I(A;B) / sqrt(H(A) H(B)) from empirical probabilities. Labels must lie
// in [0, 16).
inline double entropy_nmi(const std::vector<int>& a, const std::vector<int>& b) {
  const double n = static_cast<double>(a.size());
  double pa[16] = {}, pb[16] = {}, pab[16][16] = {};
  for (std::size_t i = 0; i < a.size(); ++i) {
    pa[a[i]] += 1.0 / n;
    pb[b[i]] += 1.0 / n;
    pab[a[i]][b[i]] += 1.0 / n;
  }
  double ha = 0.0, hb = 0.0, mi = 0.0;
  int ca = 0, cb = 0;
  for (int k = 0; k < 16; ++k) {
    if (pa[k] > 0.0) {
      ha -= pa[k] * std::log(pa[k]);
      ++ca;
    }
    if (pb[k] > 0.0) {
      hb -= pb[k] * std::log(pb[k]);
      ++cb;
    }
    for (int l = 0; l < 16; ++l) {
      if (pab[k][l] > 0.0) mi += pab[k][l] * std::log(pab[k][l] / (pa[k] * pb[l]));
    }
  }
  if (ca < 2 || cb < 2) return 0.0;
  return mi / std::sqrt(ha * hb);
}

// Every set partition of {0..n-1} as restricted-growth label strings.
inline std::vector<std::vector<int>> all_partitions(std::size_t n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int used) {
    if (i == n) {
      out.push_back(cur);
      return;
    }
    for (int l = 0; l <= used; ++l) {
      cur[i] = l;
      rec(i + 1, std::max(used, l + 1));
    }
  };
  rec(0, 0);
  return out;
}

// Fresh directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("mvfc_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace testing
