#include "ginibre/mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>

#include "ginibre/error.hpp"
#include "ginibre/parallel.hpp"
#include "ginibre/specfun.hpp"
#include "ginibre/version.hpp"

namespace ginibre::mc {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> RngStream::philox(std::array<std::uint32_t, 4> c,
                                               std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

std::uint32_t RngStream::next_u32() {
  if (used_ == 4) {
    const std::array<std::uint32_t, 4> counter = {
        static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    buffer_ = philox(counter, {static_cast<std::uint32_t>(seed_),
                               static_cast<std::uint32_t>(seed_ >> 32)});
    ++block_;
    used_ = 0;
  }
  return buffer_[static_cast<std::size_t>(used_++)];
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t lo = next_u32();
  const std::uint64_t hi = next_u32();
  return (hi << 32) | lo;
}

double RngStream::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

double RngStream::gamma(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) detail::domain_fail("gamma: need shape > 0");
  if (shape < 1.0) {
    // Gamma(a) = Gamma(a + 1) · U^{1/a}
    const double boost = std::pow(uniform(), 1.0 / shape);
    return gamma(shape + 1.0) * boost;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::vector<double> sample_radial_moduli(int n, Ensemble ens, RngStream& rng) {
  if (n < 1) detail::domain_fail("sample_radial_moduli: need N >= 1");
  std::vector<double> r(static_cast<std::size_t>(n));
  for (int ell = 1; ell <= n; ++ell) {
    const GammaSumLaw law = modulus_law(ens, n, ell);
    r[static_cast<std::size_t>(ell - 1)] = std::sqrt(rng.gamma(law.shape) / law.scale);
  }
  return r;
}

std::vector<cplx> sample_ginibre_matrix(int n, RngStream& rng) {
  if (n < 1) detail::domain_fail("sample_ginibre_matrix: need N >= 1");
  const double sd = 1.0 / std::sqrt(2.0 * n);
  std::vector<cplx> a(static_cast<std::size_t>(n) * n);
  for (cplx& z : a) {
    const double re = rng.normal();
    const double im = rng.normal();
    z = {sd * re, sd * im};
  }
  return a;
}

std::vector<cplx> sample_ginibre_eigenvalues(int n, RngStream& rng) {
  if (n > kMaxEigenDimension) detail::domain_fail("sample_ginibre_eigenvalues: N > 512");
  const auto a = sample_ginibre_matrix(n, rng);
  try {
    return eig_dense(a, n);
  } catch (const NumericalError& e) {
    detail::numerical_fail(std::string(e.what()) + " (seed " + std::to_string(rng.seed()) +
                           ", stream " + std::to_string(rng.stream()) + ")");
  }
}

namespace {

// Column-major square matrix used by the eigensolver.
class Work {
 public:
  explicit Work(int n) : n_(n), data_(static_cast<std::size_t>(n) * n) {}
  cplx& operator()(int i, int j) {
    return data_[static_cast<std::size_t>(j) * n_ + static_cast<std::size_t>(i)];
  }
  cplx* column(int j) { return data_.data() + static_cast<std::size_t>(j) * n_; }

 private:
  int n_;
  std::vector<cplx> data_;
};

double norm1(cplx z) { return std::abs(z.real()) + std::abs(z.imag()); }

void to_hessenberg(Work& h, int n) {
  std::vector<cplx> v(static_cast<std::size_t>(n));
  std::vector<cplx> w(static_cast<std::size_t>(n));
  for (int k = 0; k + 2 < n; ++k) {
    double scale = 0.0;
    for (int i = k + 1; i < n; ++i) scale += norm1(h(i, k));
    if (scale == 0.0) continue;
    double sq = 0.0;
    for (int i = k + 1; i < n; ++i) {
      v[static_cast<std::size_t>(i)] = h(i, k) / scale;
      sq += std::norm(v[static_cast<std::size_t>(i)]);
    }
    const double len = std::sqrt(sq);
    const cplx x0 = v[static_cast<std::size_t>(k + 1)];
    const cplx phase = std::abs(x0) == 0.0 ? cplx{1.0} : x0 / std::abs(x0);
    // v = x + phase·‖x‖ e₁ maps x onto −phase·‖x‖ e₁ without cancellation.
    v[static_cast<std::size_t>(k + 1)] += phase * len;
    double vv = 0.0;
    for (int i = k + 1; i < n; ++i) vv += std::norm(v[static_cast<std::size_t>(i)]);
    const double tau = 2.0 / vv;

    // Left: H ← (I − τ v v*) H on rows k+1.., columns k..
    for (int j = k; j < n; ++j) {
      cplx* col = h.column(j);
      cplx s = 0.0;
      for (int i = k + 1; i < n; ++i) s += std::conj(v[static_cast<std::size_t>(i)]) * col[i];
      s *= tau;
      for (int i = k + 1; i < n; ++i) col[i] -= v[static_cast<std::size_t>(i)] * s;
    }
    // Right: H ← H (I − τ v v*) on all rows, columns k+1..
    std::fill(w.begin(), w.end(), cplx{});
    for (int j = k + 1; j < n; ++j) {
      const cplx vj = v[static_cast<std::size_t>(j)];
      const cplx* col = h.column(j);
      for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] += col[i] * vj;
    }
    for (int j = k + 1; j < n; ++j) {
      const cplx f = tau * std::conj(v[static_cast<std::size_t>(j)]);
      cplx* col = h.column(j);
      for (int i = 0; i < n; ++i) col[i] -= w[static_cast<std::size_t>(i)] * f;
    }
    h(k + 1, k) = -phase * len * scale;
    for (int i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }
}

struct Givens {
  double c = 1.0;
  cplx s = 0.0;
  cplx r = 0.0;
};

// [c s; −s̄ c] [p; q] = [r; 0] with c real.
Givens make_givens(cplx p, cplx q) {
  Givens g;
  if (q == cplx{}) {
    g.r = p;
    return g;
  }
  if (p == cplx{}) {
    g.c = 0.0;
    g.s = std::conj(q) / std::abs(q);
    g.r = std::abs(q);
    return g;
  }
  const double ap = std::abs(p);
  const double norm = std::hypot(ap, std::abs(q));
  g.c = ap / norm;
  g.s = (p / ap) * std::conj(q) / norm;
  g.r = (p / ap) * norm;
  return g;
}

void rotate_rows(Work& h, const Givens& g, int i, int from, int to) {
  for (int k = from; k <= to; ++k) {
    const cplx x = h(i, k), y = h(i + 1, k);
    h(i, k) = g.c * x + g.s * y;
    h(i + 1, k) = -std::conj(g.s) * x + g.c * y;
  }
}

void rotate_cols(Work& h, const Givens& g, int i, int from, int to) {
  cplx* a = h.column(i);
  cplx* b = h.column(i + 1);
  const cplx sc = std::conj(g.s);
  for (int k = from; k <= to; ++k) {
    const cplx x = a[k], y = b[k];
    a[k] = g.c * x + sc * y;
    b[k] = -g.s * x + g.c * y;
  }
}

cplx wilkinson_shift(Work& h, int iu, int iter) {
  if (iter == 10 || iter == 20) {
    // Exceptional shift to break cycles.
    double s = std::abs(h(iu, iu - 1).real());
    if (iu >= 2) s += std::abs(h(iu - 1, iu - 2).real());
    return s;
  }
  cplx t00 = h(iu - 1, iu - 1), t01 = h(iu - 1, iu), t10 = h(iu, iu - 1), t11 = h(iu, iu);
  const double normt = std::sqrt(std::norm(t00) + std::norm(t01) + std::norm(t10) + std::norm(t11));
  if (normt == 0.0) return 0.0;
  t00 /= normt;
  t01 /= normt;
  t10 /= normt;
  t11 /= normt;
  const cplx b = t01 * t10;
  const cplx c = t00 - t11;
  const cplx disc = std::sqrt(c * c + 4.0 * b);
  const cplx det = t00 * t11 - b;
  const cplx trace = t00 + t11;
  cplx e1 = 0.5 * (trace + disc);
  cplx e2 = 0.5 * (trace - disc);
  if (norm1(e1) > norm1(e2)) {
    e2 = det / e1;
  } else if (e2 != cplx{}) {
    e1 = det / e2;
  }
  return normt * (norm1(e1 - t11) < norm1(e2 - t11) ? e1 : e2);
}

}  // namespace

std::vector<cplx> eig_dense(const std::vector<cplx>& a, int n) {
  if (n < 1 || n > kMaxEigenDimension) detail::domain_fail("eig_dense: dimension must be 1..512");
  if (a.size() != static_cast<std::size_t>(n) * n) detail::domain_fail("eig_dense: need n*n entries");
  Work h(n);
  double frob = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const cplx z = a[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)];
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        detail::domain_fail("eig_dense: non-finite entry");
      }
      h(i, j) = z;
      frob += std::norm(z);
    }
  }
  frob = std::sqrt(frob);
  to_hessenberg(h, n);

  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double floor = eps * frob;
  auto negligible = [&](int i) {
    const double sub = norm1(h(i, i - 1));
    return sub <= eps * (norm1(h(i - 1, i - 1)) + norm1(h(i, i))) || sub <= floor * 1e-3;
  };

  const long max_iter = 30L * n;
  long total = 0;
  int iter = 0;
  int iu = n - 1;
  while (true) {
    while (iu > 0) {
      if (negligible(iu)) {
        h(iu, iu - 1) = 0.0;
        iter = 0;
        --iu;
      } else {
        break;
      }
    }
    if (iu == 0) break;
    ++iter;
    if (++total > max_iter) {
      detail::numerical_fail("eig_dense: QR iteration did not converge in 30*n steps");
    }
    int il = iu - 1;
    while (il > 0 && !negligible(il)) --il;

    const cplx shift = wilkinson_shift(h, iu, iter);
    Givens g = make_givens(h(il, il) - shift, h(il + 1, il));
    rotate_rows(h, g, il, il, iu);
    rotate_cols(h, g, il, il, std::min(il + 2, iu));
    for (int i = il + 1; i < iu; ++i) {
      g = make_givens(h(i, i - 1), h(i + 1, i - 1));
      h(i, i - 1) = g.r;
      h(i + 1, i - 1) = 0.0;
      rotate_rows(h, g, i, i, iu);
      rotate_cols(h, g, i, il, std::min(i + 2, iu));
    }
  }
  std::vector<cplx> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = h(i, i);
  return out;
}

CovEstimate estimate_cov(const std::vector<double>& f, const std::vector<double>& g) {
  const std::size_t s = f.size();
  if (s != g.size()) detail::domain_fail("estimate_cov: sequences differ in length");
  if (s < 2) detail::domain_fail("estimate_cov: need at least 2 replicas");
  CompensatedSum sf, sg;
  for (std::size_t i = 0; i < s; ++i) {
    sf.add(f[i]);
    sg.add(g[i]);
  }
  const double mf = sf.value() / s, mg = sg.value() / s;
  CompensatedSum sfg;
  for (std::size_t i = 0; i < s; ++i) sfg.add((f[i] - mf) * (g[i] - mg));
  const double sum = sfg.value();
  CovEstimate out;
  out.cov = sum / (s - 1.0);
  if (s < 3) {
    out.se = std::numeric_limits<double>::infinity();
    return out;
  }
  // Leave-one-out: Σ_{j≠i} (f_j − f̄₋ᵢ)(g_j − ḡ₋ᵢ) = S − s/(s−1) dᵢ eᵢ.
  const double ratio = s / (s - 1.0);
  std::vector<double> loo(s);
  CompensatedSum sl;
  for (std::size_t i = 0; i < s; ++i) {
    loo[i] = (sum - ratio * (f[i] - mf) * (g[i] - mg)) / (s - 2.0);
    sl.add(loo[i]);
  }
  const double ml = sl.value() / s;
  CompensatedSum dev;
  for (double x : loo) dev.add((x - ml) * (x - ml));
  out.se = std::sqrt((s - 1.0) / s * dev.value());
  return out;
}

MeanEstimate estimate_mean(const std::vector<double>& f) {
  if (f.size() < 2) detail::domain_fail("estimate_mean: need at least 2 replicas");
  const auto var = estimate_cov(f, f);
  CompensatedSum s;
  for (double x : f) s.add(x);
  return {s.value() / f.size(), std::sqrt(var.cov / f.size())};
}

KsResult ks_normal_test(std::vector<double> samples, double lattice_step) {
  const std::size_t s = samples.size();
  if (s < 100) detail::domain_fail("ks_normal_test: need at least 100 samples");
  if (!(lattice_step >= 0.0)) detail::domain_fail("ks_normal_test: lattice step must be >= 0");
  const auto m = estimate_mean(samples);
  const double sd = std::sqrt(estimate_cov(samples, samples).cov);
  if (!(sd > 0.0)) detail::domain_fail("ks_normal_test: sample has zero spread");
  std::sort(samples.begin(), samples.end());
  double d = 0.0;
  if (lattice_step > 0.0) {
    for (std::size_t i = 0; i < s; ++i) {
      if (i + 1 < s && samples[i + 1] == samples[i]) continue;
      const double cdf = specfun::std_normal_cdf((samples[i] + 0.5 * lattice_step - m.mean) / sd);
      d = std::max(d, std::abs((i + 1.0) / s - cdf));
    }
  } else {
    for (std::size_t i = 0; i < s; ++i) {
      const double cdf = specfun::std_normal_cdf((samples[i] - m.mean) / sd);
      d = std::max({d, (i + 1.0) / s - cdf, cdf - static_cast<double>(i) / s});
    }
  }
  KsResult out;
  out.statistic = d;
  out.threshold = 1.63 / std::sqrt(static_cast<double>(s));
  out.pass = d < out.threshold;
  return out;
}

std::vector<double> SampleBatch::column(std::size_t stat) const {
  if (stat >= names.size()) detail::domain_fail("SampleBatch: statistic index out of range");
  std::vector<double> out(replicas());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = value(r, stat);
  return out;
}

SampleBatch run_replicas(const RunConfig& config) {
  if (config.n < 1) detail::domain_fail("run_replicas: need N >= 1");
  if (config.replicas < 1) detail::domain_fail("run_replicas: need at least one replica");
  if (config.statistics.empty()) detail::domain_fail("run_replicas: no statistics requested");
  const bool all_radial = std::all_of(config.statistics.begin(), config.statistics.end(),
                                      [](const Statistic& s) { return s.radial; });
  const bool matrix = config.force_matrix || config.keep_eigenvalues || !all_radial;
  if (matrix && config.ensemble != Ensemble::complex) {
    detail::domain_fail("run_replicas: the matrix sampler covers the complex ensemble only; "
                        "quaternion runs accept radial statistics only");
  }
  if (matrix && config.n > kMaxEigenDimension) detail::domain_fail("run_replicas: N > 512");

  SampleBatch batch;
  batch.n = config.n;
  batch.ensemble = config.ensemble;
  batch.seed = config.seed;
  batch.code_version = kVersion;
  const std::size_t m = config.statistics.size();
  for (const auto& s : config.statistics) batch.names.push_back(s.name);
  batch.values.assign(config.replicas * m, 0.0);
  if (config.keep_eigenvalues) {
    batch.eigenvalues.assign(config.replicas * static_cast<std::size_t>(config.n), cplx{});
  }

  parallel_for(config.replicas, [&](std::size_t r) {
    RngStream rng(config.seed, r);
    std::vector<cplx> points;
    if (matrix) {
      points = sample_ginibre_eigenvalues(config.n, rng);
    } else {
      const auto radii = sample_radial_moduli(config.n, config.ensemble, rng);
      points.assign(radii.begin(), radii.end());
    }
    for (std::size_t j = 0; j < m; ++j) {
      CompensatedSum acc;
      for (const cplx& z : points) acc.add(config.statistics[j].per_point(z));
      batch.values[r * m + j] = acc.value();
    }
    if (config.keep_eigenvalues) {
      std::copy(points.begin(), points.end(),
                batch.eigenvalues.begin() + static_cast<std::ptrdiff_t>(r * config.n));
    }
  });
  return batch;
}

namespace {

constexpr char kMagic[8] = {'G', 'I', 'N', 'I', 'B', 'R', 'E', '1'};

template <class T>
void put(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::uint64_t bits = 0;
  if constexpr (std::is_same_v<T, double>) {
    std::memcpy(&bits, &value, sizeof bits);
  } else {
    bits = static_cast<std::uint64_t>(value);
  }
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), sizeof bytes);
}

template <class T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof bytes)) {
    detail::domain_fail("read_batch: truncated file");
  }
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  if constexpr (std::is_same_v<T, double>) {
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  } else {
    return static_cast<T>(bits);
  }
}

void put_fixed(std::ostream& out, const std::string& s) {
  char buf[16] = {};
  std::memcpy(buf, s.data(), std::min<std::size_t>(s.size(), 15));
  out.write(buf, sizeof buf);
}

std::string get_fixed(std::istream& in) {
  char buf[16];
  if (!in.read(buf, sizeof buf)) detail::domain_fail("read_batch: truncated header");
  return std::string(buf, strnlen(buf, sizeof buf));
}

}  // namespace

void write_batch(const SampleBatch& batch, std::ostream& out) {
  if (batch.names.empty() || batch.values.size() % batch.names.size() != 0) {
    detail::domain_fail("write_batch: inconsistent batch");
  }
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, SampleBatch::kFormatVersion);
  put<std::uint32_t>(out, batch.ensemble == Ensemble::complex ? 0u : 1u);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(batch.n));
  put<std::uint64_t>(out, batch.seed);
  put<std::uint64_t>(out, batch.replicas());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(batch.names.size()));
  put<std::uint32_t>(out, batch.eigenvalues.empty() ? 0u : 1u);
  put_fixed(out, batch.generator);
  put_fixed(out, batch.code_version);
  for (const auto& name : batch.names) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  for (double v : batch.values) put<double>(out, v);
  for (const cplx& z : batch.eigenvalues) {
    put<double>(out, z.real());
    put<double>(out, z.imag());
  }
  if (!out) detail::numerical_fail("write_batch: write failed");
}

SampleBatch read_batch(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    detail::domain_fail("read_batch: not a sample batch file");
  }
  if (get<std::uint32_t>(in) != SampleBatch::kFormatVersion) {
    detail::domain_fail("read_batch: unsupported format version");
  }
  SampleBatch b;
  const auto ens = get<std::uint32_t>(in);
  if (ens > 1) detail::domain_fail("read_batch: unknown ensemble tag");
  b.ensemble = ens == 0 ? Ensemble::complex : Ensemble::quaternion;
  b.n = static_cast<int>(get<std::uint64_t>(in));
  b.seed = get<std::uint64_t>(in);
  const auto replicas = get<std::uint64_t>(in);
  const auto count = get<std::uint32_t>(in);
  const auto flags = get<std::uint32_t>(in);
  b.generator = get_fixed(in);
  b.code_version = get_fixed(in);
  if (count == 0 || replicas == 0) detail::domain_fail("read_batch: empty batch");
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = get<std::uint32_t>(in);
    if (len > 4096) detail::domain_fail("read_batch: statistic name too long");
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) detail::domain_fail("read_batch: truncated names");
    b.names.push_back(std::move(name));
  }
  b.values.resize(replicas * count);
  for (double& v : b.values) v = get<double>(in);
  if (flags & 1u) {
    b.eigenvalues.resize(replicas * static_cast<std::uint64_t>(b.n));
    for (cplx& z : b.eigenvalues) {
      const double re = get<double>(in);
      z = {re, get<double>(in)};
    }
  }
  return b;
}

void save_batch(const SampleBatch& batch, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) detail::domain_fail("save_batch: cannot open " + path.string());
  write_batch(batch, out);
}

SampleBatch load_batch(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) detail::domain_fail("load_batch: cannot open " + path.string());
  return read_batch(in);
}

void write_batch_csv(const SampleBatch& batch, std::ostream& out) {
  out << "# n=" << batch.n << ",ensemble=" << to_string(batch.ensemble) << ",seed=" << batch.seed
      << ",generator=" << batch.generator << ",version=" << batch.code_version << '\n';
  out << "replica";
  for (const auto& name : batch.names) out << ',' << name;
  out << '\n';
  const auto old = out.precision(17);
  for (std::size_t r = 0; r < batch.replicas(); ++r) {
    out << r;
    for (std::size_t j = 0; j < batch.names.size(); ++j) out << ',' << batch.value(r, j);
    out << '\n';
  }
  out.precision(old);
}

}  // namespace ginibre::mc
