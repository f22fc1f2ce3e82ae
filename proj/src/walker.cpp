#include "niche/walker.hpp"

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstring>
#include <map>
#include <thread>

namespace niche {

namespace {

using Site = std::array<long, 3>;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

double lattice_norm(const Site& j, int d) {
  double r2 = 0.0;
  for (int k = 0; k < d; ++k) r2 += static_cast<double>(j[k]) * static_cast<double>(j[k]);
  return std::sqrt(r2);
}

}  // namespace

ParticleStream::ParticleStream(std::uint64_t seed, std::uint64_t particle)
    : state_(mix64(seed ^ mix64(particle + kGolden))) {}

std::uint64_t ParticleStream::next() {
  state_ += kGolden;
  return mix64(state_);
}

WalkConfig WalkConfig::regime_a(int dimension, long n, double s, double p) {
  require(n >= 1, ErrorKind::InvalidSpec, "regime A needs a positive integer scale");
  WalkConfig c;
  c.dimension = dimension;
  c.regime = WalkRegime::A;
  c.s = s;
  c.p = p;
  c.neighbor_scale = n;
  c.h = std::pow(static_cast<double>(n), 1.0 / (s - 1.0));
  c.dt = std::pow(c.h, 2 * s);
  return c;
}

WalkConfig WalkConfig::regime_b(int dimension, double alpha, double s, double h) {
  WalkConfig c;
  c.dimension = dimension;
  c.regime = WalkRegime::B;
  c.s = s;
  c.h = h;
  c.alpha = alpha;
  c.p = alpha * std::pow(h, 2 - 2 * s);
  c.neighbor_scale = 1;
  c.dt = h * h;
  return c;
}

long WalkConfig::radius() const {
  return lattice_radius > 0 ? lattice_radius : static_cast<long>(std::ceil(64.0 / h));
}

void WalkConfig::validate() const {
  require(dimension >= 1 && dimension <= 3, ErrorKind::InvalidSpec, "walk dimension must be 1, 2 or 3");
  require(p >= 0 && p <= 1, ErrorKind::OutOfRange, "mixing probability must lie in [0,1]");
  require(s > 0 && s < 1, ErrorKind::OutOfRange, "fractional order must lie in (0,1)");
  require(h > 0 && std::isfinite(h) && dt > 0, ErrorKind::InvalidSpec, "spacing and time step must be positive");
  require(neighbor_scale >= 1, ErrorKind::InvalidSpec, "neighbor scale must be a positive integer");
  require(neighbor_scale <= radius(), ErrorKind::InvalidSpec, "scaled neighbors fall outside the truncation radius");
  require(particles >= 0 && steps >= 0, ErrorKind::InvalidSpec, "particle and step counts must be nonnegative");
  require(start.empty() || static_cast<int>(start.size()) == dimension, ErrorKind::DimensionMismatch,
          "start site has wrong dimension");
}

AliasTable::AliasTable(const std::vector<double>& weights) {
  const std::size_t n = weights.size();
  require(n > 0 && n < (1ULL << 32), ErrorKind::InvalidSpec, "alias table needs 1..2^32 entries");
  long double total = 0;
  for (double w : weights) total += w;
  require(total > 0, ErrorKind::InvalidSpec, "alias table weights must not all vanish");
  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = static_cast<double>(weights[i] * static_cast<long double>(n) / total);
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const auto a = small.back();
    small.pop_back();
    const auto b = large.back();
    prob_[a] = scaled[a];
    alias_[a] = b;
    scaled[b] = (scaled[b] + scaled[a]) - 1.0;
    if (scaled[b] < 1.0) {
      large.pop_back();
      small.push_back(b);
    }
  }
  for (auto i : large) prob_[i] = 1.0;
  for (auto i : small) prob_[i] = 1.0;
}

std::size_t AliasTable::sample(std::uint64_t bits) const {
  const std::uint64_t n = prob_.size();
  const std::size_t i = static_cast<std::size_t>(((bits >> 32) * n) >> 32);
  const double u = static_cast<double>(bits & 0xffffffffULL) * 0x1.0p-32;
  return u < prob_[i] ? i : alias_[i];
}

JumpTable build_jump_table(const WalkConfig& config) {
  config.validate();
  const int d = config.dimension;
  const long K = config.radius();
  JumpTable t;
  t.dimension = d;
  t.radius = K;
  t.neighbor_scale = config.neighbor_scale;
  t.p = config.p;
  t.s = config.s;

  // Power-law part over 0 < |j| <= K, lexicographic order.
  std::vector<Site> power;
  std::vector<double> weight;
  long double c = 0;
  const double q = d + 2 * config.s;
  Site j{0, 0, 0};
  for (int k = 0; k < d; ++k) j[k] = -K;
  while (true) {
    const double r = lattice_norm(j, d);
    if (r > 0 && r <= K) {
      const double w = std::pow(r, -q);
      power.push_back(j);
      weight.push_back(w);
      c += w;
    }
    int k = 0;
    while (k < d) {
      if (++j[k] <= K) break;
      j[k] = -K;
      ++k;
    }
    if (k == d) break;
  }
  t.normalization = static_cast<double>(c);
  // Integral comparison for the omitted shell |j| > K.
  const double area = d == 1 ? 2.0 : d == 2 ? 2 * M_PI : 4 * M_PI;
  t.tail_estimate = area * std::pow(static_cast<double>(K), -2 * config.s) / (2 * config.s) / t.normalization;

  std::map<Site, long double> table;
  if (config.p > 0) {
    for (std::size_t i = 0; i < power.size(); ++i)
      table[power[i]] += static_cast<long double>(config.p) * weight[i] / c;
  }
  if (config.p < 1) {
    const long double share = (1.0L - config.p) / (2.0L * d);
    for (int k = 0; k < d; ++k)
      for (long sign : {-1L, 1L}) {
        Site e{0, 0, 0};
        e[k] = sign * config.neighbor_scale;
        table[e] += share;
      }
  }
  t.offsets.resize(d, static_cast<Index>(table.size()));
  long double total = 0;
  Index col = 0;
  for (const auto& [site, m] : table) {
    for (int k = 0; k < d; ++k) t.offsets(k, col) = site[k];
    t.mass.push_back(static_cast<double>(m));
    total += m;
    ++col;
  }
  t.total_mass = static_cast<double>(total);

  t.power_offsets.resize(d, static_cast<Index>(power.size()));
  for (std::size_t i = 0; i < power.size(); ++i)
    for (int k = 0; k < d; ++k) t.power_offsets(k, static_cast<Index>(i)) = power[i][k];
  if (!power.empty()) t.power = AliasTable(weight);
  return t;
}

double Histogram::total() const {
  long double s = 0;
  for (double m : mass) s += m;
  return static_cast<double>(s);
}

ReflectingDomain::ReflectingDomain(const Grid& grid, const JumpTable& table) : dim_(grid.dimension()) {
  require(grid.spec().boxes.size() == 1, ErrorKind::InvalidSpec, "reflection needs a single-box domain");
  require(table.dimension == dim_, ErrorKind::DimensionMismatch, "walk and domain dimensions differ");
  const auto& lat = grid.interior_lattice();
  for (int k = 0; k < dim_; ++k) {
    lo_[k] = lat.row(k).minCoeff();
    hi_[k] = lat.row(k).maxCoeff();
  }
  reach_ = std::max(table.radius, table.neighbor_scale);
  for (Index i = 0; i < grid.interior_size(); ++i) {
    Site s{0, 0, 0};
    for (int k = 0; k < dim_; ++k) s[k] = lat(k, i);
    sites_.push_back(s);
  }
  std::sort(sites_.begin(), sites_.end());

  std::size_t box = 1;
  for (int k = 0; k < dim_; ++k) box *= static_cast<std::size_t>(hi_[k] - lo_[k] + 1 + 2 * reach_);
  require(box * sites_.size() < 50'000'000ULL, ErrorKind::InvalidSpec,
          "reflection tables too large for this domain and truncation radius");
  landing_.assign(box, {});
  landing_alias_.assign(box, AliasTable());
  const double q = dim_ + 2 * table.s;
  Site y{0, 0, 0};
  for (int k = 0; k < dim_; ++k) y[k] = lo_[k] - reach_;
  while (true) {
    if (!inside(y)) {
      std::vector<double> w(sites_.size());
      for (std::size_t i = 0; i < sites_.size(); ++i) {
        Site diff{0, 0, 0};
        for (int k = 0; k < dim_; ++k) diff[k] = y[k] - sites_[i][k];
        // Same truncation as the jumps, which keeps the reflected kernel symmetric.
        const double r = lattice_norm(diff, dim_);
        w[i] = r <= static_cast<double>(table.radius) ? std::pow(r, -q) : 0.0;
      }
      long double total = 0;
      for (double v : w) total += v;
      // total == 0: no power jump from inside reaches y
      if (total > 0) {
        const Index f = flat_outside(y);
        landing_alias_[static_cast<std::size_t>(f)] = AliasTable(w);
        for (double& v : w) v = static_cast<double>(v / total);
        landing_[static_cast<std::size_t>(f)] = std::move(w);
      }
    }
    int k = 0;
    while (k < dim_) {
      if (++y[k] <= hi_[k] + reach_) break;
      y[k] = lo_[k] - reach_;
      ++k;
    }
    if (k == dim_) break;
  }
}

bool ReflectingDomain::inside(const Site& y) const {
  for (int k = 0; k < dim_; ++k)
    if (y[k] < lo_[k] || y[k] > hi_[k]) return false;
  return true;
}

Index ReflectingDomain::flat_outside(const Site& y) const {
  Index flat = 0, stride = 1;
  for (int k = 0; k < dim_; ++k) {
    const long off = y[k] - (lo_[k] - reach_);
    const long ext = hi_[k] - lo_[k] + 1 + 2 * reach_;
    require(off >= 0 && off < ext, ErrorKind::OutOfRange, "jump leaves the reflection tables");
    flat += off * stride;
    stride *= ext;
  }
  return flat;
}

Site ReflectingDomain::reflect_local(Site y) const {
  for (int k = 0; k < dim_; ++k) {
    while (y[k] < lo_[k] || y[k] > hi_[k]) {
      if (y[k] < lo_[k]) y[k] = 2 * lo_[k] - 1 - y[k];
      if (y[k] > hi_[k]) y[k] = 2 * hi_[k] + 1 - y[k];
    }
  }
  return y;
}

const std::vector<double>& ReflectingDomain::landing(const Site& y) const {
  return landing_[static_cast<std::size_t>(flat_outside(y))];
}

Site ReflectingDomain::resample(const Site& y, std::uint64_t bits) const {
  return sites_[landing_alias_[static_cast<std::size_t>(flat_outside(y))].sample(bits)];
}

Index ReflectingDomain::index_of(const Site& y) const {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), y);
  require(it != sites_.end() && *it == y, ErrorKind::OutOfRange, "site is not in the domain");
  return static_cast<Index>(it - sites_.begin());
}

Site ReflectingDomain::centre() const {
  Site c{0, 0, 0};
  for (int k = 0; k < dim_; ++k) c[k] = (lo_[k] + hi_[k]) / 2;
  return c;
}

namespace {

Site start_site(const WalkConfig& config, const ReflectingDomain* domain) {
  Site s{0, 0, 0};
  if (!config.start.empty()) {
    for (int k = 0; k < config.dimension; ++k) s[k] = config.start[static_cast<std::size_t>(k)];
  } else if (domain) {
    s = domain->centre();
  }
  if (domain) require(domain->inside(s), ErrorKind::OutOfRange, "start site lies outside the domain");
  return s;
}

Histogram from_positions(std::vector<Site>& pos, const WalkConfig& config) {
  Histogram h;
  h.dimension = config.dimension;
  h.h = config.h;
  std::sort(pos.begin(), pos.end());
  const double unit = pos.empty() ? 0.0 : 1.0 / static_cast<double>(pos.size());
  for (std::size_t i = 0; i < pos.size();) {
    std::size_t j = i;
    while (j < pos.size() && pos[j] == pos[i]) ++j;
    h.sites.push_back(pos[i]);
    h.mass.push_back(static_cast<double>(j - i) * unit);
    i = j;
  }
  return h;
}

}  // namespace

Histogram simulate(const WalkConfig& config, const JumpTable& table, const ReflectingDomain* domain, int threads) {
  config.validate();
  require(table.dimension == config.dimension, ErrorKind::DimensionMismatch, "table built for another dimension");
  const int d = config.dimension;
  const Site origin = start_site(config, domain);
  const auto n = static_cast<std::size_t>(config.particles);
  std::vector<Site> pos(n, origin);
  const bool has_power = table.power.size() > 0 && config.p > 0;

  auto run_particle = [&](std::size_t i) {
    ParticleStream rng(config.seed, i);
    Site x = origin;
    for (int step = 0; step < config.steps; ++step) {
      const double u = rng.uniform();
      if (has_power && u < config.p) {
        const std::size_t k = table.power.sample(rng.next());
        Site y = x;
        for (int a = 0; a < d; ++a) y[a] += table.power_offsets(a, static_cast<Index>(k));
        if (domain && !domain->inside(y)) y = domain->resample(y, rng.next());
        x = y;
      } else {
        const std::uint64_t pick = rng.next() % static_cast<std::uint64_t>(2 * d);
        Site y = x;
        y[pick / 2] += (pick % 2 ? 1 : -1) * table.neighbor_scale;
        if (domain) y = domain->reflect_local(y);
        x = y;
      }
    }
    pos[i] = x;
  };

  constexpr std::size_t block = 4096;
  const std::size_t blocks = (n + block - 1) / block;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t b = next++; b < blocks; b = next++)
      for (std::size_t i = b * block; i < std::min(n, (b + 1) * block); ++i) run_particle(i);
  };
  const int t = std::max(1, threads);
  std::vector<std::thread> pool;
  for (int k = 1; k < t; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return from_positions(pos, config);
}

namespace {

Histogram euler_domain(const WalkConfig& config, const JumpTable& table, int steps, const ReflectingDomain& domain,
                       std::vector<double>* trace) {
  const int d = config.dimension;
  const Index n = domain.size();
  Matrix t = Matrix::Zero(n, n);  // column-stochastic
  const double neighbor_share = (1.0 - config.p) / (2.0 * d);
  for (Index x = 0; x < n; ++x) {
    const Site& from = domain.sites()[static_cast<std::size_t>(x)];
    if (config.p > 0)
      for (Index k = 0; k < table.power_offsets.cols(); ++k) {
        Site y = from;
        for (int a = 0; a < d; ++a) y[a] += table.power_offsets(a, k);
        const double w = config.p * std::pow(lattice_norm({table.power_offsets(0, k), d > 1 ? table.power_offsets(1, k) : 0,
                                                           d > 2 ? table.power_offsets(2, k) : 0},
                                                          d),
                                             -(d + 2 * config.s)) /
                         table.normalization;
        if (domain.inside(y)) {
          t(domain.index_of(y), x) += w;
        } else {
          const auto& land = domain.landing(y);
          for (Index z = 0; z < n; ++z) t(z, x) += w * land[static_cast<std::size_t>(z)];
        }
      }
    if (config.p < 1)
      for (int a = 0; a < d; ++a)
        for (long sign : {-1L, 1L}) {
          Site y = from;
          y[a] += sign * table.neighbor_scale;
          t(domain.index_of(domain.reflect_local(y)), x) += neighbor_share;
        }
  }
  Vector u = Vector::Zero(n);
  u[domain.index_of(start_site(config, &domain))] = 1.0;
  for (int step = 0; step < steps; ++step) {
    u = t * u;
    if (trace) trace->push_back(u.sum());
  }
  Histogram h;
  h.dimension = d;
  h.h = config.h;
  h.sites = domain.sites();
  h.mass.assign(u.data(), u.data() + n);
  return h;
}

std::size_t fft_length(long reach) {
  std::size_t len = 1;
  while (len < static_cast<std::size_t>(2 * reach + 1)) len <<= 1;
  return len;
}

Histogram euler_free(const WalkConfig& config, const JumpTable& table, int steps, std::vector<double>* trace) {
  const int d = config.dimension;
  require(d <= 2, ErrorKind::InvalidSpec, "free-space reference supports dimensions 1 and 2");
  const Site origin = start_site(config, nullptr);
  long start_reach = 0;
  for (int k = 0; k < d; ++k) start_reach = std::max(start_reach, std::abs(origin[k]));
  const long step_reach = std::max(table.radius, table.neighbor_scale);
  const long reach = start_reach + static_cast<long>(std::max(steps, 1)) * step_reach;
  const std::size_t len = fft_length(reach);
  const std::size_t n0 = len, n1 = d == 2 ? len : 1;
  require(n0 * n1 <= (1ULL << 24), ErrorKind::InvalidSpec,
          "free-space reference lattice too large; reduce the truncation radius or step count");
  const std::size_t half = n1 / 2 + 1;
  const std::size_t total = n0 * n1, spectral = d == 2 ? n0 * half : n0 / 2 + 1;

  auto* real = fftw_alloc_real(total);
  auto* kernel = fftw_alloc_complex(spectral);
  auto* state = fftw_alloc_complex(spectral);
  auto wrap = [&](long v, std::size_t l) { return static_cast<std::size_t>(((v % static_cast<long>(l)) + static_cast<long>(l)) % static_cast<long>(l)); };
  auto at = [&](long a, long b) -> double& { return real[d == 2 ? wrap(a, n0) * n1 + wrap(b, n1) : wrap(a, n0)]; };

  fftw_plan forward = d == 2 ? fftw_plan_dft_r2c_2d(static_cast<int>(n0), static_cast<int>(n1), real, state, FFTW_ESTIMATE)
                             : fftw_plan_dft_r2c_1d(static_cast<int>(n0), real, state, FFTW_ESTIMATE);
  std::fill(real, real + total, 0.0);
  for (Index k = 0; k < table.offsets.cols(); ++k)
    at(table.offsets(0, k), d == 2 ? table.offsets(1, k) : 0) += table.mass[static_cast<std::size_t>(k)];
  fftw_execute(forward);
  std::memcpy(kernel, state, sizeof(fftw_complex) * spectral);
  std::fill(real, real + total, 0.0);
  at(origin[0], origin[1]) = 1.0;
  fftw_execute(forward);
  fftw_destroy_plan(forward);

  for (int step = 0; step < steps; ++step) {
    for (std::size_t i = 0; i < spectral; ++i) {
      const std::complex<double> a(state[i][0], state[i][1]), b(kernel[i][0], kernel[i][1]);
      const auto c = a * b;
      state[i][0] = c.real();
      state[i][1] = c.imag();
    }
    if (trace) trace->push_back(state[0][0]);
  }
  fftw_plan backward = d == 2 ? fftw_plan_dft_c2r_2d(static_cast<int>(n0), static_cast<int>(n1), state, real, FFTW_ESTIMATE)
                              : fftw_plan_dft_c2r_1d(static_cast<int>(n0), state, real, FFTW_ESTIMATE);
  fftw_execute(backward);
  fftw_destroy_plan(backward);

  Histogram h;
  h.dimension = d;
  h.h = config.h;
  auto signed_index = [](std::size_t i, std::size_t l) {
    return i < l / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(l);
  };
  std::vector<std::pair<Site, double>> cells;
  for (std::size_t a = 0; a < n0; ++a)
    for (std::size_t b = 0; b < n1; ++b) {
      Site s{signed_index(a, n0), d == 2 ? signed_index(b, n1) : 0, 0};
      bool reachable = true;
      for (int k = 0; k < d; ++k) reachable = reachable && std::abs(s[k] - origin[k]) <= reach - start_reach;
      if (!reachable) continue;
      cells.emplace_back(s, real[a * n1 + b] / static_cast<double>(total));
    }
  std::sort(cells.begin(), cells.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  for (auto& [s, m] : cells) {
    h.sites.push_back(s);
    h.mass.push_back(m);
  }
  fftw_free(real);
  fftw_free(kernel);
  fftw_free(state);
  return h;
}

}  // namespace

Histogram euler_reference(const WalkConfig& config, const JumpTable& table, int steps, const ReflectingDomain* domain,
                          std::vector<double>* mass_trace) {
  config.validate();
  require(steps >= 0, ErrorKind::InvalidSpec, "step count must be nonnegative");
  if (domain) return euler_domain(config, table, steps, *domain, mass_trace);
  return euler_free(config, table, steps, mass_trace);
}

double total_variation(const Histogram& a, const Histogram& b) {
  require(a.dimension == b.dimension, ErrorKind::DimensionMismatch, "histograms of different dimension");
  long double tv = 0;
  std::size_t i = 0, j = 0;
  while (i < a.sites.size() || j < b.sites.size()) {
    if (j == b.sites.size() || (i < a.sites.size() && a.sites[i] < b.sites[j])) {
      tv += std::abs(a.mass[i++]);
    } else if (i == a.sites.size() || b.sites[j] < a.sites[i]) {
      tv += std::abs(b.mass[j++]);
    } else {
      tv += std::abs(a.mass[i++] - b.mass[j++]);
    }
  }
  return static_cast<double>(tv / 2);
}

}  // namespace niche
