#include "starnoise/criteria.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace starnoise {

namespace {

// (prod xs)^(1/p) in log space so that large-n products of sub-unit factors
// do not underflow. A zero factor collapses the product; spectrum values may
// carry -1e-12-scale numerical noise and are clamped to zero.
double product_pow(std::span<const double> xs, int p) {
  double acc = 0.0;
  for (double x : xs) {
    if (x < 0.0) {
      if (x < -1e-12)
        throw std::invalid_argument("product_pow: negative factor " + std::to_string(x));
      x = 0.0;
    }
    if (x == 0.0) return 0.0;
    acc += std::log(x);
  }
  return std::exp(acc / static_cast<double>(p));
}

void validate_config(const StarConfig& config) {
  if (config.n < 1)
    throw std::invalid_argument("StarConfig: n must be >= 1, got " + std::to_string(config.n));
  if (static_cast<int>(config.sources.size()) != config.n)
    throw std::invalid_argument("StarConfig: expected " + std::to_string(config.n) +
                                " source records, got " +
                                std::to_string(config.sources.size()));
  for (const SourceNoise& s : config.sources) validate_noise(s);
}

void validate_spectra(std::span<const CorrelationSpectrum> spectra, int n) {
  if (spectra.empty()) throw std::invalid_argument("criteria: spectra list is empty");
  if (static_cast<int>(spectra.size()) != n)
    throw std::invalid_argument("criteria: expected " + std::to_string(n) + " spectra, got " +
                                std::to_string(spectra.size()));
}

void require_no_channel(const StarConfig& config, const char* which) {
  for (const SourceNoise& s : config.sources)
    if (s.gamma_amp != 0.0 || s.xi_amp != 0.0 || s.gamma_ph != 0.0 || s.xi_ph != 0.0)
      throw std::invalid_argument(std::string(which) +
                                  ": channel parameters must be zero for this closed form");
}

double visibility_factor(const StarConfig& config, int p) {
  std::vector<double> mb(config.sources.size());
  for (std::size_t i = 0; i < config.sources.size(); ++i)
    mb[i] = config.sources[i].mu * config.sources[i].beta;
  return product_pow(mb, p);
}

double spectra_root(std::span<const CorrelationSpectrum> spectra, int p) {
  std::vector<double> t1(spectra.size()), t2(spectra.size());
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    t1[i] = spectra[i].t1;
    t2[i] = spectra[i].t2;
  }
  return std::sqrt(product_pow(t1, p) + product_pow(t2, p));
}

}  // namespace

StarConfig StarConfig::consistent(int n, const SourceNoise& noise, ChannelKind kind) {
  StarConfig c;
  c.n = n;
  c.sources.assign(static_cast<std::size_t>(std::max(n, 0)), noise);
  c.channel_kind = kind;
  return c;
}

CriterionResult CriterionResult::from_s(double s) {
  CriterionResult r;
  r.s = s;
  r.violated = s > 1.0;
  return r;
}

CriterionResult CriterionResult::from_ij(double i, double j, int n) {
  if (n < 1) throw std::invalid_argument("CriterionResult::from_ij: n must be >= 1");
  CriterionResult r;
  r.s = std::pow(std::abs(i), 1.0 / n) + std::pow(std::abs(j), 1.0 / n);
  r.i_term = i;
  r.j_term = j;
  r.violated = r.s > 1.0;
  return r;
}

CriterionResult s_star_noiseless(std::span<const CorrelationSpectrum> spectra, int n) {
  if (n < 1) throw std::invalid_argument("s_star_noiseless: n must be >= 1");
  validate_spectra(spectra, n);
  return CriterionResult::from_s(spectra_root(spectra, n));
}

CriterionResult s_star_noisy(const StarConfig& config,
                             std::span<const CorrelationSpectrum> spectra) {
  validate_config(config);
  validate_spectra(spectra, config.n);
  return CriterionResult::from_s(visibility_factor(config, config.n) *
                                 spectra_root(spectra, config.n));
}

CriterionResult s_star_gate_noise(const StarConfig& config) {
  validate_config(config);
  if (config.channel_kind != ChannelKind::none)
    throw std::invalid_argument("s_star_gate_noise: channel kind must be none");
  require_no_channel(config, "s_star_gate_noise");

  const int n = config.n;
  std::vector<double> bmd(config.sources.size()), alphas(config.sources.size());
  for (std::size_t i = 0; i < config.sources.size(); ++i) {
    const SourceNoise& s = config.sources[i];
    bmd[i] = s.beta * s.mu * s.delta;
    alphas[i] = s.alpha;
  }
  const double ga = product_pow(alphas, n);
  return CriterionResult::from_s(product_pow(bmd, n) * std::sqrt(ga * ga + 1.0));
}

CriterionResult s_star_ad(const StarConfig& config) {
  validate_config(config);
  if (config.channel_kind != ChannelKind::amp)
    throw std::invalid_argument("s_star_ad: channel kind must be amp");
  for (const SourceNoise& s : config.sources)
    if (s.gamma_ph != 0.0 || s.xi_ph != 0.0)
      throw std::invalid_argument("s_star_ad: phase-damping parameters must be zero");

  const int n = config.n;
  std::vector<double> xy(config.sources.size()), zz(config.sources.size()),
      bm(config.sources.size());
  for (std::size_t i = 0; i < config.sources.size(); ++i) {
    const SourceNoise& s = config.sources[i];
    const double d_amp = (1.0 - s.gamma_amp) * (1.0 - s.xi_amp);
    xy[i] = s.alpha * s.alpha * s.delta * s.delta * d_amp;
    zz[i] = s.delta * d_amp + s.gamma_amp * s.xi_amp;
    bm[i] = s.beta * s.mu;
  }
  const double xy_root = product_pow(xy, n);
  const double z_root = product_pow(zz, n);
  const double f1 = 2.0 * xy_root;
  const double f2 = xy_root + z_root * z_root;
  return CriterionResult::from_s(product_pow(bm, n) * std::sqrt(std::max(f1, f2)));
}

CriterionResult s_star_pd(const StarConfig& config) {
  validate_config(config);
  if (config.channel_kind != ChannelKind::ph)
    throw std::invalid_argument("s_star_pd: channel kind must be ph");
  for (const SourceNoise& s : config.sources)
    if (s.gamma_amp != 0.0 || s.xi_amp != 0.0)
      throw std::invalid_argument("s_star_pd: amplitude-damping parameters must be zero");

  const int n = config.n;
  std::vector<double> xy(config.sources.size()), deltas(config.sources.size()),
      bm(config.sources.size());
  for (std::size_t i = 0; i < config.sources.size(); ++i) {
    const SourceNoise& s = config.sources[i];
    const double d_ph = (1.0 - s.gamma_ph) * (1.0 - s.xi_ph);
    xy[i] = s.alpha * s.alpha * s.delta * s.delta * d_ph;
    deltas[i] = s.delta;
    bm[i] = s.beta * s.mu;
  }
  const double d_root = product_pow(deltas, n);
  return CriterionResult::from_s(product_pow(bm, n) *
                                 std::sqrt(product_pow(xy, n) + d_root * d_root));
}

CriterionResult s_noncyclic(const StarConfig& config,
                            std::span<const CorrelationSpectrum> spectra, int p_n) {
  validate_config(config);
  validate_spectra(spectra, config.n);
  if (p_n < 1 || p_n > config.n)
    throw std::invalid_argument("s_noncyclic: p_n must lie in [1, n], got " +
                                std::to_string(p_n));
  return CriterionResult::from_s(visibility_factor(config, p_n) * spectra_root(spectra, p_n));
}

double consistent_gate_value(double alpha, double delta, double mu, double beta) {
  SourceNoise s;
  s.alpha = alpha;
  s.delta = delta;
  s.mu = mu;
  s.beta = beta;
  validate_noise(s);
  return beta * mu * delta * std::sqrt(alpha * alpha + 1.0);
}

double consistent_ad_value(double alpha, double delta, double mu, double beta, double gamma,
                           double xi) {
  SourceNoise s;
  s.alpha = alpha;
  s.delta = delta;
  s.mu = mu;
  s.beta = beta;
  s.gamma_amp = gamma;
  s.xi_amp = xi;
  validate_noise(s);
  const double d_amp = (1.0 - gamma) * (1.0 - xi);
  const double xy = alpha * alpha * delta * delta * d_amp;
  const double f1 = 2.0 * xy;
  const double z = delta * d_amp + gamma * xi;
  const double f2 = xy + z * z;
  return beta * mu * std::sqrt(std::max(f1, f2));
}

double consistent_pd_value(double alpha, double delta, double mu, double beta, double gamma,
                           double xi) {
  SourceNoise s;
  s.alpha = alpha;
  s.delta = delta;
  s.mu = mu;
  s.beta = beta;
  s.gamma_ph = gamma;
  s.xi_ph = xi;
  validate_noise(s);
  return beta * mu * delta * std::sqrt(alpha * alpha * (1.0 - gamma) * (1.0 - xi) + 1.0);
}

}  // namespace starnoise
