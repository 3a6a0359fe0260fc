#include "dwlab/noise.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "dwlab/errors.hpp"

namespace dwlab {

std::string_view to_string(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::Gaussian:
      return "gaussian";
    case NoiseFamily::SymmetricWeibull:
      return "weibull";
    case NoiseFamily::StudentT:
      return "studentt";
  }
  return "unknown";
}

NoiseFamily parse_noise_family(std::string_view name) {
  std::string lower;
  for (char c : name) {
    if (c == '-' || c == '_') continue;
    lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (lower == "gaussian" || lower == "normal") return NoiseFamily::Gaussian;
  if (lower == "weibull" || lower == "symmetricweibull") return NoiseFamily::SymmetricWeibull;
  if (lower == "studentt" || lower == "t" || lower == "student") return NoiseFamily::StudentT;
  throw DomainError("unknown noise family '" + std::string(name) + "' (expected gaussian, weibull or studentt)");
}

void validate_noise(const NoiseSpec& spec) {
  if (!(spec.sigma2 > 0)) throw DomainError("noise variance sigma2 must be > 0");
  switch (spec.family) {
    case NoiseFamily::Gaussian:
      break;
    case NoiseFamily::SymmetricWeibull:
      if (!(spec.beta > 0 && spec.beta < 1))
        throw DomainError("weibull beta must lie in (0, 1), got " + std::to_string(spec.beta));
      break;
    case NoiseFamily::StudentT:
      if (!(spec.nu > 2) || !std::isfinite(spec.nu))
        throw DomainError("student t needs nu > 2 for variance rescaling, got " + std::to_string(spec.nu));
      break;
  }
}

namespace {

// Scale of the Weibull magnitude so that E[W^2] = sigma2 for shape k.
double weibull_scale(double sigma2, double shape) { return std::sqrt(sigma2 / std::tgamma(1.0 + 2.0 / shape)); }

}  // namespace

double fourth_moment(const NoiseSpec& spec) {
  validate_noise(spec);
  const double s4 = spec.sigma2 * spec.sigma2;
  switch (spec.family) {
    case NoiseFamily::Gaussian:
      return 3.0 * s4;
    case NoiseFamily::SymmetricWeibull: {
      const double shape = 2.0 * spec.beta;
      const double lambda = weibull_scale(spec.sigma2, shape);
      return std::pow(lambda, 4) * std::tgamma(1.0 + 4.0 / shape);
    }
    case NoiseFamily::StudentT:
      if (spec.nu <= 4) return std::numeric_limits<double>::infinity();
      return 3.0 * s4 * (spec.nu - 2.0) / (spec.nu - 4.0);
  }
  return 0.0;
}

NoiseSampler::NoiseSampler(const NoiseSpec& spec)
    : family_(spec.family), nu_(spec.nu) {
  validate_noise(spec);
  switch (family_) {
    case NoiseFamily::Gaussian:
      scale_ = std::sqrt(spec.sigma2);
      break;
    case NoiseFamily::SymmetricWeibull:
      inv_shape_ = 1.0 / (2.0 * spec.beta);
      scale_ = weibull_scale(spec.sigma2, 2.0 * spec.beta);
      break;
    case NoiseFamily::StudentT:
      scale_ = std::sqrt(spec.sigma2 * (spec.nu - 2.0) / spec.nu);
      break;
  }
}

double NoiseSampler::weibull(CounterRng& rng) {
  // One 64-bit draw: the top 53 bits give the uniform, the lowest bit the sign.
  const std::uint64_t bits = rng();
  const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
  const double magnitude = scale_ * std::pow(-std::log1p(-u), inv_shape_);
  return (bits & 1u) ? -magnitude : magnitude;
}

double NoiseSampler::student(CounterRng& rng) {
  // Bailey's polar method.
  double u = 0, w = 0;
  do {
    u = 2.0 * rng.uniform() - 1.0;
    const double v = 2.0 * rng.uniform() - 1.0;
    w = u * u + v * v;
  } while (w >= 1.0 || w == 0.0);
  return u * std::sqrt(nu_ * (std::pow(w, -2.0 / nu_) - 1.0) / w);
}

std::vector<double> sample_noise(const NoiseSpec& spec, std::size_t n, Substream stream) {
  if (n < 1) throw DomainError("sample_noise needs n >= 1");
  NoiseSampler sampler(spec);
  CounterRng rng(stream);
  std::vector<double> out(n);
  sampler.fill(rng, out.data(), n);
  return out;
}

}  // namespace dwlab
