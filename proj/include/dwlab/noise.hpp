#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <boost/random/normal_distribution.hpp>

#include "dwlab/rng.hpp"

namespace dwlab {

enum class NoiseFamily { Gaussian, SymmetricWeibull, StudentT };

std::string_view to_string(NoiseFamily family);
/// Accepts "gaussian", "weibull" / "symmetric_weibull", "studentt" / "student_t".
NoiseFamily parse_noise_family(std::string_view name);

/// Distribution of the i.i.d. innovations V_k. Every family is centred and scaled
/// to variance `sigma2`.
///
/// - Gaussian: N(0, sigma2).
/// - SymmetricWeibull: R * W with R a Rademacher sign and W Weibull of shape 2*beta,
///   0 < beta < 1. Its tail has E[exp(t |V|^{2 beta})] < inf for small t.
/// - StudentT: Student t with `nu` > 2 degrees of freedom, rescaled to variance sigma2.
struct NoiseSpec {
  NoiseFamily family = NoiseFamily::Gaussian;
  double sigma2 = 1.0;
  double beta = 0.5;
  double nu = 3.0;

  /// True for the families whose tails satisfy the Chen-Ledoux condition for b_n = n^alpha.
  bool satisfies_cl() const noexcept { return family != NoiseFamily::StudentT; }

  friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

/// Throws DomainError when the family parameters are out of range.
void validate_noise(const NoiseSpec& spec);

/// E[V^4]; +inf for StudentT with nu <= 4.
double fourth_moment(const NoiseSpec& spec);

/// Draws innovations for a validated spec. Holds only distribution constants.
class NoiseSampler {
 public:
  explicit NoiseSampler(const NoiseSpec& spec);

  double operator()(CounterRng& rng) {
    switch (family_) {
      case NoiseFamily::Gaussian:
        return scale_ * normal_(rng);
      case NoiseFamily::SymmetricWeibull:
        return weibull(rng);
      case NoiseFamily::StudentT:
        return scale_ * student(rng);
    }
    return 0.0;
  }

  void fill(CounterRng& rng, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = (*this)(rng);
  }

 private:
  double weibull(CounterRng& rng);
  double student(CounterRng& rng);

  NoiseFamily family_;
  double scale_ = 1.0;
  double inv_shape_ = 1.0;
  boost::random::normal_distribution<double> normal_;
  double nu_ = 3.0;
};

/// V_1..V_n for one substream. Identical (spec, n, stream) give identical output.
std::vector<double> sample_noise(const NoiseSpec& spec, std::size_t n, Substream stream);

}  // namespace dwlab
