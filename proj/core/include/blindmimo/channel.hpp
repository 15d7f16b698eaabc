#pragma once

#include <string_view>
#include <vector>

#include "blindmimo/random.hpp"
#include "blindmimo/types.hpp"

namespace blindmimo {

/// Uniform rectangular planar array; n_v == 1 is a uniform linear array.
struct ArrayGeometry {
  int n_h = 1;
  int n_v = 1;
  double d_over_lambda = 0.5;

  int m_total() const { return n_h * n_v; }
};

enum class ChannelModel { kClustered, kBernoulliGaussian };

std::string_view to_string(ChannelModel model);
ChannelModel parse_channel_model(std::string_view name);

/// Fraction of entries whose magnitude exceeds 1% of the largest magnitude.
double effective_sparsity(const CMatrix& h_bar);

/// Angular-domain channel matrix (M x K). theta_effective is derived from
/// h_bar on construction.
class ChannelRealization {
 public:
  ChannelRealization(CMatrix h_bar, ChannelModel model);

  const CMatrix& h_bar() const { return h_bar_; }
  ChannelModel model() const { return model_; }
  double theta_effective() const { return theta_effective_; }

 private:
  CMatrix h_bar_;
  ChannelModel model_;
  double theta_effective_;
};

/// Propagation paths of one user.
struct UserPaths {
  CVector gains;
  RVector azimuths;  // [0, 2pi)
  RVector zeniths;   // [-pi/2, pi/2)

  Eigen::Index n_paths() const { return gains.size(); }
};

using PathSet = std::vector<UserPaths>;

/// Kronecker product F_{n_v} (x) F_{n_h} of unitary DFT matrices.
CMatrix steering_matrix(const ArrayGeometry& geom);

/// Unit-norm response; entry n_v * N_h + n_h carries the phase
/// 2 pi d/lambda (n_v sin(phi) sin(theta) + n_h cos(theta)).
CVector array_response(double phi, double theta, const ArrayGeometry& geom);

/// Draws n_paths paths per user: CN(0,1) gains, azimuth U[0, 2pi), zenith U[-pi/2, pi/2).
PathSet draw_paths(int k_users, int n_paths, Rng& rng);

/// Spatial channel H(:,k) = sqrt(M / N_l) sum_l alpha_lk a(phi_lk, theta_lk).
CMatrix spatial_channel(const PathSet& paths, const ArrayGeometry& geom);

/// Clustered channel mapped to the angular domain by U_M^H.
ChannelRealization clustered_channel(const PathSet& paths, const ArrayGeometry& geom);
ChannelRealization clustered_channel(int k_users, int n_paths, const ArrayGeometry& geom, Rng& rng);

/// I.i.d. Bernoulli(theta) x CN(0,1) entries. Requires 0 < theta <= 1.
ChannelRealization bernoulli_gaussian_channel(int m, int k, double theta, Rng& rng);

/// U_M^H y.
CMatrix to_angular(const CMatrix& y, const CMatrix& u_m);

}  // namespace blindmimo
