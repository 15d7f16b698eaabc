#include "blindmimo/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace blindmimo {

namespace {

CMatrix unitary_dft(int n) {
  CMatrix f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      // Reduce r*c mod n before the trig call to keep the phase exact.
      const double phase = -2.0 * std::numbers::pi * static_cast<double>((r * c) % n) / n;
      f(r, c) = std::polar(scale, phase);
    }
  }
  return f;
}

}  // namespace

std::string_view to_string(ChannelModel model) {
  switch (model) {
    case ChannelModel::kClustered:
      return "clustered";
    case ChannelModel::kBernoulliGaussian:
      return "bernoulli_gaussian";
  }
  return "unknown";
}

ChannelModel parse_channel_model(std::string_view name) {
  if (name == "clustered") return ChannelModel::kClustered;
  if (name == "bernoulli_gaussian") return ChannelModel::kBernoulliGaussian;
  throw ParameterError("unknown channel model '" + std::string(name) + "'");
}

double effective_sparsity(const CMatrix& h_bar) {
  if (h_bar.size() == 0) return 0.0;
  const RMatrix mag = h_bar.cwiseAbs();
  const double threshold = 0.01 * mag.maxCoeff();
  const auto count = (mag.array() > threshold).count();
  return static_cast<double>(count) / static_cast<double>(h_bar.size());
}

ChannelRealization::ChannelRealization(CMatrix h_bar, ChannelModel model)
    : h_bar_(std::move(h_bar)), model_(model), theta_effective_(effective_sparsity(h_bar_)) {}

CMatrix steering_matrix(const ArrayGeometry& geom) {
  if (geom.n_h <= 0 || geom.n_v <= 0) throw ParameterError("steering_matrix: empty array");
  return Eigen::kroneckerProduct(unitary_dft(geom.n_v), unitary_dft(geom.n_h));
}

CVector array_response(double phi, double theta, const ArrayGeometry& geom) {
  const int m = geom.m_total();
  const double k0 = 2.0 * std::numbers::pi * geom.d_over_lambda;
  const double v_step = std::sin(phi) * std::sin(theta);
  const double h_step = std::cos(theta);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  CVector a(m);
  for (int iv = 0; iv < geom.n_v; ++iv) {
    for (int ih = 0; ih < geom.n_h; ++ih) {
      a(iv * geom.n_h + ih) = std::polar(scale, k0 * (iv * v_step + ih * h_step));
    }
  }
  return a;
}

PathSet draw_paths(int k_users, int n_paths, Rng& rng) {
  if (k_users <= 0 || n_paths <= 0) throw ParameterError("draw_paths: need k_users, n_paths > 0");
  PathSet paths(static_cast<std::size_t>(k_users));
  for (auto& user : paths) {
    user.gains.resize(n_paths);
    user.azimuths.resize(n_paths);
    user.zeniths.resize(n_paths);
    for (int l = 0; l < n_paths; ++l) {
      user.gains(l) = rng.complex_normal();
      user.azimuths(l) = rng.uniform(0.0, 2.0 * std::numbers::pi);
      user.zeniths(l) = rng.uniform(-std::numbers::pi / 2.0, std::numbers::pi / 2.0);
    }
  }
  return paths;
}

CMatrix spatial_channel(const PathSet& paths, const ArrayGeometry& geom) {
  if (paths.empty()) throw ParameterError("spatial_channel: empty path set");
  const int m = geom.m_total();
  CMatrix h = CMatrix::Zero(m, static_cast<Eigen::Index>(paths.size()));
  for (std::size_t k = 0; k < paths.size(); ++k) {
    const UserPaths& user = paths[k];
    const auto n = user.n_paths();
    if (n == 0) throw ParameterError("spatial_channel: user " + std::to_string(k) + " has no paths");
    if (user.azimuths.size() != n || user.zeniths.size() != n) {
      throw DimensionError("spatial_channel: path vectors of unequal length");
    }
    for (Eigen::Index l = 0; l < n; ++l) {
      h.col(static_cast<Eigen::Index>(k)) +=
          user.gains(l) * array_response(user.azimuths(l), user.zeniths(l), geom);
    }
    h.col(static_cast<Eigen::Index>(k)) *= std::sqrt(static_cast<double>(m) / static_cast<double>(n));
  }
  return h;
}

ChannelRealization clustered_channel(const PathSet& paths, const ArrayGeometry& geom) {
  return {to_angular(spatial_channel(paths, geom), steering_matrix(geom)), ChannelModel::kClustered};
}

ChannelRealization clustered_channel(int k_users, int n_paths, const ArrayGeometry& geom, Rng& rng) {
  return clustered_channel(draw_paths(k_users, n_paths, rng), geom);
}

ChannelRealization bernoulli_gaussian_channel(int m, int k, double theta, Rng& rng) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw ParameterError("bernoulli_gaussian_channel: theta must lie in (0, 1], got " +
                         std::to_string(theta));
  }
  if (m <= 0 || k <= 0) throw ParameterError("bernoulli_gaussian_channel: empty dimensions");
  CMatrix h(m, k);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < m; ++i) {
      const bool on = rng.bernoulli(theta);
      const cplx g = rng.complex_normal();
      h(i, j) = on ? g : cplx{0.0, 0.0};
    }
  }
  return {std::move(h), ChannelModel::kBernoulliGaussian};
}

CMatrix to_angular(const CMatrix& y, const CMatrix& u_m) {
  if (u_m.rows() != u_m.cols() || u_m.cols() != y.rows()) {
    throw DimensionError("to_angular: steering matrix is " + std::to_string(u_m.rows()) + "x" +
                         std::to_string(u_m.cols()) + " but y has " + std::to_string(y.rows()) +
                         " rows");
  }
  return u_m.adjoint() * y;
}

}  // namespace blindmimo
