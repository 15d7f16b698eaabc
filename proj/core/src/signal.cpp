#include "blindmimo/signal.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace blindmimo {

std::string_view to_string(ConstellationKind kind) {
  switch (kind) {
    case ConstellationKind::kQpsk:
      return "QPSK";
    case ConstellationKind::kQam16:
      return "QAM16";
  }
  return "unknown";
}

ConstellationKind parse_constellation(std::string_view name) {
  if (name == "QPSK" || name == "qpsk") return ConstellationKind::kQpsk;
  if (name == "QAM16" || name == "qam16" || name == "16QAM") return ConstellationKind::kQam16;
  throw ParameterError("unknown constellation '" + std::string(name) + "'");
}

double Constellation::peak_magnitude() const {
  double peak = 0.0;
  for (const cplx& p : points) peak = std::max(peak, std::abs(p));
  return peak;
}

int Constellation::nearest_label(cplx z) const {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int label = 0; label < size(); ++label) {
    const double d = std::norm(z - points[static_cast<std::size_t>(label)]);
    if (d < best_d) {
      best_d = d;
      best = label;
    }
  }
  return best;
}

std::vector<std::uint8_t> Constellation::label_bits(int label) const {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(bits_per_symbol));
  for (int b = 0; b < bits_per_symbol; ++b) {
    bits[static_cast<std::size_t>(b)] = static_cast<std::uint8_t>((label >> (bits_per_symbol - 1 - b)) & 1);
  }
  return bits;
}

Constellation build_constellation(ConstellationKind kind) {
  Constellation c{kind, {}, 0};
  switch (kind) {
    case ConstellationKind::kQpsk: {
      // label = (b_I b_Q); bit 0 -> +1, bit 1 -> -1 on each axis.
      c.bits_per_symbol = 2;
      for (int label = 0; label < 4; ++label) {
        const double re = (label & 2) ? -1.0 : 1.0;
        const double im = (label & 1) ? -1.0 : 1.0;
        c.points.emplace_back(re * M_SQRT1_2, im * M_SQRT1_2);
      }
      break;
    }
    case ConstellationKind::kQam16: {
      // Per-axis Gray code 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
      c.bits_per_symbol = 4;
      const auto level = [](int two_bits) {
        switch (two_bits) {
          case 0b00:
            return -3.0;
          case 0b01:
            return -1.0;
          case 0b11:
            return 1.0;
          default:
            return 3.0;
        }
      };
      const double scale = 1.0 / std::sqrt(10.0);
      for (int label = 0; label < 16; ++label) {
        c.points.emplace_back(level(label >> 2) * scale, level(label & 3) * scale);
      }
      break;
    }
  }
  return c;
}

int header_length(int k_users, int alphabet_size) {
  if (k_users <= 0 || alphabet_size < 2) throw ParameterError("header_length: invalid arguments");
  int len = 0;
  long long reach = 1;
  while (reach < k_users) {
    reach *= alphabet_size;
    ++len;
  }
  return len;
}

std::vector<std::uint8_t> DataFrame::payload_bits(const Constellation& c) const {
  std::vector<std::uint8_t> bits;
  const int begin = layout.payload_begin();
  bits.reserve(static_cast<std::size_t>(labels.rows() * (labels.cols() - begin) * c.bits_per_symbol));
  for (Eigen::Index k = 0; k < labels.rows(); ++k) {
    for (Eigen::Index t = begin; t < labels.cols(); ++t) {
      for (std::uint8_t b : c.label_bits(labels(k, t))) bits.push_back(b);
    }
  }
  return bits;
}

DataFrame build_frame(int k_users, int t_len, const Constellation& c, Rng& rng) {
  if (k_users <= 0) throw ParameterError("build_frame: k_users must be positive");
  const int q = c.size();
  const int header_len = header_length(k_users, q);
  if (t_len <= 1 + header_len) {
    throw ParameterError("build_frame: frame length " + std::to_string(t_len) +
                         " too short for reference + " + std::to_string(header_len) + " header symbols");
  }

  DataFrame frame;
  frame.labels.resize(k_users, t_len);
  frame.layout.t_len = t_len;
  frame.layout.header_len = header_len;
  frame.layout.ref_value = c.points[0];
  frame.layout.id_codebook.resize(k_users, header_len);

  for (int k = 0; k < k_users; ++k) {
    frame.labels(k, 0) = 0;
    int index = k;
    // Big-endian base-q digits of the user index.
    for (int d = header_len - 1; d >= 0; --d) {
      const int digit = index % q;
      index /= q;
      frame.labels(k, 1 + d) = digit;
      frame.layout.id_codebook(k, d) = c.points[static_cast<std::size_t>(digit)];
    }
  }
  for (int t = 1 + header_len; t < t_len; ++t) {
    for (int k = 0; k < k_users; ++k) frame.labels(k, t) = rng.uniform_index(q);
  }

  const double scale = 1.0 / std::sqrt(static_cast<double>(t_len));
  frame.x.resize(k_users, t_len);
  for (int k = 0; k < k_users; ++k) {
    for (int t = 0; t < t_len; ++t) {
      frame.x(k, t) = c.points[static_cast<std::size_t>(frame.labels(k, t))] * scale;
    }
  }
  return frame;
}

CMatrix random_symbol_matrix(int k_users, int t_len, const Constellation& c, Rng& rng) {
  if (k_users <= 0 || t_len <= 0) throw ParameterError("random_symbol_matrix: empty dimensions");
  const double scale = 1.0 / std::sqrt(static_cast<double>(t_len));
  CMatrix x(k_users, t_len);
  for (int t = 0; t < t_len; ++t) {
    for (int k = 0; k < k_users; ++k) {
      x(k, t) = c.points[static_cast<std::size_t>(rng.uniform_index(c.size()))] * scale;
    }
  }
  return x;
}

ReceivedSignal synthesize_received(const ChannelRealization& hb, const CMatrix& x,
                                   const RVector& g_diag, const RVector& p_diag, double sigma_z2,
                                   Rng& rng) {
  const CMatrix& h = hb.h_bar();
  const Eigen::Index k = h.cols();
  if (x.rows() != k) throw DimensionError("synthesize_received: channel/frame user count mismatch");
  if (g_diag.size() != k || p_diag.size() != k) {
    throw DimensionError("synthesize_received: g_diag/p_diag length must equal K");
  }
  if (!(sigma_z2 >= 0.0)) throw ParameterError("synthesize_received: negative noise variance");
  if ((g_diag.array() <= 0.0).any() || (p_diag.array() <= 0.0).any()) {
    throw ParameterError("synthesize_received: G and P must be strictly positive");
  }

  const RVector amp = (g_diag.array() * p_diag.array()).sqrt();
  ReceivedSignal out;
  out.y_bar = h * amp.cast<cplx>().asDiagonal() * x;
  if (sigma_z2 > 0.0) {
    const double sd = std::sqrt(sigma_z2);
    out.y_bar += sd * rng.complex_normal_matrix(h.rows(), x.cols());
  }
  out.noise_variance = sigma_z2;
  out.g_diag = g_diag;
  out.p_diag = p_diag;
  return out;
}

double concentration_statistic(const CMatrix& x) {
  const Eigen::Index k = x.rows();
  if (k == 0) return 0.0;
  return (x * x.adjoint() - CMatrix::Identity(k, k)).norm() / std::sqrt(static_cast<double>(k));
}

}  // namespace blindmimo
