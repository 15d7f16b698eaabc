#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "blindmimo/channel.hpp"
#include "blindmimo/random.hpp"
#include "blindmimo/types.hpp"

namespace blindmimo {

enum class ConstellationKind { kQpsk, kQam16 };

std::string_view to_string(ConstellationKind kind);
ConstellationKind parse_constellation(std::string_view name);

/// Unit-average-power alphabet indexed by Gray label: points[label].
struct Constellation {
  ConstellationKind kind;
  std::vector<cplx> points;
  int bits_per_symbol = 0;

  int size() const { return static_cast<int>(points.size()); }
  /// Largest point magnitude (S_inf).
  double peak_magnitude() const;
  /// Label of the nearest point; ties resolve to the smallest label.
  int nearest_label(cplx z) const;
  /// Bits of a label, most significant first.
  std::vector<std::uint8_t> label_bits(int label) const;
};

Constellation build_constellation(ConstellationKind kind);

/// Number of ID-header symbols: ceil(log_{|S|} K), i.e. the smallest L with |S|^L >= K.
int header_length(int k_users, int alphabet_size);

/// What the receiver knows about the frame structure: common reference symbol
/// in column 0, user-ID headers in columns 1..header_len.
struct FrameLayout {
  int t_len = 0;
  int header_len = 0;
  cplx ref_value;        // unscaled constellation point
  CMatrix id_codebook;   // K x header_len, unscaled points; row k is user k's ID

  int payload_begin() const { return 1 + header_len; }
};

/// Transmitted frame: x is K x T, scaled by 1/sqrt(T).
struct DataFrame {
  CMatrix x;
  LabelMatrix labels;  // Gray label of every symbol
  FrameLayout layout;

  /// Payload bits, row-major over users then columns.
  std::vector<std::uint8_t> payload_bits(const Constellation& c) const;
};

/// Builds a frame: reference symbol (Gray label 0), base-|S| big-endian user
/// index header, i.i.d. uniform payload. Requires t_len > 1 + header length.
DataFrame build_frame(int k_users, int t_len, const Constellation& c, Rng& rng);

/// I.i.d. uniform symbols scaled by 1/sqrt(T), no reference or header.
CMatrix random_symbol_matrix(int k_users, int t_len, const Constellation& c, Rng& rng);

struct ReceivedSignal {
  CMatrix y_bar;  // M x T angular domain
  double noise_variance = 0.0;
  RVector g_diag;
  RVector p_diag;
};

/// y_bar = H_bar G^{1/2} P^{1/2} X + Z, Z i.i.d. CN(0, sigma_z2).
ReceivedSignal synthesize_received(const ChannelRealization& hb, const CMatrix& x,
                                   const RVector& g_diag, const RVector& p_diag, double sigma_z2,
                                   Rng& rng);

inline ReceivedSignal synthesize_received(const ChannelRealization& hb, const DataFrame& frame,
                                          const RVector& g_diag, const RVector& p_diag,
                                          double sigma_z2, Rng& rng) {
  return synthesize_received(hb, frame.x, g_diag, p_diag, sigma_z2, rng);
}

/// ||X X^H - I||_F / sqrt(K).
double concentration_statistic(const CMatrix& x);

}  // namespace blindmimo
