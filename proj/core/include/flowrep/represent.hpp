#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowrep/types.hpp"

namespace flowrep {

enum class ReprKind { Stats, Size, Iat, IatSize, SampNum, SampSize };

std::string to_string(ReprKind kind);  // "STATS", "SIZE", "IAT", "IAT+SIZE", ...
ReprKind repr_kind_from_string(const std::string& s);

/// A complete representation recipe. fft is invalid for STATS; delta_t is
/// required (positive) exactly for the SAMP kinds.
struct RepresentationSpec {
    ReprKind kind = ReprKind::Stats;
    bool fft = false;
    bool with_header = false;
    int d0 = 2;
    double delta_t = 0.0;

    void validate() const;  // throws Error on an inconsistent spec
};

/// Feature dimension implied by a spec: STATS 10, SIZE d0, IAT d0-1,
/// IAT+SIZE 2*d0-1, SAMP-* d0-1; FFT preserves width; header adds 10.
int dimension_of(const RepresentationSpec& spec);

/// Column names matching dimension_of, e.g. "iat_0", "flag_SYN", "ttl_mean".
std::vector<std::string> feature_names(const RepresentationSpec& spec);

/// Tag for file names and reports, e.g. "SAMP-NUM-FFT+HEADER".
std::string repr_tag(const RepresentationSpec& spec);

/// Per-column z-score parameters fitted on training data. scale holds the
/// divisor actually applied: 1.0 for degenerate columns (std < 1e-12),
/// which are centered only.
struct Standardization {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;
    bool fitted = false;
};

struct FeatureMatrix {
    Eigen::MatrixXd rows;  // n x d
    RepresentationSpec spec;
    std::vector<std::string> names;
    std::vector<Label> labels;
    Standardization standardization;
    int zero_duration_flows = 0;  // rate floor applied (see stats_vector)

    Eigen::Index n() const { return rows.rows(); }
    Eigen::Index dim() const { return rows.cols(); }
};

/// 10 summary statistics: [duration, pkts/s, bytes/s, size mean, population
/// std, q1, q2, q3, min, max]. Quantiles use linear interpolation. A flow
/// whose packets share one timestamp gets its rates computed with a duration
/// floor of 1e-6 s; *zero_duration is set when provided.
Eigen::VectorXd stats_vector(const Flow& flow, bool* zero_duration = nullptr);

/// First d0 packet sizes, zero-padded at the tail.
Eigen::VectorXd size_series(const Flow& flow, int d0);

/// First d0-1 inter-arrival times, zero-padded at the tail.
Eigen::VectorXd iat_series(const Flow& flow, int d0);

/// [iat_series | size_series], dimension 2*d0-1.
Eigen::VectorXd iat_size_series(const Flow& flow, int d0);

enum class SampMode { Count, Bytes };

/// Packet count or byte total per window [t0 + i*delta_t, t0 + (i+1)*delta_t),
/// i = 0..d0-2. Packets beyond the last window are dropped.
Eigen::VectorXd samp_series(const Flow& flow, double delta_t, int d0, SampMode mode);

/// The 10 nearest-rank quantiles (10%..90%, 95%) of per-flow duration/d.
std::vector<double> delta_t_candidates(std::span<const Flow> flows, int d);

/// DFT magnitude spectrum |F_k|, k = 0..d-1 (same width as the input).
Eigen::VectorXd fft_magnitudes(const Eigen::VectorXd& series);

/// Per-flow TCP flag counts plus population mean/std of TTL.
struct HeaderBlock {
    std::array<int, 8> flag_counts{};  // FIN..CWR
    double ttl_mean = 0.0;
    double ttl_std = 0.0;

    Eigen::VectorXd flatten() const;  // 10-vector
};

HeaderBlock header_block(const Flow& flow);

/// Vectorize every flow under the given recipe (FFT and/or header
/// augmentation applied per flow). Labels are carried from the flows.
FeatureMatrix build_matrix(std::span<const Flow> flows, const RepresentationSpec& spec);

/// Fit per-column mean/std on this (training) matrix and apply in place.
void standardize_fit(FeatureMatrix& train);

/// Apply previously fitted parameters (test data). Throws DimensionMismatch.
void standardize_apply(FeatureMatrix& m, const Standardization& params);

}  // namespace flowrep
