#include "flowrep/represent.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "flowrep/capture.hpp"
#include "flowrep/errors.hpp"

namespace flowrep {

std::string to_string(ReprKind kind) {
    switch (kind) {
        case ReprKind::Stats: return "STATS";
        case ReprKind::Size: return "SIZE";
        case ReprKind::Iat: return "IAT";
        case ReprKind::IatSize: return "IAT+SIZE";
        case ReprKind::SampNum: return "SAMP-NUM";
        case ReprKind::SampSize: return "SAMP-SIZE";
    }
    return "STATS";
}

ReprKind repr_kind_from_string(const std::string& s) {
    if (s == "STATS") return ReprKind::Stats;
    if (s == "SIZE") return ReprKind::Size;
    if (s == "IAT") return ReprKind::Iat;
    if (s == "IAT+SIZE") return ReprKind::IatSize;
    if (s == "SAMP-NUM") return ReprKind::SampNum;
    if (s == "SAMP-SIZE") return ReprKind::SampSize;
    throw Error("unknown representation: " + s);
}

void RepresentationSpec::validate() const {
    if (kind == ReprKind::Stats && fft) {
        throw Error("FFT is not defined for STATS");
    }
    const bool samp = kind == ReprKind::SampNum || kind == ReprKind::SampSize;
    if (samp && !(delta_t > 0.0)) {
        throw Error("SAMP representations require delta_t > 0");
    }
    if (d0 < 2) throw Error("d0 must be >= 2");
}

int dimension_of(const RepresentationSpec& spec) {
    int base = 0;
    switch (spec.kind) {
        case ReprKind::Stats: base = 10; break;
        case ReprKind::Size: base = spec.d0; break;
        case ReprKind::Iat: base = spec.d0 - 1; break;
        case ReprKind::IatSize: base = 2 * spec.d0 - 1; break;
        case ReprKind::SampNum:
        case ReprKind::SampSize: base = spec.d0 - 1; break;
    }
    return base + (spec.with_header ? 10 : 0);
}

namespace {

std::string series_prefix(ReprKind kind) {
    switch (kind) {
        case ReprKind::Size: return "size";
        case ReprKind::Iat: return "iat";
        case ReprKind::IatSize: return "iat_size";
        case ReprKind::SampNum: return "samp_num";
        case ReprKind::SampSize: return "samp_size";
        default: return "stats";
    }
}

const char* kHeaderNames[10] = {"flag_FIN", "flag_SYN", "flag_RST", "flag_PSH",
                                "flag_ACK", "flag_URG", "flag_ECE", "flag_CWR",
                                "ttl_mean", "ttl_std"};

}  // namespace

std::vector<std::string> feature_names(const RepresentationSpec& spec) {
    std::vector<std::string> names;
    if (spec.kind == ReprKind::Stats) {
        names = {"duration", "pkts_per_sec", "bytes_per_sec", "size_mean",
                 "size_std", "size_q1", "size_q2", "size_q3", "size_min",
                 "size_max"};
    } else {
        RepresentationSpec base = spec;
        base.with_header = false;
        const int d = dimension_of(base);
        if (spec.fft) {
            const std::string prefix = series_prefix(spec.kind) + "_fft_";
            for (int i = 0; i < d; ++i) names.push_back(prefix + std::to_string(i));
        } else if (spec.kind == ReprKind::IatSize) {
            for (int i = 0; i < spec.d0 - 1; ++i) names.push_back("iat_" + std::to_string(i));
            for (int i = 0; i < spec.d0; ++i) names.push_back("size_" + std::to_string(i));
        } else {
            const std::string prefix = series_prefix(spec.kind) + "_";
            for (int i = 0; i < d; ++i) names.push_back(prefix + std::to_string(i));
        }
    }
    if (spec.with_header) {
        for (const char* n : kHeaderNames) names.emplace_back(n);
    }
    return names;
}

std::string repr_tag(const RepresentationSpec& spec) {
    std::string tag = to_string(spec.kind);
    if (spec.fft) tag += "-FFT";
    if (spec.with_header) tag += "+HEADER";
    return tag;
}

Eigen::VectorXd stats_vector(const Flow& flow, bool* zero_duration) {
    const auto& pkts = flow.packets;
    const auto n = static_cast<double>(pkts.size());

    std::vector<double> sizes(pkts.size());
    double total_bytes = 0.0;
    for (size_t i = 0; i < pkts.size(); ++i) {
        sizes[i] = static_cast<double>(pkts[i].payload_size);
        total_bytes += sizes[i];
    }
    std::sort(sizes.begin(), sizes.end());

    const double duration = flow.duration();
    const double rate_dur = std::max(duration, 1e-6);
    if (zero_duration != nullptr) *zero_duration = duration <= 0.0;

    const double mean = total_bytes / n;
    double var = 0.0;
    for (double s : sizes) var += (s - mean) * (s - mean);
    var /= n;

    // Type-7 quantile (linear interpolation) over the sorted sizes.
    auto quantile = [&](double q) {
        const double h = q * (n - 1.0);
        const auto lo = static_cast<size_t>(std::floor(h));
        const size_t hi = std::min(lo + 1, sizes.size() - 1);
        return sizes[lo] + (h - std::floor(h)) * (sizes[hi] - sizes[lo]);
    };

    Eigen::VectorXd v(10);
    v << duration, n / rate_dur, total_bytes / rate_dur, mean, std::sqrt(var),
        quantile(0.25), quantile(0.50), quantile(0.75), sizes.front(), sizes.back();
    return v;
}

Eigen::VectorXd size_series(const Flow& flow, int d0) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d0);
    const auto m = std::min<size_t>(flow.packets.size(), static_cast<size_t>(d0));
    for (size_t i = 0; i < m; ++i) {
        v[static_cast<Eigen::Index>(i)] = static_cast<double>(flow.packets[i].payload_size);
    }
    return v;
}

Eigen::VectorXd iat_series(const Flow& flow, int d0) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d0 - 1);
    const auto m = std::min<size_t>(flow.packets.size() - 1, static_cast<size_t>(d0 - 1));
    for (size_t i = 0; i < m; ++i) {
        v[static_cast<Eigen::Index>(i)] =
            flow.packets[i + 1].timestamp - flow.packets[i].timestamp;
    }
    return v;
}

Eigen::VectorXd iat_size_series(const Flow& flow, int d0) {
    Eigen::VectorXd v(2 * d0 - 1);
    v << iat_series(flow, d0), size_series(flow, d0);
    return v;
}

Eigen::VectorXd samp_series(const Flow& flow, double delta_t, int d0, SampMode mode) {
    if (!(delta_t > 0.0)) throw Error("samp_series requires delta_t > 0");
    const int d = d0 - 1;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
    const double t0 = flow.packets.front().timestamp;
    for (const Packet& p : flow.packets) {
        const auto idx = static_cast<long>(std::floor((p.timestamp - t0) / delta_t));
        if (idx < 0 || idx >= d) continue;  // beyond the last window
        v[idx] += mode == SampMode::Count ? 1.0 : static_cast<double>(p.payload_size);
    }
    return v;
}

std::vector<double> delta_t_candidates(std::span<const Flow> flows, int d) {
    if (flows.empty()) throw EmptyInput("delta_t_candidates of empty input");
    std::vector<double> values;
    values.reserve(flows.size());
    for (const Flow& f : flows) values.push_back(f.duration() / static_cast<double>(d));
    std::vector<double> out;
    out.reserve(10);
    for (int pct : {10, 20, 30, 40, 50, 60, 70, 80, 90, 95}) {
        out.push_back(percentile(values, pct / 100.0));
    }
    return out;
}

namespace {

using Cvec = std::vector<std::complex<double>>;

int smallest_prime_factor(int n) {
    for (int p = 2; p * p <= n; ++p) {
        if (n % p == 0) return p;
    }
    return n;
}

// Mixed-radix Cooley-Tukey; prime lengths fall back to the direct sum.
Cvec dft(const Cvec& x) {
    const int n = static_cast<int>(x.size());
    if (n == 1) return x;
    const int p = smallest_prime_factor(n);
    if (p == n) {
        Cvec out(static_cast<size_t>(n));
        for (int k = 0; k < n; ++k) {
            std::complex<double> acc(0.0, 0.0);
            for (int j = 0; j < n; ++j) {
                const double ang = -2.0 * M_PI * k * j / n;
                acc += x[static_cast<size_t>(j)] * std::polar(1.0, ang);
            }
            out[static_cast<size_t>(k)] = acc;
        }
        return out;
    }
    const int m = n / p;
    std::vector<Cvec> sub(static_cast<size_t>(p));
    for (int s = 0; s < p; ++s) {
        sub[static_cast<size_t>(s)].resize(static_cast<size_t>(m));
        for (int t = 0; t < m; ++t) {
            sub[static_cast<size_t>(s)][static_cast<size_t>(t)] =
                x[static_cast<size_t>(s + p * t)];
        }
        sub[static_cast<size_t>(s)] = dft(sub[static_cast<size_t>(s)]);
    }
    Cvec out(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (int s = 0; s < p; ++s) {
            const double ang = -2.0 * M_PI * s * k / n;
            acc += std::polar(1.0, ang) * sub[static_cast<size_t>(s)][static_cast<size_t>(k % m)];
        }
        out[static_cast<size_t>(k)] = acc;
    }
    return out;
}

}  // namespace

Eigen::VectorXd fft_magnitudes(const Eigen::VectorXd& series) {
    const auto n = static_cast<size_t>(series.size());
    Cvec x(n);
    for (size_t i = 0; i < n; ++i) x[i] = {series[static_cast<Eigen::Index>(i)], 0.0};
    const Cvec spectrum = dft(x);
    Eigen::VectorXd mags(series.size());
    for (size_t i = 0; i < n; ++i) mags[static_cast<Eigen::Index>(i)] = std::abs(spectrum[i]);
    return mags;
}

Eigen::VectorXd HeaderBlock::flatten() const {
    Eigen::VectorXd v(10);
    for (int i = 0; i < 8; ++i) v[i] = static_cast<double>(flag_counts[static_cast<size_t>(i)]);
    v[8] = ttl_mean;
    v[9] = ttl_std;
    return v;
}

HeaderBlock header_block(const Flow& flow) {
    HeaderBlock h;
    double ttl_sum = 0.0;
    for (const Packet& p : flow.packets) {
        const TcpFlags& f = p.tcp_flags;
        const bool set[8] = {f.fin, f.syn, f.rst, f.psh, f.ack, f.urg, f.ece, f.cwr};
        for (size_t i = 0; i < 8; ++i) h.flag_counts[i] += set[i] ? 1 : 0;
        ttl_sum += p.ttl;
    }
    const auto n = static_cast<double>(flow.packets.size());
    h.ttl_mean = ttl_sum / n;
    double var = 0.0;
    for (const Packet& p : flow.packets) {
        var += (p.ttl - h.ttl_mean) * (p.ttl - h.ttl_mean);
    }
    h.ttl_std = std::sqrt(var / n);
    return h;
}

FeatureMatrix build_matrix(std::span<const Flow> flows, const RepresentationSpec& spec) {
    spec.validate();
    if (flows.empty()) throw EmptyInput("build_matrix of empty flow set");

    FeatureMatrix m;
    m.spec = spec;
    m.names = feature_names(spec);
    const int d = dimension_of(spec);
    m.rows.resize(static_cast<Eigen::Index>(flows.size()), d);
    m.labels.reserve(flows.size());

    for (size_t i = 0; i < flows.size(); ++i) {
        const Flow& f = flows[i];
        Eigen::VectorXd base;
        switch (spec.kind) {
            case ReprKind::Stats: {
                bool zero_dur = false;
                base = stats_vector(f, &zero_dur);
                if (zero_dur) m.zero_duration_flows++;
                break;
            }
            case ReprKind::Size: base = size_series(f, spec.d0); break;
            case ReprKind::Iat: base = iat_series(f, spec.d0); break;
            case ReprKind::IatSize: base = iat_size_series(f, spec.d0); break;
            case ReprKind::SampNum:
                base = samp_series(f, spec.delta_t, spec.d0, SampMode::Count);
                break;
            case ReprKind::SampSize:
                base = samp_series(f, spec.delta_t, spec.d0, SampMode::Bytes);
                break;
        }
        if (spec.fft) base = fft_magnitudes(base);
        if (spec.with_header) {
            Eigen::VectorXd augmented(base.size() + 10);
            augmented << base, header_block(f).flatten();
            base = std::move(augmented);
        }
        if (base.size() != d) throw DimensionMismatch("representation width mismatch");
        m.rows.row(static_cast<Eigen::Index>(i)) = base.transpose();
        m.labels.push_back(f.label);
    }
    return m;
}

void standardize_fit(FeatureMatrix& train) {
    const auto n = static_cast<double>(train.rows.rows());
    Eigen::VectorXd mean = train.rows.colwise().mean();
    Eigen::MatrixXd centered = train.rows.rowwise() - mean.transpose();
    Eigen::VectorXd std_dev = (centered.array().square().colwise().sum() / n).sqrt();

    Eigen::VectorXd scale = std_dev;
    for (Eigen::Index j = 0; j < scale.size(); ++j) {
        if (scale[j] < 1e-12) scale[j] = 1.0;  // degenerate column: center only
    }
    train.rows = centered.array().rowwise() / scale.transpose().array();
    train.standardization = {std::move(mean), std::move(scale), true};
}

void standardize_apply(FeatureMatrix& m, const Standardization& params) {
    if (!params.fitted) throw Error("standardize_apply: parameters not fitted");
    if (params.mean.size() != m.rows.cols()) {
        throw DimensionMismatch("standardization width mismatch");
    }
    m.rows = (m.rows.rowwise() - params.mean.transpose()).array().rowwise() /
             params.scale.transpose().array();
    m.standardization = params;
}

}  // namespace flowrep
