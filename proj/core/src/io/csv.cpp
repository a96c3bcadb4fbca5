#include "flowrep/io/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "flowrep/errors.hpp"

namespace flowrep {

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_double(double v) {
    char buf[32];
    // Shortest representation that round-trips.
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

void write_feature_csv(const FeatureMatrix& m, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    for (const auto& name : m.names) f << csv_escape(name) << ',';
    f << "label\n";
    for (Eigen::Index i = 0; i < m.rows.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.rows.cols(); ++j) {
            f << format_double(m.rows(i, j)) << ',';
        }
        f << to_string(m.labels[static_cast<size_t>(i)]) << '\n';
    }
    if (!f) throw IoError("short write to " + path.string());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

}  // namespace

FeatureCsv read_feature_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(f, line)) throw IoError("empty feature csv " + path.string());
    FeatureCsv out;
    out.names = split_csv_line(line);
    if (out.names.empty() || out.names.back() != "label") {
        throw IoError("feature csv must end with a label column");
    }
    out.names.pop_back();

    std::vector<std::vector<double>> rows;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != out.names.size() + 1) {
            throw IoError("ragged feature csv row in " + path.string());
        }
        std::vector<double> row(out.names.size());
        for (size_t j = 0; j < out.names.size(); ++j) row[j] = std::stod(fields[j]);
        rows.push_back(std::move(row));
        out.labels.push_back(label_from_string(fields.back()));
    }
    out.rows.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(out.names.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        for (size_t j = 0; j < rows[i].size(); ++j) {
            out.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return out;
}

void write_flow_store(std::span<const Flow> flows, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << "flow_id,ts,size,ttl,flags,label\n";
    for (size_t i = 0; i < flows.size(); ++i) {
        const Flow& flow = flows[i];
        for (const Packet& p : flow.packets) {
            f << i << ',' << format_double(p.timestamp) << ',' << p.payload_size << ','
              << static_cast<int>(p.ttl) << ',' << static_cast<int>(p.tcp_flags.bits())
              << ',' << to_string(flow.label) << '\n';
        }
    }
    if (!f) throw IoError("short write to " + path.string());
}

std::vector<Flow> read_flow_store(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(f, line) || line != "flow_id,ts,size,ttl,flags,label") {
        throw IoError("bad flow store header in " + path.string());
    }
    std::vector<Flow> flows;
    long current_id = -1;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 6) throw IoError("ragged flow store row");
        const long id = std::stol(fields[0]);
        if (id != current_id) {
            if (id != current_id + 1) throw IoError("non-contiguous flow ids");
            flows.emplace_back();
            flows.back().label = label_from_string(fields[5]);
            current_id = id;
        }
        Packet p;
        p.timestamp = std::stod(fields[1]);
        p.payload_size = static_cast<uint32_t>(std::stoul(fields[2]));
        p.ttl = static_cast<uint8_t>(std::stoi(fields[3]));
        p.tcp_flags = TcpFlags::from_bits(static_cast<uint8_t>(std::stoi(fields[4])));
        if (p.tcp_flags.bits() != 0) p.protocol = kProtoTcp;
        flows.back().packets.push_back(p);
    }
    return flows;
}

}  // namespace flowrep
