#include "flowrep/report.hpp"

#include <fstream>
#include <sstream>

#include "flowrep/errors.hpp"
#include "flowrep/io/csv.hpp"
#include "flowrep/io/svg.hpp"
#include "json.hpp"

namespace flowrep {

namespace {

void write_text(const std::string& text, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << text;
    if (!f) throw IoError("short write to " + path.string());
}

}  // namespace

std::string report_csv_string(const EvalReport& report) {
    std::ostringstream out;
    out << "dataset,representation,fft,header,detector,tuning,hyper,delta_t,auc,"
           "error_bar,status\n";
    for (const EvalCell& c : report.cells) {
        out << csv_escape(c.key.dataset) << ',' << to_string(c.key.kind) << ','
            << (c.key.fft ? 1 : 0) << ',' << (c.key.header ? 1 : 0) << ','
            << to_string(c.key.family) << ',' << to_string(c.key.tuning) << ',';
        if (c.ok()) out << format_double(c.hyper);
        out << ',';
        if (c.delta_t) out << format_double(*c.delta_t);
        out << ',';
        if (c.ok()) out << format_double(c.auc);
        out << ',';
        if (c.ok()) out << format_double(c.error_bar);
        out << ',' << csv_escape(c.status) << '\n';
    }
    return out.str();
}

void write_report_csv(const EvalReport& report, const std::filesystem::path& path) {
    write_text(report_csv_string(report), path);
}

void write_report_json(const EvalReport& report, const std::filesystem::path& path) {
    nlohmann::json doc;
    doc["seed"] = report.seed;
    nlohmann::json datasets = nlohmann::json::object();
    for (const auto& [name, meta] : report.datasets) {
        datasets[name] = {{"d0", meta.d0},
                          {"duration_cap", meta.duration_cap},
                          {"delta_t_candidates", meta.delta_t_candidates},
                          {"n_train_flows", meta.n_train_flows},
                          {"n_test_flows", meta.n_test_flows}};
    }
    doc["datasets"] = std::move(datasets);

    nlohmann::json cells = nlohmann::json::array();
    for (const EvalCell& c : report.cells) {
        nlohmann::json j = {{"dataset", c.key.dataset},
                            {"representation", to_string(c.key.kind)},
                            {"fft", c.key.fft},
                            {"header", c.key.header},
                            {"detector", to_string(c.key.family)},
                            {"tuning", to_string(c.key.tuning)},
                            {"status", c.status},
                            {"n_train", c.n_train},
                            {"n_test", c.n_test}};
        if (c.ok()) {
            j["auc"] = c.auc;
            j["hyper"] = c.hyper;
            j["error_bar"] = c.error_bar;
            if (c.delta_t) j["delta_t"] = *c.delta_t;
        }
        cells.push_back(std::move(j));
    }
    doc["cells"] = std::move(cells);
    write_text(doc.dump(2) + "\n", path);
}

void write_delta_csv(const std::vector<DeltaRow>& rows, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "dataset,detector,tuning,pair,auc_base,auc_variant,delta,error_bar\n";
    for (const DeltaRow& r : rows) {
        out << csv_escape(r.dataset) << ',' << to_string(r.family) << ','
            << to_string(r.tuning) << ',' << csv_escape(r.pair_name) << ','
            << format_double(r.auc_base) << ',' << format_double(r.auc_variant) << ','
            << format_double(r.delta) << ',' << format_double(r.error_bar) << '\n';
    }
    write_text(out.str(), path);
}

void write_delta_svg(const std::string& title, const std::vector<DeltaRow>& rows,
                     const std::filesystem::path& path) {
    std::vector<BarDatum> data;
    for (const DeltaRow& r : rows) {
        BarDatum d;
        d.group = r.dataset + " " + r.pair_name;
        if (r.tuning == Tuning::Default) d.group += " (default)";
        d.series = to_string(r.family);
        d.value = r.delta;
        d.error = r.error_bar;
        data.push_back(std::move(d));
    }
    write_text(bar_chart_svg(title, data), path);
}

void write_correlations_csv(
    const std::map<std::string, std::vector<std::pair<std::string, double>>>& by_dataset,
    const std::filesystem::path& path) {
    std::ostringstream out;
    out << "dataset,rank,feature,r\n";
    for (const auto& [dataset, ranked] : by_dataset) {
        for (size_t i = 0; i < ranked.size(); ++i) {
            out << csv_escape(dataset) << ',' << i + 1 << ','
                << csv_escape(ranked[i].first) << ',' << format_double(ranked[i].second)
                << '\n';
        }
    }
    write_text(out.str(), path);
}

}  // namespace flowrep
