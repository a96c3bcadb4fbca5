#include "flowrep/manifest.hpp"

#include <fstream>

#include "flowrep/errors.hpp"
#include "json.hpp"

namespace flowrep {

using nlohmann::json;

TuningMode tuning_mode_from_string(const std::string& s) {
    if (s == "opt" || s == "OPT") return TuningMode::Opt;
    if (s == "default" || s == "Default") return TuningMode::Default;
    if (s == "both") return TuningMode::Both;
    throw ManifestError("unknown tuning mode: " + s);
}

std::string to_string(TuningMode mode) {
    switch (mode) {
        case TuningMode::Opt: return "opt";
        case TuningMode::Default: return "default";
        case TuningMode::Both: return "both";
    }
    return "opt";
}

namespace {

TrafficSource parse_source(const json& j, Label default_label,
                           const std::filesystem::path& base_dir) {
    TrafficSource src;
    src.label = default_label;
    if (j.is_string()) {
        std::filesystem::path p = j.get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        src.source = PcapSource{p};
        return src;
    }
    if (!j.is_object()) throw ManifestError("traffic source must be a string or object");
    if (j.contains("label")) src.label = label_from_string(j.at("label").get<std::string>());
    if (j.contains("synth")) {
        const json& s = j.at("synth");
        SynthSource synth;
        synth.scenario = s.at("scenario").get<std::string>();
        synth.part = s.value("part", "train");
        synth.seed = s.value("seed", 0ULL);
        synth.n_flows = s.value("n_flows", 0);
        src.source = synth;
        return src;
    }
    if (j.contains("path")) {
        std::filesystem::path p = j.at("path").get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        src.source = PcapSource{p};
        return src;
    }
    throw ManifestError("traffic source needs a path or synth block");
}

}  // namespace

Manifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ManifestError(std::string("manifest is not valid JSON: ") + e.what());
    }

    Manifest m;
    m.schema = doc.value("schema", 0);
    if (m.schema != 1) throw ManifestError("manifest schema must be 1");
    if (!doc.contains("datasets")) throw ManifestError("manifest needs datasets");

    m.seed = doc.value("seed", 0ULL);
    std::filesystem::path out = doc.value("output_dir", std::string("out"));
    m.output_dir = out.is_relative() ? base_dir / out : out;
    m.tuning = tuning_mode_from_string(doc.value("tuning", std::string("opt")));
    m.idle_timeout = doc.value("idle_timeout", 0.0);
    m.save_models = doc.value("save_models", false);

    if (doc.contains("options")) {
        const json& o = doc.at("options");
        m.detect.ocsvm_nu = o.value("ocsvm_nu", m.detect.ocsvm_nu);
        m.detect.gmm_reg = o.value("gmm_reg", m.detect.gmm_reg);
        m.detect.if_subsample = o.value("if_subsample", m.detect.if_subsample);
        m.detect.ae_epochs = o.value("ae_epochs", m.detect.ae_epochs);
        m.detect.ae_batch = o.value("ae_batch", m.detect.ae_batch);
    }

    for (const json& dj : doc.at("datasets")) {
        DatasetSpec ds;
        ds.name = dj.at("name").get<std::string>();
        if (ds.name.empty()) throw ManifestError("dataset name must be non-empty");
        for (const json& src : dj.at("train_files")) {
            ds.train_files.push_back(parse_source(src, Label::Normal, base_dir));
            if (ds.train_files.back().label != Label::Normal) {
                throw ManifestError("train files must be labeled normal in " + ds.name);
            }
        }
        if (ds.train_files.empty()) {
            throw ManifestError("dataset " + ds.name + " needs a normal training source");
        }
        bool has_normal = false, has_novel = false;
        for (const json& src : dj.at("test_files")) {
            ds.test_files.push_back(parse_source(src, Label::Unlabeled, base_dir));
            const Label l = ds.test_files.back().label;
            has_normal |= l == Label::Normal;
            has_novel |= l == Label::Novel;
            if (l == Label::Unlabeled) {
                throw ManifestError("test files must be labeled in " + ds.name);
            }
        }
        if (!has_normal || !has_novel) {
            throw ManifestError("dataset " + ds.name + " needs both test classes");
        }
        if (dj.contains("monitored_src")) {
            for (const json& ip : dj.at("monitored_src")) {
                ds.monitored_src.push_back(parse_ipv4(ip.get<std::string>()));
            }
        }
        m.datasets.push_back(std::move(ds));
    }

    if (doc.contains("representations")) {
        for (const json& rj : doc.at("representations")) {
            ReprSelector sel;
            sel.kind = repr_kind_from_string(rj.at("kind").get<std::string>());
            sel.fft = rj.value("fft", false);
            sel.header = rj.value("header", false);
            if (sel.kind == ReprKind::Stats && sel.fft) {
                throw ManifestError("FFT is not defined for STATS");
            }
            m.representations.push_back(sel);
        }
    } else {
        for (ReprKind kind : {ReprKind::Stats, ReprKind::Size, ReprKind::Iat,
                              ReprKind::IatSize, ReprKind::SampNum, ReprKind::SampSize}) {
            m.representations.push_back({kind, false, false});
        }
    }

    if (doc.contains("detectors")) {
        for (const json& f : doc.at("detectors")) {
            m.detectors.push_back(family_from_string(f.get<std::string>()));
        }
    } else {
        m.detectors = all_families();
    }
    if (m.detectors.empty()) throw ManifestError("manifest needs at least one detector");

    return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open manifest " + path.string());
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return parse_manifest(text, path.parent_path().empty() ? "." : path.parent_path());
}

}  // namespace flowrep
