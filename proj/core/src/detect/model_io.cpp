#include "flowrep/detect/model_io.hpp"

#include <fstream>

#include "flowrep/errors.hpp"
#include "json.hpp"

namespace flowrep {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
    json data = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
    }
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
        throw IoError("model matrix shape mismatch");
    }
    Eigen::MatrixXd m(rows, cols);
    size_t idx = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j2 = 0; j2 < cols; ++j2) m(i, j2) = data[idx++].get<double>();
    }
    return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

json params_to_json(const KdeModel& m) {
    return json{{"sigma", m.sigma}, {"train", matrix_to_json(m.train)}};
}

json params_to_json(const OcsvmModel& m) {
    return json{{"sigma", m.sigma},
                {"nu", m.nu},
                {"rho", m.rho},
                {"dual_objective", m.dual_objective},
                {"alpha", vector_to_json(m.alpha)},
                {"train", matrix_to_json(m.train)}};
}

json params_to_json(const GmmModel& m) {
    json means = json::array();
    for (const auto& mu : m.means) means.push_back(vector_to_json(mu));
    json covs = json::array();
    for (const auto& c : m.covariances) covs.push_back(matrix_to_json(c));
    return json{{"k", m.k},
                {"reg", m.reg},
                {"weights", vector_to_json(m.weights)},
                {"means", std::move(means)},
                {"covariances", std::move(covs)}};
}

json params_to_json(const IsolationForest& m) {
    json trees = json::array();
    for (const IsoTree& t : m.trees) {
        json nodes = json::array();
        for (const IsoNode& nd : t.nodes) {
            nodes.push_back(json::array({nd.feature, nd.threshold, nd.left, nd.right, nd.size}));
        }
        trees.push_back(std::move(nodes));
    }
    return json{{"n_trees", m.n_trees},
                {"subsample", m.subsample},
                {"c_psi", m.c_psi},
                {"trees", std::move(trees)}};
}

json params_to_json(const PcaModel& m) {
    return json{{"dim", m.dim},
                {"mean", vector_to_json(m.mean)},
                {"components", matrix_to_json(m.components)},
                {"eigenvalues", vector_to_json(m.eigenvalues)}};
}

json params_to_json(const Autoencoder& m) {
    json weights = json::array();
    json biases = json::array();
    for (size_t l = 0; l < 4; ++l) {
        weights.push_back(matrix_to_json(m.W[l]));
        biases.push_back(vector_to_json(m.b[l]));
    }
    return json{{"input_dim", m.input_dim},
                {"hidden_dim", m.hidden_dim},
                {"latent_dim", m.latent_dim},
                {"leaky_slope", m.leaky_slope},
                {"weights", std::move(weights)},
                {"biases", std::move(biases)}};
}

}  // namespace

double TrainedModel::score(const Eigen::VectorXd& x) const {
    return std::visit([&](const auto& m) { return m.score(x); }, impl);
}

double TrainedModel::score_raw(const Eigen::VectorXd& x) const {
    if (!standardization.fitted) return score(x);
    const Eigen::VectorXd z =
        (x - standardization.mean).cwiseQuotient(standardization.scale);
    return score(z);
}

std::string model_to_json(const TrainedModel& model) {
    json doc;
    doc["schema"] = 1;
    doc["family"] = to_string(model.family);
    doc["hyper"] = model.hyper;
    doc["input_dim"] = model.input_dim;
    doc["seed"] = model.seed;
    doc["converged"] = model.converged;
    if (model.standardization.fitted) {
        doc["standardization"] = json{{"mean", vector_to_json(model.standardization.mean)},
                                      {"scale", vector_to_json(model.standardization.scale)}};
    }
    doc["params"] = std::visit([](const auto& m) { return params_to_json(m); }, model.impl);
    return doc.dump();
}

TrainedModel model_from_json(const std::string& text) {
    json doc = json::parse(text);
    if (doc.at("schema").get<int>() != 1) throw IoError("unsupported model schema");

    TrainedModel model;
    model.family = family_from_string(doc.at("family").get<std::string>());
    model.hyper = doc.at("hyper").get<double>();
    model.input_dim = doc.at("input_dim").get<int>();
    model.seed = doc.at("seed").get<uint64_t>();
    model.converged = doc.value("converged", true);
    if (doc.contains("standardization")) {
        model.standardization.mean = vector_from_json(doc["standardization"].at("mean"));
        model.standardization.scale = vector_from_json(doc["standardization"].at("scale"));
        model.standardization.fitted = true;
    }

    const json& p = doc.at("params");
    switch (model.family) {
        case Family::Kde: {
            KdeModel m;
            m.sigma = p.at("sigma").get<double>();
            m.train = matrix_from_json(p.at("train"));
            model.impl = std::move(m);
            break;
        }
        case Family::Ocsvm: {
            OcsvmModel m;
            m.sigma = p.at("sigma").get<double>();
            m.nu = p.at("nu").get<double>();
            m.rho = p.at("rho").get<double>();
            m.dual_objective = p.at("dual_objective").get<double>();
            m.alpha = vector_from_json(p.at("alpha"));
            m.train = matrix_from_json(p.at("train"));
            m.converged = model.converged;
            model.impl = std::move(m);
            break;
        }
        case Family::Gmm: {
            GmmModel m;
            m.k = p.at("k").get<int>();
            m.reg = p.at("reg").get<double>();
            m.seed = model.seed;
            m.weights = vector_from_json(p.at("weights"));
            for (const auto& mu : p.at("means")) m.means.push_back(vector_from_json(mu));
            for (const auto& c : p.at("covariances")) {
                Eigen::MatrixXd cov = matrix_from_json(c);
                Eigen::LLT<Eigen::MatrixXd> llt(cov);
                if (llt.info() != Eigen::Success) {
                    throw IoError("stored GMM covariance not positive definite");
                }
                Eigen::MatrixXd chol = llt.matrixL();
                double log_det = 0.0;
                for (Eigen::Index i = 0; i < chol.rows(); ++i) {
                    log_det += 2.0 * std::log(chol(i, i));
                }
                m.covariances.push_back(std::move(cov));
                m.chol_lower.push_back(std::move(chol));
                m.log_det.push_back(log_det);
            }
            model.impl = std::move(m);
            break;
        }
        case Family::IsolationForest: {
            IsolationForest m;
            m.n_trees = p.at("n_trees").get<int>();
            m.subsample = p.at("subsample").get<int>();
            m.c_psi = p.at("c_psi").get<double>();
            m.seed = model.seed;
            for (const auto& tj : p.at("trees")) {
                IsoTree tree;
                for (const auto& nj : tj) {
                    IsoNode nd;
                    nd.feature = nj[0].get<int>();
                    nd.threshold = nj[1].get<double>();
                    nd.left = nj[2].get<int>();
                    nd.right = nj[3].get<int>();
                    nd.size = nj[4].get<int>();
                    tree.nodes.push_back(nd);
                }
                m.trees.push_back(std::move(tree));
            }
            model.impl = std::move(m);
            break;
        }
        case Family::Pca: {
            PcaModel m;
            m.dim = p.at("dim").get<int>();
            m.mean = vector_from_json(p.at("mean"));
            m.components = matrix_from_json(p.at("components"));
            m.eigenvalues = vector_from_json(p.at("eigenvalues"));
            model.impl = std::move(m);
            break;
        }
        case Family::Autoencoder: {
            Autoencoder m;
            m.input_dim = p.at("input_dim").get<int>();
            m.hidden_dim = p.at("hidden_dim").get<int>();
            m.latent_dim = p.at("latent_dim").get<int>();
            m.leaky_slope = p.at("leaky_slope").get<double>();
            for (size_t l = 0; l < 4; ++l) {
                m.W[l] = matrix_from_json(p.at("weights")[l]);
                m.b[l] = vector_from_json(p.at("biases")[l]);
            }
            model.impl = std::move(m);
            break;
        }
    }
    return model;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << model_to_json(model) << "\n";
    if (!f) throw IoError("short write to " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return model_from_json(text);
}

}  // namespace flowrep
