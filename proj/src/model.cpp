#include "admercs/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "admercs/parallel.hpp"

namespace admercs {

using nlohmann::json;

namespace {

constexpr int kModelVersion = 1;

std::vector<double> target_values(const Dataset& d, int32_t target,
                                  const std::vector<int32_t>& rows) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (int32_t r : rows) out.push_back(d.cell(r, target));
    return out;
}

std::map<int32_t, LikelihoodModel> fit_tree_densities(const Dataset& d, const Tree& t,
                                                      double rho) {
    auto [lo, hi] = d.column_range(t.target);
    const double attr_range = d.is_numeric(t.target) ? hi - lo : 0.0;
    const auto n_cats = static_cast<int32_t>(d.attributes[t.target].categories.size());

    std::map<int32_t, LikelihoodModel> out;
    for (int32_t node : t.scoring_nodes) {
        if (out.count(node)) continue;
        out.emplace(node, fit_model(target_values(d, t.target, t.nodes[node].members),
                                    d.attributes[t.target].kind, rho, attr_range, n_cats));
    }
    return out;
}

}  // namespace

int32_t Model::n_contexts() const {
    if (trees.empty()) return 0;
    return context_offsets.back() + trees.back().n_leaves();
}

const LikelihoodModel& Model::leaf_model(int32_t tree, int32_t leaf) const {
    return densities[tree].at(trees[tree].scoring_nodes[leaf]);
}

ContextIndex build_context_index(
    const Dataset& d, const std::vector<Tree>& trees,
    const std::vector<std::map<int32_t, LikelihoodModel>>& densities) {
    ContextIndex index;
    index.n_instances = d.n_rows;
    index.n_trees = static_cast<int32_t>(trees.size());
    index.membership.assign(d.n_rows * trees.size(), -1);
    index.omega.assign(d.n_rows * trees.size(), 1.0);

    for (int32_t t = 0; t < index.n_trees; ++t) {
        const Tree& tree = trees[t];
        for (int32_t leaf = 0; leaf < tree.n_leaves(); ++leaf) {
            const int32_t ctx = index.n_contexts();
            index.contexts.emplace_back(t, leaf);
            const auto& members = tree.nodes[tree.leaf_nodes[leaf]].members;
            index.context_members.push_back(members);
            const LikelihoodModel& model = densities[t].at(tree.scoring_nodes[leaf]);
            for (int32_t r : members) {
                index.membership[static_cast<int64_t>(r) * index.n_trees + t] = ctx;
                index.omega[static_cast<int64_t>(r) * index.n_trees + t] =
                    model.omega(d.cell(r, tree.target));
            }
        }
    }
    return index;
}

FitResult fit(const Dataset& d, const FitParams& p) {
    FitResult result;
    Model& m = result.model;
    m.attributes = d.attributes;
    m.params = p;
    m.trees = learn_ensemble(d, p.tree, p.seed, p.threads);

    m.densities.resize(m.trees.size());
    parallel_for(static_cast<int64_t>(m.trees.size()), p.threads, [&](int64_t t) {
        m.densities[t] = fit_tree_densities(d, m.trees[t], p.scoring.rho);
    });

    m.context_offsets.resize(m.trees.size());
    int32_t offset = 0;
    for (size_t t = 0; t < m.trees.size(); ++t) {
        m.context_offsets[t] = offset;
        offset += m.trees[t].n_leaves();
    }

    const ContextIndex index = build_context_index(d, m.trees, m.densities);
    result.state = run_iterations(index, p.scoring);
    m.context_lambda = result.state.lambda_scoring;
    m.context_lambda_final = result.state.lambda;
    return result;
}

double score_instance(const Model& m, std::span<const double> cells) {
    if (cells.size() != m.attributes.size())
        throw std::invalid_argument("instance has wrong number of cells");
    double log_prod = 0.0;
    for (size_t t = 0; t < m.trees.size(); ++t) {
        const Tree& tree = m.trees[t];
        const int32_t leaf = tree.route(cells);
        const double omega = m.leaf_model(static_cast<int32_t>(t), leaf)
                                 .omega(cells[tree.target]);
        const double lambda = m.context_lambda[m.context_id(static_cast<int32_t>(t), leaf)];
        const double v = context_evidence(lambda, omega);
        const double factor =
            std::clamp(1.0 - m.params.scoring.gamma_delta * v, 1e-300, 1.0);
        log_prod += std::log(factor);
    }
    return 1.0 - std::exp(log_prod);
}

DatasetAdapter::DatasetAdapter(const Model& m, const Dataset& d) : data_(d) {
    if (d.n_cols() != static_cast<int32_t>(m.attributes.size()))
        throw std::invalid_argument("dataset has " + std::to_string(d.n_cols()) +
                                    " attributes, model expects " +
                                    std::to_string(m.attributes.size()));
    category_remap_.resize(d.n_cols());
    for (int32_t c = 0; c < d.n_cols(); ++c) {
        const AttributeMeta& want = m.attributes[c];
        const AttributeMeta& have = d.attributes[c];
        if (want.kind != have.kind)
            throw std::invalid_argument("attribute '" + have.name + "' kind mismatch");
        if (want.kind == AttributeKind::Nominal) {
            auto& remap = category_remap_[c];
            remap.assign(have.categories.size(), -1);
            for (size_t i = 0; i < have.categories.size(); ++i) {
                auto it = std::find(want.categories.begin(), want.categories.end(),
                                    have.categories[i]);
                if (it != want.categories.end())
                    remap[i] = static_cast<int32_t>(it - want.categories.begin());
            }
        }
    }
}

std::vector<double> DatasetAdapter::translate(int64_t row) const {
    std::vector<double> cells(data_.row(row).begin(), data_.row(row).end());
    for (int32_t c = 0; c < data_.n_cols(); ++c) {
        if (!category_remap_[c].empty()) {
            cells[c] = static_cast<double>(
                category_remap_[c][static_cast<size_t>(cells[c])]);
        }
    }
    return cells;
}

std::vector<double> score_dataset(const Model& m, const Dataset& d, int32_t threads) {
    DatasetAdapter adapter(m, d);
    std::vector<double> scores(d.n_rows, 0.0);
    parallel_for(d.n_rows, threads, [&](int64_t r) {
        scores[r] = score_instance(m, adapter.translate(r));
    });
    return scores;
}

namespace {

json split_to_json(const Split& s) {
    json j;
    j["attribute"] = s.attribute;
    j["numeric"] = s.numeric;
    if (s.numeric) {
        j["threshold"] = s.threshold;
    } else {
        j["left_categories"] = s.left_categories;
    }
    return j;
}

Split split_from_json(const json& j) {
    Split s;
    s.attribute = j.at("attribute").get<int32_t>();
    s.numeric = j.at("numeric").get<bool>();
    if (s.numeric) {
        s.threshold = j.at("threshold").get<double>();
    } else {
        s.left_categories = j.at("left_categories").get<std::vector<int32_t>>();
    }
    return s;
}

json tree_to_json(const Tree& t) {
    json nodes = json::array();
    for (const TreeNode& n : t.nodes) {
        json jn;
        jn["impurity"] = n.impurity;
        jn["depth"] = n.depth;
        jn["left"] = n.left;
        jn["right"] = n.right;
        jn["leaf_id"] = n.leaf_id;
        if (n.split) jn["split"] = split_to_json(*n.split);
        if (n.is_leaf()) jn["members"] = n.members;  // internal ones are rebuilt
        nodes.push_back(std::move(jn));
    }
    json j;
    j["target"] = t.target;
    j["nodes"] = std::move(nodes);
    j["leaf_nodes"] = t.leaf_nodes;
    j["scoring_nodes"] = t.scoring_nodes;
    return j;
}

Tree tree_from_json(const json& j) {
    Tree t;
    t.target = j.at("target").get<int32_t>();
    for (const json& jn : j.at("nodes")) {
        TreeNode n;
        n.impurity = jn.at("impurity").get<double>();
        n.depth = jn.at("depth").get<int32_t>();
        n.left = jn.at("left").get<int32_t>();
        n.right = jn.at("right").get<int32_t>();
        n.leaf_id = jn.at("leaf_id").get<int32_t>();
        if (jn.contains("split")) n.split = split_from_json(jn.at("split"));
        if (jn.contains("members")) n.members = jn.at("members").get<std::vector<int32_t>>();
        t.nodes.push_back(std::move(n));
    }
    t.leaf_nodes = j.at("leaf_nodes").get<std::vector<int32_t>>();
    t.scoring_nodes = j.at("scoring_nodes").get<std::vector<int32_t>>();

    // Internal member lists come back as the ordered merge of the children,
    // which matches how induction partitioned them.
    for (auto it = t.nodes.rbegin(); it != t.nodes.rend(); ++it) {
        if (it->is_leaf()) continue;
        const auto& l = t.nodes[it->left].members;
        const auto& r = t.nodes[it->right].members;
        it->members.resize(l.size() + r.size());
        std::merge(l.begin(), l.end(), r.begin(), r.end(), it->members.begin());
    }
    return t;
}

json density_to_json(const LikelihoodModel& m) {
    json j;
    j["rho"] = m.rho;
    if (const auto* kde = std::get_if<KdeModel>(&m.density)) {
        j["type"] = "kde";
        j["samples"] = kde->samples;
        j["bandwidth"] = kde->bandwidth;
        j["tau"] = kde->tau;
    } else {
        const auto& hist = std::get<HistModel>(m.density);
        j["type"] = "hist";
        j["counts"] = hist.counts;
        j["total"] = hist.total;
        j["tau"] = hist.tau;
    }
    return j;
}

LikelihoodModel density_from_json(const json& j) {
    LikelihoodModel m;
    m.rho = j.at("rho").get<double>();
    if (j.at("type") == "kde") {
        KdeModel kde;
        kde.samples = j.at("samples").get<std::vector<double>>();
        kde.bandwidth = j.at("bandwidth").get<double>();
        kde.tau = j.at("tau").get<double>();
        m.density = std::move(kde);
    } else {
        HistModel hist;
        hist.counts = j.at("counts").get<std::vector<int64_t>>();
        hist.total = j.at("total").get<int64_t>();
        hist.tau = j.at("tau").get<double>();
        m.density = std::move(hist);
    }
    return m;
}

}  // namespace

void save_model(const Model& m, const std::string& path) {
    json j;
    j["format"] = "admercs-model";
    j["version"] = kModelVersion;

    json attrs = json::array();
    for (const AttributeMeta& a : m.attributes) {
        json ja;
        ja["name"] = a.name;
        ja["kind"] = a.kind == AttributeKind::Numeric ? "numeric" : "nominal";
        if (a.kind == AttributeKind::Nominal) ja["categories"] = a.categories;
        attrs.push_back(std::move(ja));
    }
    j["attributes"] = std::move(attrs);

    j["tree_params"] = {{"max_depth", m.params.tree.max_depth},
                        {"min_samples_leaf_frac", m.params.tree.min_samples_leaf_frac},
                        {"min_impurity_decrease", m.params.tree.min_impurity_decrease}};
    j["scoring_params"] = {{"gamma_delta", m.params.scoring.gamma_delta},
                           {"gamma_lambda", m.params.scoring.gamma_lambda},
                           {"iterations", m.params.scoring.iterations},
                           {"rho", m.params.scoring.rho},
                           {"freeze_lambda", m.params.scoring.freeze_lambda},
                           {"tolerance", m.params.scoring.tolerance}};
    j["seed"] = m.params.seed;

    json trees = json::array();
    for (const Tree& t : m.trees) trees.push_back(tree_to_json(t));
    j["trees"] = std::move(trees);

    json densities = json::array();
    for (const auto& per_tree : m.densities) {
        json jt = json::array();
        for (const auto& [node, model] : per_tree) {
            json jd = density_to_json(model);
            jd["node"] = node;
            jt.push_back(std::move(jd));
        }
        densities.push_back(std::move(jt));
    }
    j["densities"] = std::move(densities);

    j["context_lambda"] = m.context_lambda;
    j["context_lambda_final"] = m.context_lambda_final;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

Model load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed model file " + path + ": " + e.what());
    }
    if (!j.contains("format") || j["format"] != "admercs-model")
        throw std::runtime_error(path + " is not a model file");
    if (!j.contains("version") || j["version"].get<int>() != kModelVersion)
        throw std::runtime_error("unsupported model version " + j["version"].dump() +
                                 " (this build reads version " +
                                 std::to_string(kModelVersion) + ")");

    Model m;
    for (const json& ja : j.at("attributes")) {
        AttributeMeta a;
        a.name = ja.at("name").get<std::string>();
        a.kind = ja.at("kind") == "numeric" ? AttributeKind::Numeric : AttributeKind::Nominal;
        if (ja.contains("categories"))
            a.categories = ja.at("categories").get<std::vector<std::string>>();
        a.index = static_cast<int32_t>(m.attributes.size());
        m.attributes.push_back(std::move(a));
    }

    const json& tp = j.at("tree_params");
    m.params.tree.max_depth = tp.at("max_depth").get<int32_t>();
    m.params.tree.min_samples_leaf_frac = tp.at("min_samples_leaf_frac").get<double>();
    m.params.tree.min_impurity_decrease = tp.at("min_impurity_decrease").get<double>();
    const json& sp = j.at("scoring_params");
    m.params.scoring.gamma_delta = sp.at("gamma_delta").get<double>();
    m.params.scoring.gamma_lambda = sp.at("gamma_lambda").get<double>();
    m.params.scoring.iterations = sp.at("iterations").get<int32_t>();
    m.params.scoring.rho = sp.at("rho").get<double>();
    m.params.scoring.freeze_lambda = sp.at("freeze_lambda").get<bool>();
    m.params.scoring.tolerance = sp.at("tolerance").get<double>();
    m.params.seed = j.at("seed").get<uint64_t>();

    for (const json& jt : j.at("trees")) m.trees.push_back(tree_from_json(jt));

    m.densities.resize(m.trees.size());
    const json& jd = j.at("densities");
    for (size_t t = 0; t < m.trees.size(); ++t) {
        for (const json& d : jd.at(t)) {
            m.densities[t].emplace(d.at("node").get<int32_t>(), density_from_json(d));
        }
    }

    m.context_offsets.resize(m.trees.size());
    int32_t offset = 0;
    for (size_t t = 0; t < m.trees.size(); ++t) {
        m.context_offsets[t] = offset;
        offset += m.trees[t].n_leaves();
    }
    m.context_lambda = j.at("context_lambda").get<std::vector<double>>();
    m.context_lambda_final = j.at("context_lambda_final").get<std::vector<double>>();
    if (static_cast<int32_t>(m.context_lambda.size()) != m.n_contexts())
        throw std::runtime_error("model file context count mismatch");
    return m;
}

}  // namespace admercs
