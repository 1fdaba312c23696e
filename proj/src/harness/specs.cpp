#include "auditlab/harness/specs.hpp"

#include <algorithm>
#include <filesystem>

#include "auditlab/errors.hpp"
#include "auditlab/harness/dataset.hpp"
#include "auditlab/instances/classifiers.hpp"
#include "auditlab/instances/logistic.hpp"
#include "auditlab/io/text.hpp"

namespace auditlab {

namespace {

std::string resolve_path(const std::string& path, const std::string& base_dir) {
    std::filesystem::path p(path);
    if (p.is_absolute() || base_dir.empty()) return path;
    return (std::filesystem::path(base_dir) / p).string();
}

std::string kind_of(const Json& doc, const char* what) {
    if (!doc.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
    if (!doc.contains("kind") || !doc["kind"].is_string())
        throw ConfigError(std::string(what) + " needs a string \"kind\"");
    return doc["kind"].get<std::string>();
}

template <class T>
T get_or(const Json& doc, const char* key, T fallback) {
    if (!doc.contains(key)) return fallback;
    return doc[key].get<T>();
}

Rational rational_field(const Json& doc, const char* key, Rational fallback, bool required) {
    if (!doc.contains(key)) {
        if (required) throw ConfigError(std::string("missing field ") + key);
        return fallback;
    }
    const Json& v = doc[key];
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number()) return parse_rational(io::format_exact(v.get<double>()));  // 0.1 reads as 1/10
    throw ConfigError(std::string("field ") + key + " must be a number or a rational string");
}

Json to_json_vec(const Vector& v) { return Json(v); }

template <class F>
auto config_guard(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("JSON: ") + e.what());
    }
}

std::shared_ptr<const AuditInstance> build_mixture(const Json& doc) {
    const std::string family = get_or<std::string>(doc, "family", "spherical_gaussian");
    auto group_probs = doc.at("group_probs").get<Vector>();
    auto label_probs = doc.at("label_probs").get<Vector>();
    auto means = doc.at("means").get<std::vector<std::vector<Vector>>>();
    std::shared_ptr<const ExpFamily> fam;
    if (family == "spherical_gaussian") {
        const std::size_t d = doc.at("d").get<std::size_t>();
        const double sigma2 = doc.at("sigma2").get<double>();
        SphericalGaussian base(d, sigma2);
        SmoothnessConstants c = constants_from_json(doc, base.constants());
        fam = std::make_shared<SphericalGaussian>(d, sigma2, c, ParamSet::whole_space(d));
    } else if (family == "exponential") {
        auto box = doc.at("theta_box").get<Vector>();
        if (box.size() != 2) throw ConfigError("theta_box must be [lo, hi]");
        ExponentialFamily1D base(box[0], box[1]);
        SmoothnessConstants c = constants_from_json(doc, base.constants());
        fam = std::make_shared<ExponentialFamily1D>(c, ParamSet::box({box[0]}, {box[1]}));
    } else {
        throw ConfigError("unknown family '" + family + "'");
    }
    std::vector<std::array<Vector, 2>> params;
    for (const auto& per_group : means) {
        if (per_group.size() != 2) throw ConfigError("means must be indexed [a][y]");
        std::array<Vector, 2> p;
        for (int y = 0; y < 2; ++y) {
            auto theta = fam->natural_from_mean(per_group[static_cast<std::size_t>(y)]);
            if (!theta) throw ConfigError("family has no closed-form mean map");
            p[static_cast<std::size_t>(y)] = *theta;
        }
        params.push_back(std::move(p));
    }
    return std::make_shared<MixtureAuditInstance>(fam, group_probs, label_probs, std::move(params));
}

MixtureGeneratorConfig generator_config(const Json& doc) {
    MixtureGeneratorConfig g;
    g.d = get_or<std::size_t>(doc, "d", g.d);
    g.sigma2 = get_or<double>(doc, "sigma2", g.sigma2);
    g.group_probs = get_or<Vector>(doc, "group_probs", g.group_probs);
    g.label_probs = get_or<Vector>(doc, "label_probs", g.label_probs);
    g.eps = get_or<double>(doc, "eps", g.eps);
    g.constants = constants_from_json(doc, g.constants);
    return g;
}

}  // namespace

SmoothnessConstants constants_from_json(const Json& doc, SmoothnessConstants c) {
    if (!doc.contains("constants")) return c;
    const Json& k = doc["constants"];
    c.kappa = get_or<double>(k, "kappa", c.kappa);
    c.lambda = get_or<double>(k, "lambda", c.lambda);
    c.lipschitz_L = get_or<double>(k, "L", c.lipschitz_L);
    c.ball_beta = get_or<double>(k, "beta", c.ball_beta);
    c.positivity_alpha = get_or<double>(k, "alpha", c.positivity_alpha);
    c.validate();
    return c;
}

Json constants_to_json(const SmoothnessConstants& c) {
    return Json{{"kappa", c.kappa}, {"lambda", c.lambda}, {"L", c.lipschitz_L},
                {"beta", c.ball_beta}, {"alpha", c.positivity_alpha}};
}

void check_instance_json(const Json& doc) {
    static const std::vector<std::string> kinds{"mixture", "generated_mixture", "lower_bound",
                                                "synthetic_tabular", "adult", "law", "encoded_csv"};
    const std::string kind = kind_of(doc, "instance");
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
        throw ConfigError("unknown instance kind '" + kind + "'");
    if ((kind == "adult" || kind == "law" || kind == "encoded_csv") &&
        (!doc.contains("path") || !doc["path"].is_string()))
        throw ConfigError(kind + " instance needs a \"path\"");
}

std::shared_ptr<const AuditInstance> instance_from_json(const Json& doc, const std::string& base_dir,
                                                        RngStream& rng) {
    check_instance_json(doc);
    return config_guard([&]() -> std::shared_ptr<const AuditInstance> {
        const std::string kind = doc["kind"].get<std::string>();
        if (kind == "mixture") return build_mixture(doc);
        if (kind == "generated_mixture")
            return std::make_shared<MixtureAuditInstance>(generate_separated_mixture(generator_config(doc), rng));
        if (kind == "lower_bound") {
            Rational eps = rational_field(doc, "eps", 0, true);
            Rational p = rational_field(doc, "p", 0, true);
            Rational q = rational_field(doc, "q", 0, true);
            Rational g1 = rational_field(doc, "group1_prob", Rational(1, 2), false);
            const std::string h = get_or<std::string>(doc, "hypothesis", "UNFAIR");
            Hypothesis hyp;
            if (h == "FAIR" || h == "fair") hyp = Hypothesis::fair;
            else if (h == "UNFAIR" || h == "unfair") hyp = Hypothesis::unfair;
            else throw ConfigError("hypothesis must be FAIR or UNFAIR");
            return std::make_shared<LowerBoundInstance>(eps, p, q, hyp, g1);
        }
        if (kind == "synthetic_tabular") {
            SyntheticTabularConfig c;
            c.n_rows = get_or<std::size_t>(doc, "n_rows", c.n_rows);
            c.group1_prob = get_or<double>(doc, "group1_prob", c.group1_prob);
            c.label_probs = get_or<Vector>(doc, "label_probs", c.label_probs);
            c.n_features = get_or<std::size_t>(doc, "n_features", c.n_features);
            c.signal = get_or<double>(doc, "signal", c.signal);
            c.group_shift = get_or<double>(doc, "group_shift", c.group_shift);
            return std::make_shared<EmpiricalAuditInstance>(synthetic_tabular(c, rng));
        }
        const std::string path = resolve_path(doc["path"].get<std::string>(), base_dir);
        if (kind == "encoded_csv") return std::make_shared<EmpiricalAuditInstance>(load_encoded_csv(path));
        Dataset data = kind == "adult" ? ingest_adult(path) : ingest_law(path);
        return std::make_shared<EmpiricalAuditInstance>(encode(data, fit_encoding(data)));
    });
}

Json instance_to_json(const AuditInstance& instance) {
    if (auto* m = dynamic_cast<const MixtureAuditInstance*>(&instance)) {
        Json doc{{"kind", "mixture"},
                 {"group_probs", m->group_probs()},
                 {"label_probs", m->label_probs()},
                 {"constants", constants_to_json(m->family().constants())}};
        if (auto* g = dynamic_cast<const SphericalGaussian*>(&m->family())) {
            doc["family"] = "spherical_gaussian";
            doc["d"] = g->dim();
            doc["sigma2"] = g->sigma2();
        } else if (dynamic_cast<const ExponentialFamily1D*>(&m->family())) {
            doc["family"] = "exponential";
            const ParamSet& ps = m->family().param_set();
            doc["theta_box"] = Vector{ps.lo()[0], ps.hi()[0]};
        } else {
            throw DomainError("family " + m->family().name() + " has no JSON form");
        }
        Json means = Json::array();
        for (std::size_t a = 0; a < m->n_groups(); ++a) {
            Json per = Json::array();
            for (int y = 0; y < 2; ++y) per.push_back(to_json_vec(m->family().grad_log_partition(m->theta(y, a))));
            means.push_back(per);
        }
        doc["means"] = means;
        return doc;
    }
    if (auto* lb = dynamic_cast<const LowerBoundInstance*>(&instance)) {
        return Json{{"kind", "lower_bound"},
                    {"eps", rational_to_string(lb->eps())},
                    {"p", rational_to_string(lb->p())},
                    {"q", rational_to_string(lb->q())},
                    {"hypothesis", hypothesis_name(lb->hypothesis())},
                    {"group1_prob", rational_to_string(lb->group_prob(1))}};
    }
    throw DomainError("instance kind " + instance.kind() + " has no JSON form");
}

void check_classifier_json(const Json& doc) {
    static const std::vector<std::string> kinds{"all_LR", "wo_A_LR", "logistic", "random", "sense_attr",
                                                "constant", "halfspace", "calibrated_halfspace", "instance"};
    const std::string kind = kind_of(doc, "classifier");
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
        throw ConfigError("unknown classifier kind '" + kind + "'");
}

std::shared_ptr<const Classifier> classifier_from_json(const Json& doc, const AuditInstance& instance,
                                                       RngStream& rng) {
    check_classifier_json(doc);
    return config_guard([&]() -> std::shared_ptr<const Classifier> {
        const std::string kind = doc["kind"].get<std::string>();
        if (kind == "all_LR" || kind == "wo_A_LR") {
            auto* emp = dynamic_cast<const EmpiricalAuditInstance*>(&instance);
            if (!emp) throw ConfigError(kind + " needs an empirical instance");
            LogisticConfig c;
            c.exclude_sensitive = kind == "wo_A_LR";
            c.train_size = get_or<std::size_t>(doc, "train_size", c.train_size);
            c.learning_rate = get_or<double>(doc, "learning_rate", c.learning_rate);
            c.iterations = get_or<std::size_t>(doc, "iterations", c.iterations);
            c.threshold = get_or<double>(doc, "threshold", c.threshold);
            c.allow_single_class = get_or<bool>(doc, "allow_single_class", c.allow_single_class);
            RngStream train_rng = doc.contains("seed") ? RngStream(doc["seed"].get<std::uint64_t>()) : rng;
            return std::make_shared<LogisticClassifier>(train_logistic(emp->rows(), c, train_rng));
        }
        if (kind == "logistic") {
            LogisticModel m;
            m.weights = doc.at("weights").get<Vector>();
            m.bias = doc.at("bias").get<double>();
            m.center = get_or<Vector>(doc, "center", Vector(m.weights.size(), 0.0));
            m.scale = get_or<Vector>(doc, "scale", Vector(m.weights.size(), 1.0));
            m.include_sensitive = get_or<bool>(doc, "include_sensitive", true);
            m.threshold = get_or<double>(doc, "threshold", 0.5);
            return std::make_shared<LogisticClassifier>(std::move(m));
        }
        if (kind == "random") return builtin_classifier(BuiltinKind::random, get_or<std::uint64_t>(doc, "seed", 0));
        if (kind == "sense_attr") return builtin_classifier(BuiltinKind::sense_attr, 0);
        if (kind == "constant") return std::make_shared<ConstantClassifier>(doc.at("value").get<int>());
        if (kind == "halfspace")
            return std::make_shared<GroupHalfspaceClassifier>(doc.at("directions").get<std::vector<Vector>>(),
                                                              doc.at("offsets").get<Vector>());
        if (kind == "calibrated_halfspace") {
            auto* m = dynamic_cast<const MixtureAuditInstance*>(&instance);
            if (!m) throw ConfigError("calibrated_halfspace needs a mixture instance");
            Vector acc = get_or<Vector>(doc, "acceptance", Vector{0.5, 0.65});
            return std::make_shared<GroupHalfspaceClassifier>(calibrate_orthogonal_halfspace(*m, acc, rng));
        }
        auto* lb = dynamic_cast<const LowerBoundInstance*>(&instance);
        if (!lb) throw ConfigError("classifier kind 'instance' needs a lower-bound instance");
        return lb->classifier();
    });
}

Json classifier_to_json(const Classifier& classifier) {
    if (auto* lr = dynamic_cast<const LogisticClassifier*>(&classifier)) {
        const LogisticModel& m = lr->model();
        return Json{{"kind", "logistic"},      {"weights", m.weights},
                    {"bias", m.bias},          {"center", m.center},
                    {"scale", m.scale},        {"include_sensitive", m.include_sensitive},
                    {"threshold", m.threshold}};
    }
    if (auto* r = dynamic_cast<const RandomClassifier*>(&classifier))
        return Json{{"kind", "random"}, {"seed", r->seed()}};
    if (dynamic_cast<const SenseAttrClassifier*>(&classifier)) return Json{{"kind", "sense_attr"}};
    if (auto* c = dynamic_cast<const ConstantClassifier*>(&classifier))
        return Json{{"kind", "constant"}, {"value", c->value()}};
    if (auto* h = dynamic_cast<const GroupHalfspaceClassifier*>(&classifier))
        return Json{{"kind", "halfspace"}, {"directions", h->directions()}, {"offsets", h->offsets()}};
    if (dynamic_cast<const LowerBoundClassifier*>(&classifier)) return Json{{"kind", "instance"}};
    throw DomainError("classifier has no JSON form");
}

Json report_to_json(const AuditReport& r) {
    return Json{{"algorithm", r.algorithm},
                {"verdict", verdict_name(r.verdict)},
                {"delta_hat", r.delta_hat},
                {"samples_drawn", r.samples_drawn},
                {"labels_requested", r.labels_requested},
                {"cost", r.cost},
                {"tau", r.tau_used},
                {"capped", r.capped},
                {"seed", r.seed},
                {"truncated_run", r.truncated_run},
                {"label_cost", r.label_cost}};
}

Json params_to_json(const std::vector<CellParams>& params) {
    Json arr = Json::array();
    for (const auto& p : params)
        arr.push_back(Json{{"group", p.group},
                           {"y", p.y},
                           {"theta_hat", p.theta_hat},
                           {"q_tilde", p.q_tilde},
                           {"q_hat", p.q_hat},
                           {"p_hat", p.p_hat}});
    return arr;
}

Json summary_to_json(const PopulationSummary& s) {
    auto cells = [](const std::array<Vector, 2>& v) { return Json{{"y0", v[0]}, {"y1", v[1]}}; };
    return Json{{"n_groups", s.n_groups},
                {"group_probs", s.group_probs},
                {"beta_neg_rate", s.beta_neg_rate},
                {"beta_a", s.beta_a},
                {"p_joint", cells(s.p_joint)},
                {"q_joint", cells(s.q_joint)},
                {"p_cond", cells(s.p_cond)},
                {"q_cond", cells(s.q_cond)},
                {"gamma", Json{{"f0y0", s.gamma[0][0]}, {"f0y1", s.gamma[0][1]},
                               {"f1y0", s.gamma[1][0]}, {"f1y1", s.gamma[1][1]}}},
                {"q_min_a", s.q_min_a},
                {"q_max_a", s.q_max_a},
                {"eod", s.eod}};
}

}  // namespace auditlab
