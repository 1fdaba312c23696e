#include "auditlab/harness/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "auditlab/errors.hpp"
#include "auditlab/io/text.hpp"

namespace auditlab {

const char* mode_name(ExperimentMode m) {
    switch (m) {
        case ExperimentMode::blackbox: return "blackbox";
        case ExperimentMode::mixture: return "mixture";
        case ExperimentMode::lower_bound_check: return "lower_bound_check";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    if (seeds.empty()) throw ConfigError("seeds must be nonempty");
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
        throw ConfigError("seeds must be distinct");
    if (cost_pairs.empty()) throw ConfigError("cost_pairs must be nonempty");
    for (const auto& c : cost_pairs)
        if (!(c.c_feat >= 0.0 && c.c_lab >= 0.0)) throw ConfigError("costs must be non-negative");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must be in (0, 1)");
    if (caps.tau_cap && !(*caps.tau_cap >= 1.0)) throw ConfigError("tau_cap must be at least 1");
    if (caps.R_cap && *caps.R_cap == 0) throw ConfigError("R_cap must be at least 1");
    if (caps.draw_cap == 0) throw ConfigError("draw_cap must be at least 1");
    if (past_db_size && *past_db_size == 0) throw ConfigError("past_db_size must be positive");
    switch (mode) {
        case ExperimentMode::blackbox:
            if (tau_sweep.empty()) throw ConfigError("tau_sweep must be nonempty");
            for (double t : tau_sweep)
                if (!(t >= 1.0)) throw ConfigError("tau values must be at least 1");
            break;
        case ExperimentMode::mixture:
            if (eps_sweep.empty()) throw ConfigError("eps_sweep must be nonempty");
            for (double e : eps_sweep)
                if (!(e > 0.0 && e < 1.0)) throw ConfigError("eps values must be in (0, 1)");
            break;
        case ExperimentMode::lower_bound_check:
            if (lower_bound.cases.empty() && lower_bound.slope_eps.empty())
                throw ConfigError("lower_bound needs cases or slope_eps");
            if (!lower_bound.slope_eps.empty() && lower_bound.slope_eps.size() < 2)
                throw ConfigError("slope fit needs at least two eps values");
            if (lower_bound.runs == 0 || lower_bound.runs > seeds.size())
                throw ConfigError("lower_bound.runs must be between 1 and the number of seeds");
            break;
    }
    if (!(eps_prime > 0.0 && eps_prime < 1.0)) throw ConfigError("eps_prime must be in (0, 1)");
    if (!(R_log_constant > 0.0)) throw ConfigError("R_log_constant must be positive");
    try {
        trunc.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("trunc_est: ") + e.what());
    }
}

namespace {

void reject_unknown(const Json& doc, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : doc.items())
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

std::string exact_text(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return io::format_exact(v.get<double>());
    throw ConfigError("expected a number or a rational string");
}

Json default_instance(ExperimentMode mode) {
    if (mode == ExperimentMode::mixture) return Json{{"kind", "generated_mixture"}};
    return Json{{"kind", "synthetic_tabular"}};
}

Json default_classifier(ExperimentMode mode) {
    if (mode == ExperimentMode::mixture)
        return Json{{"kind", "calibrated_halfspace"}, {"acceptance", Vector{0.5, 0.65}}};
    return Json{{"kind", "all_LR"}, {"train_size", 100}};
}

void parse_trunc(const Json& t, TruncEstConfig& c) {
    reject_unknown(t,
                   {"n_init", "m_per_candidate", "n_candidates", "eta", "max_accept_attempts",
                    "use_theoretical_schedule", "schedule_C", "tail_average", "fit_to_data", "min_steps",
                    "strict_majority"},
                   "trunc_est");
    if (t.contains("n_init")) c.n_init = t["n_init"].get<std::size_t>();
    if (t.contains("m_per_candidate")) c.m_per_candidate = t["m_per_candidate"].get<std::size_t>();
    if (t.contains("n_candidates")) c.n_candidates = t["n_candidates"].get<std::size_t>();
    if (t.contains("eta")) c.eta = t["eta"].get<double>();
    if (t.contains("max_accept_attempts")) c.max_accept_attempts = t["max_accept_attempts"].get<std::size_t>();
    if (t.contains("use_theoretical_schedule"))
        c.use_theoretical_schedule = t["use_theoretical_schedule"].get<bool>();
    if (t.contains("schedule_C")) c.schedule_C = t["schedule_C"].get<double>();
    if (t.contains("tail_average")) c.tail_average = t["tail_average"].get<bool>();
    if (t.contains("fit_to_data")) c.fit_to_data = t["fit_to_data"].get<bool>();
    if (t.contains("min_steps")) c.min_steps = t["min_steps"].get<std::size_t>();
    if (t.contains("strict_majority")) c.strict_majority = t["strict_majority"].get<bool>();
}

ExperimentConfig parse_inner(const Json& doc, const std::string& base_dir) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(doc,
                   {"mode", "instance", "classifier", "tau_sweep", "eps_sweep", "cost_pairs", "seeds", "caps",
                    "past_db_size", "delta", "instance_seed", "seed_offset", "threads", "output_path", "format",
                    "eps_prime", "R_log_constant", "trunc_est", "lower_bound"},
                   "config");
    ExperimentConfig c;
    c.base_dir = base_dir;
    if (!doc.contains("mode")) throw ConfigError("config needs a mode");
    const std::string mode = doc["mode"].get<std::string>();
    if (mode == "blackbox") c.mode = ExperimentMode::blackbox;
    else if (mode == "mixture") c.mode = ExperimentMode::mixture;
    else if (mode == "lower_bound_check" || mode == "lower_bound") c.mode = ExperimentMode::lower_bound_check;
    else throw ConfigError("unknown mode '" + mode + "'");

    c.instance = doc.contains("instance") ? doc["instance"] : default_instance(c.mode);
    c.classifier = doc.contains("classifier") ? doc["classifier"] : default_classifier(c.mode);
    if (c.instance.is_string()) {
        // A path to a separate instance document.
        std::filesystem::path p(c.instance.get<std::string>());
        if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
        std::ifstream in(p);
        if (!in) throw ConfigError("cannot open instance file " + p.string());
        c.instance = Json::parse(in);
    }
    if (c.instance.is_object() && c.classifier.is_object() && !c.classifier.contains("train_size")) {
        const std::string ik = c.instance.value("kind", ""), ck = c.classifier.value("kind", "");
        if (ck == "all_LR" || ck == "wo_A_LR") {
            if (ik == "adult") c.classifier["train_size"] = 100;
            if (ik == "law") c.classifier["train_size"] = 5000;
        }
    }
    if (c.mode != ExperimentMode::lower_bound_check) {
        check_instance_json(c.instance);
        check_classifier_json(c.classifier);
    }
    if (doc.contains("tau_sweep")) c.tau_sweep = doc["tau_sweep"].get<Vector>();
    if (doc.contains("eps_sweep")) c.eps_sweep = doc["eps_sweep"].get<Vector>();
    if (doc.contains("cost_pairs")) {
        c.cost_pairs.clear();
        for (const auto& pair : doc["cost_pairs"]) {
            if (pair.is_array() && pair.size() == 2)
                c.cost_pairs.push_back({pair[0].get<double>(), pair[1].get<double>()});
            else if (pair.is_string())
                c.cost_pairs.push_back(parse_cost_pair(pair.get<std::string>()));
            else throw ConfigError("cost pairs are [c_feat, c_lab] or \"c_feat:c_lab\"");
        }
    }
    if (doc.contains("seeds")) c.seeds = doc["seeds"].get<std::vector<std::uint64_t>>();
    if (doc.contains("caps")) {
        const Json& k = doc["caps"];
        reject_unknown(k, {"tau_cap", "R_cap", "draw_cap"}, "caps");
        if (k.contains("tau_cap"))
            c.caps.tau_cap = k["tau_cap"].is_null() ? std::nullopt : std::optional<double>(k["tau_cap"].get<double>());
        if (k.contains("R_cap"))
            c.caps.R_cap = k["R_cap"].is_null() ? std::nullopt
                                                : std::optional<std::uint64_t>(k["R_cap"].get<std::uint64_t>());
        if (k.contains("draw_cap")) c.caps.draw_cap = k["draw_cap"].get<std::uint64_t>();
    }
    if (doc.contains("past_db_size")) {
        const Json& v = doc["past_db_size"];
        if (v.is_string() && v.get<std::string>() == "auto") c.past_db_size = std::nullopt;
        else c.past_db_size = v.get<std::size_t>();
    }
    if (doc.contains("delta")) c.delta = doc["delta"].get<double>();
    if (doc.contains("instance_seed")) c.instance_seed = doc["instance_seed"].get<std::uint64_t>();
    if (doc.contains("seed_offset")) c.seed_offset = doc["seed_offset"].get<std::uint64_t>();
    if (doc.contains("threads")) c.threads = doc["threads"].get<unsigned>();
    if (doc.contains("output_path")) c.output_path = doc["output_path"].get<std::string>();
    if (doc.contains("format")) c.format = parse_result_format(doc["format"].get<std::string>());
    if (doc.contains("eps_prime")) c.eps_prime = doc["eps_prime"].get<double>();
    if (doc.contains("R_log_constant")) c.R_log_constant = doc["R_log_constant"].get<double>();
    if (doc.contains("trunc_est")) parse_trunc(doc["trunc_est"], c.trunc);
    if (doc.contains("lower_bound")) {
        const Json& l = doc["lower_bound"];
        reject_unknown(l, {"cases", "group1_prob", "slope_eps", "slope_p", "slope_q", "runs"}, "lower_bound");
        if (l.contains("cases")) {
            c.lower_bound.cases.clear();
            for (const auto& cs : l["cases"])
                c.lower_bound.cases.push_back({exact_text(cs.at("eps")), exact_text(cs.at("p")), exact_text(cs.at("q"))});
        }
        if (l.contains("group1_prob")) c.lower_bound.group1_prob = exact_text(l["group1_prob"]);
        if (l.contains("slope_eps")) c.lower_bound.slope_eps = l["slope_eps"].get<Vector>();
        if (l.contains("slope_p")) c.lower_bound.slope_p = exact_text(l["slope_p"]);
        if (l.contains("slope_q")) c.lower_bound.slope_q = exact_text(l["slope_q"]);
        if (l.contains("runs")) c.lower_bound.runs = l["runs"].get<std::size_t>();
    }
    c.validate();
    return c;
}

}  // namespace

ExperimentConfig parse_config(const Json& doc, const std::string& base_dir) {
    try {
        return parse_inner(doc, base_dir);
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("JSON: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_config(doc, std::filesystem::path(path).parent_path().string());
}

}  // namespace auditlab
