#include "auditlab/harness/results.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <tuple>

#include <json.hpp>

#include "auditlab/errors.hpp"
#include "auditlab/io/text.hpp"

namespace auditlab {

using nlohmann::json;

const std::vector<std::string>& result_columns() {
    static const std::vector<std::string> cols{
        "algorithm",      "sweep_value",   "cost_pair",     "mean_cost",
        "std_cost",       "mean_labels",   "std_labels",    "mean_samples",
        "mean_delta_hat", "std_delta_hat", "true_eod",      "correctness_fraction",
        "n_seeds",        "capped",        "truncated_run", "premise_violated",
        "mean_label_cost"};
    return cols;
}

std::string format_cost_pair(const CostModel& c) {
    return io::format_sig6(c.c_feat) + ":" + io::format_sig6(c.c_lab);
}

CostModel parse_cost_pair(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) throw DomainError("cost pair must look like c_feat:c_lab");
    auto f = io::parse_double(text.substr(0, colon));
    auto l = io::parse_double(text.substr(colon + 1));
    if (!f || !l || *f < 0.0 || *l < 0.0) throw DomainError("bad cost pair '" + text + "'");
    return {*f, *l};
}

RunRecord record_from_report(const AuditReport& report, const CostLedger& ledger, double sweep_value,
                             double true_eod) {
    RunRecord r;
    r.algorithm = report.algorithm;
    r.sweep_value = sweep_value;
    r.seed = report.seed;
    r.n_label_requests = ledger.n_label_requests();
    r.n_feature_requests = ledger.n_feature_requests();
    r.n_defaults = ledger.n_defaults();
    r.n_drawn = ledger.n_drawn();
    r.delta_hat = report.delta_hat;
    r.verdict = report.verdict;
    r.true_eod = true_eod;
    r.capped = report.capped;
    r.truncated_run = report.truncated_run;
    return r;
}

double cost_of(const RunRecord& r, const CostModel& c) {
    return c.c_feat * static_cast<double>(r.n_label_requests + r.n_feature_requests) +
           c.c_lab * static_cast<double>(r.n_defaults);
}

double label_cost_of(const RunRecord& r, const CostModel& c) {
    return c.c_lab * static_cast<double>(r.n_defaults);
}

MeanStd mean_std(const std::vector<double>& values) {
    if (values.empty()) throw DomainError("mean of an empty sample");
    MeanStd out;
    for (double v : values) out.mean += v;
    out.mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size()));
    return out;
}

Truth ground_truth(double true_eod, double eps) {
    if (true_eod > eps) return Truth::unfair;
    if (true_eod < eps / 2.0) return Truth::fair;
    return Truth::premise_violated;
}

void sort_rows(std::vector<ResultRow>& rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& x, const ResultRow& y) {
        return std::tie(x.algorithm, x.sweep_value, x.cost_pair.c_feat, x.cost_pair.c_lab) <
               std::tie(y.algorithm, y.sweep_value, y.cost_pair.c_feat, y.cost_pair.c_lab);
    });
}

std::vector<ResultRow> aggregate(const std::vector<RunRecord>& records,
                                 const std::vector<CostModel>& cost_pairs, bool score) {
    std::map<std::pair<std::string, double>, std::vector<const RunRecord*>> groups;
    for (const auto& r : records) groups[{r.algorithm, r.sweep_value}].push_back(&r);

    std::vector<ResultRow> rows;
    for (const auto& [key, runs] : groups) {
        std::vector<double> labels, samples, deltas, eods;
        bool capped = false, truncated = false;
        std::size_t correct = 0;
        for (const RunRecord* r : runs) {
            labels.push_back(static_cast<double>(r->n_label_requests));
            samples.push_back(static_cast<double>(r->n_drawn));
            deltas.push_back(r->delta_hat);
            eods.push_back(r->true_eod);
            capped = capped || r->capped;
            truncated = truncated || r->truncated_run;
        }
        std::optional<double> correctness;
        bool premise_violated = false;
        if (score) {
            for (const RunRecord* r : runs) {
                Truth t = ground_truth(r->true_eod, key.second);
                if (t == Truth::premise_violated) premise_violated = true;
                const Verdict want = t == Truth::unfair ? Verdict::unfair : Verdict::fair;
                correct += r->verdict == want ? 1 : 0;
            }
            if (!premise_violated)
                correctness = static_cast<double>(correct) / static_cast<double>(runs.size());
        }
        const MeanStd ml = mean_std(labels), ms = mean_std(samples), md = mean_std(deltas);
        for (const CostModel& c : cost_pairs) {
            std::vector<double> costs, label_costs;
            for (const RunRecord* r : runs) {
                costs.push_back(cost_of(*r, c));
                label_costs.push_back(label_cost_of(*r, c));
            }
            const MeanStd mc = mean_std(costs);
            ResultRow row;
            row.algorithm = key.first;
            row.sweep_value = key.second;
            row.cost_pair = c;
            row.mean_cost = mc.mean;
            row.std_cost = mc.std;
            row.mean_labels = ml.mean;
            row.std_labels = ml.std;
            row.mean_samples = ms.mean;
            row.mean_delta_hat = md.mean;
            row.std_delta_hat = md.std;
            row.true_eod = mean_std(eods).mean;
            row.correctness_fraction = correctness;
            row.n_seeds = runs.size();
            row.capped = capped;
            row.truncated_run = truncated;
            row.premise_violated = premise_violated;
            row.mean_label_cost = mean_std(label_costs).mean;
            rows.push_back(std::move(row));
        }
    }
    sort_rows(rows);
    return rows;
}

ResultFormat parse_result_format(const std::string& name) {
    if (name == "csv") return ResultFormat::csv;
    if (name == "json") return ResultFormat::json;
    throw ConfigError("unknown result format '" + name + "' (csv or json)");
}

namespace {

std::vector<std::string> row_fields(const ResultRow& r) {
    auto b = [](bool v) { return std::string(v ? "1" : "0"); };
    return {r.algorithm,
            io::format_sig6(r.sweep_value),
            format_cost_pair(r.cost_pair),
            io::format_sig6(r.mean_cost),
            io::format_sig6(r.std_cost),
            io::format_sig6(r.mean_labels),
            io::format_sig6(r.std_labels),
            io::format_sig6(r.mean_samples),
            io::format_sig6(r.mean_delta_hat),
            io::format_sig6(r.std_delta_hat),
            io::format_sig6(r.true_eod),
            r.correctness_fraction ? io::format_sig6(*r.correctness_fraction) : std::string(),
            std::to_string(r.n_seeds),
            b(r.capped),
            b(r.truncated_run),
            b(r.premise_violated),
            io::format_sig6(r.mean_label_cost)};
}

double num(const std::string& s, const std::string& column, std::size_t line) {
    auto v = io::parse_double(s);
    if (!v) throw RowError("line " + std::to_string(line) + ": bad number in " + column);
    return *v;
}

bool flag(const std::string& s, const std::string& column, std::size_t line) {
    std::string t = io::trim(s);
    if (t == "1" || t == "true") return true;
    if (t == "0" || t == "false") return false;
    throw RowError("line " + std::to_string(line) + ": bad flag in " + column);
}

ResultRow row_from_fields(const std::vector<std::string>& f, std::size_t line) {
    const auto& c = result_columns();
    ResultRow r;
    r.algorithm = f[0];
    r.sweep_value = num(f[1], c[1], line);
    try {
        r.cost_pair = parse_cost_pair(io::trim(f[2]));
    } catch (const DomainError&) {
        throw RowError("line " + std::to_string(line) + ": bad cost_pair");
    }
    r.mean_cost = num(f[3], c[3], line);
    r.std_cost = num(f[4], c[4], line);
    r.mean_labels = num(f[5], c[5], line);
    r.std_labels = num(f[6], c[6], line);
    r.mean_samples = num(f[7], c[7], line);
    r.mean_delta_hat = num(f[8], c[8], line);
    r.std_delta_hat = num(f[9], c[9], line);
    r.true_eod = num(f[10], c[10], line);
    if (!io::trim(f[11]).empty()) r.correctness_fraction = num(f[11], c[11], line);
    auto n = io::parse_int(f[12]);
    if (!n || *n < 0) throw RowError("line " + std::to_string(line) + ": bad n_seeds");
    r.n_seeds = static_cast<std::size_t>(*n);
    r.capped = flag(f[13], c[13], line);
    r.truncated_run = flag(f[14], c[14], line);
    r.premise_violated = flag(f[15], c[15], line);
    r.mean_label_cost = num(f[16], c[16], line);
    return r;
}

}  // namespace

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    const auto& cols = result_columns();
    for (std::size_t j = 0; j < cols.size(); ++j) out << (j ? "," : "") << cols[j];
    out << '\n';
    for (const auto& r : rows) {
        auto f = row_fields(r);
        for (std::size_t j = 0; j < f.size(); ++j) out << (j ? "," : "") << io::csv_escape(f[j]);
        out << '\n';
    }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
    io::CsvReader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) throw SchemaError("empty results file");
    const auto& cols = result_columns();
    if (fields.size() != cols.size()) throw SchemaError("results header has the wrong column count");
    for (std::size_t j = 0; j < cols.size(); ++j)
        if (io::trim(fields[j]) != cols[j]) throw SchemaError("expected column " + cols[j]);
    std::vector<ResultRow> rows;
    while (reader.next(fields)) {
        if (fields.size() != cols.size())
            throw RowError("line " + std::to_string(reader.line_number()) + ": wrong field count");
        rows.push_back(row_from_fields(fields, reader.line_number()));
    }
    return rows;
}

void write_results_json(std::ostream& out, const std::vector<ResultRow>& rows) {
    // Values go through the CSV text form so both formats carry the same digits.
    const auto& cols = result_columns();
    json arr = json::array();
    for (const auto& r : rows) {
        auto f = row_fields(r);
        json o = json::object();
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const std::string& name = cols[j];
            if (name == "algorithm" || name == "cost_pair") o[name] = f[j];
            else if (name == "n_seeds") o[name] = r.n_seeds;
            else if (name == "capped") o[name] = r.capped;
            else if (name == "truncated_run") o[name] = r.truncated_run;
            else if (name == "premise_violated") o[name] = r.premise_violated;
            else if (name == "correctness_fraction" && f[j].empty()) o[name] = nullptr;
            else o[name] = *io::parse_double(f[j]);
        }
        arr.push_back(std::move(o));
    }
    out << arr.dump(2) << '\n';
}

std::vector<ResultRow> read_results_json(std::istream& in) {
    json arr;
    try {
        arr = json::parse(in);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("results JSON: ") + e.what());
    }
    if (!arr.is_array()) throw SchemaError("results JSON must be an array");
    const auto& cols = result_columns();
    std::vector<ResultRow> rows;
    std::size_t index = 0;
    for (const auto& o : arr) {
        ++index;
        std::vector<std::string> f;
        for (const auto& name : cols) {
            if (!o.contains(name)) throw SchemaError("results JSON object missing " + name);
            const json& v = o[name];
            if (v.is_null()) f.emplace_back();
            else if (v.is_string()) f.push_back(v.get<std::string>());
            else if (v.is_boolean()) f.push_back(v.get<bool>() ? "1" : "0");
            else if (v.is_number_integer()) f.push_back(std::to_string(v.get<long long>()));
            else if (v.is_number()) f.push_back(io::format_exact(v.get<double>()));
            else throw RowError("object " + std::to_string(index) + ": bad value for " + name);
        }
        rows.push_back(row_from_fields(f, index));
    }
    return rows;
}

void emit_results(const std::vector<ResultRow>& rows, const std::string& path, ResultFormat format) {
    if (rows.empty()) throw DomainError("no result rows to emit");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path);
    if (format == ResultFormat::csv) write_results_csv(out, rows);
    else write_results_json(out, rows);
    out.flush();
    if (!out) throw IoError("write failed for " + path);
}

std::vector<ResultRow> parse_results(const std::string& path, ResultFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return format == ResultFormat::csv ? read_results_csv(in) : read_results_json(in);
}

}  // namespace auditlab
