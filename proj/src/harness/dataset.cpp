#include "auditlab/harness/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include "auditlab/errors.hpp"
#include "auditlab/io/text.hpp"

namespace auditlab {

namespace {

ColumnRule numeric(std::string name, std::optional<std::pair<double, double>> range = std::nullopt) {
    return {std::move(name), ColumnRole::numeric, range, {}, {}};
}

ColumnRule categorical(std::string name) { return {std::move(name), ColumnRole::categorical, {}, {}, {}}; }

ColumnRule binary(std::string name, ColumnRole role, std::vector<std::string> pos,
                  std::vector<std::string> neg) {
    return {std::move(name), role, std::nullopt, std::move(pos), std::move(neg)};
}

bool is_missing(const std::string& v) { return v.empty() || v == "?" || v == "NA" || v == "nan"; }

}  // namespace

std::string normalize_column_name(const std::string& name) {
    std::string out = io::trim(name);
    for (char& c : out) {
        if (c == ' ') c = '_';
        else c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

const DatasetSchema& adult_schema() {
    static const DatasetSchema schema{
        "adult",
        {numeric("age"), categorical("workclass"), numeric("fnlwgt"), categorical("education"),
         numeric("educational-num"), categorical("marital-status"), categorical("occupation"),
         categorical("relationship"), categorical("race"),
         binary("gender", ColumnRole::sensitive, {"Male"}, {"Female"}), numeric("capital-gain"),
         numeric("capital-loss"), numeric("hours-per-week"), categorical("native-country"),
         binary("income", ColumnRole::label, {">50K", ">50K."}, {"<=50K", "<=50K.", "\xe2\x89\xa4" "50K"})}};
    return schema;
}

const DatasetSchema& law_schema() {
    static const DatasetSchema schema{
        "law",
        {numeric("decile1b"), numeric("decile3"), numeric("lsat", std::make_pair(11.0, 48.0)),
         numeric("ugpa"), numeric("zfygpa"), numeric("zgpa"), categorical("fulltime"),
         categorical("fam_inc"), binary("male", ColumnRole::sensitive, {"1", "1.0"}, {"0", "0.0"}),
         categorical("tier"), categorical("racetxt"),
         binary("pass_bar", ColumnRole::label, {"1", "1.0"}, {"0", "0.0"})}};
    return schema;
}

Dataset ingest(std::istream& in, const DatasetSchema& schema) {
    io::CsvReader reader(in);
    std::vector<std::string> header;
    if (!reader.next(header)) throw SchemaError(schema.name + ": empty file");

    std::map<std::string, std::size_t> position;
    for (std::size_t j = 0; j < header.size(); ++j) position[normalize_column_name(header[j])] = j;
    std::vector<std::string> missing, extra;
    std::set<std::string> expected;
    for (const auto& c : schema.columns) {
        expected.insert(c.name);
        if (!position.count(c.name)) missing.push_back(c.name);
    }
    for (const auto& [name, j] : position)
        if (!expected.count(name)) extra.push_back(name);
    if (!missing.empty() || !extra.empty() || position.size() != header.size()) {
        std::string msg = schema.name + ": schema mismatch;";
        if (!missing.empty()) {
            msg += " missing:";
            for (auto& m : missing) msg += " " + m;
        }
        if (!extra.empty()) {
            msg += " extra:";
            for (auto& e : extra) msg += " " + e;
        }
        if (position.size() != header.size()) msg += " duplicate column names";
        throw SchemaError(msg);
    }

    Dataset data;
    data.name = schema.name;
    std::vector<std::size_t> feature_index(schema.columns.size(), 0);
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
        const auto& rule = schema.columns[c];
        if (rule.role == ColumnRole::numeric || rule.role == ColumnRole::categorical) {
            feature_index[c] = data.features.size();
            FeatureColumn col;
            col.name = rule.name;
            col.categorical = rule.role == ColumnRole::categorical;
            data.features.push_back(std::move(col));
        }
    }

    std::vector<std::string> fields;
    while (reader.next(fields)) {
        const std::string where = schema.name + " line " + std::to_string(reader.line_number());
        if (fields.size() != header.size())
            throw RowError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()));
        for (std::size_t c = 0; c < schema.columns.size(); ++c) {
            const auto& rule = schema.columns[c];
            std::string raw = io::trim(fields[position[rule.name]]);
            switch (rule.role) {
                case ColumnRole::numeric: {
                    double v = std::nan("");
                    if (!is_missing(raw)) {
                        auto parsed = io::parse_double(raw);
                        if (!parsed || !std::isfinite(*parsed))
                            throw RowError(where + ": bad numeric value '" + raw + "' in " + rule.name);
                        v = *parsed;
                        if (rule.range && (v < rule.range->first || v > rule.range->second))
                            throw RowError(where + ": " + rule.name + " value " + raw +
                                           " outside [" + io::format_sig6(rule.range->first) + ", " +
                                           io::format_sig6(rule.range->second) + "]");
                    }
                    data.features[feature_index[c]].numeric.push_back(v);
                    break;
                }
                case ColumnRole::categorical:
                    data.features[feature_index[c]].levels.push_back(is_missing(raw) ? std::string() : raw);
                    break;
                case ColumnRole::sensitive:
                case ColumnRole::label: {
                    int v = -1;
                    if (std::find(rule.positive.begin(), rule.positive.end(), raw) != rule.positive.end()) v = 1;
                    if (std::find(rule.negative.begin(), rule.negative.end(), raw) != rule.negative.end()) v = 0;
                    if (v < 0) throw RowError(where + ": unrecognized " + rule.name + " value '" + raw + "'");
                    (rule.role == ColumnRole::sensitive ? data.a : data.y).push_back(v);
                    break;
                }
            }
        }
    }
    return data;
}

Dataset ingest_file(const std::string& path, const DatasetSchema& schema) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return ingest(in, schema);
}

Dataset ingest_adult(const std::string& path) { return ingest_file(path, adult_schema()); }
Dataset ingest_law(const std::string& path) { return ingest_file(path, law_schema()); }

std::size_t EncodingSpec::width() const {
    std::size_t w = 0;
    for (const auto& c : columns) w += c.categorical ? c.levels.size() : 1;
    return w;
}

std::vector<std::string> EncodingSpec::feature_names() const {
    std::vector<std::string> out;
    for (const auto& c : columns) {
        if (!c.categorical) out.push_back(c.name);
        else
            for (const auto& l : c.levels) out.push_back(c.name + "=" + l);
    }
    return out;
}

EncodingSpec fit_encoding(const Dataset& data) {
    EncodingSpec spec;
    for (const auto& col : data.features) {
        EncodedColumn e;
        e.name = col.name;
        e.categorical = col.categorical;
        if (!col.categorical) {
            Vector present;
            for (double v : col.numeric)
                if (!std::isnan(v)) present.push_back(v);
            if (!present.empty()) {
                std::sort(present.begin(), present.end());
                const std::size_t n = present.size();
                e.impute_value = n % 2 ? present[n / 2] : 0.5 * (present[n / 2 - 1] + present[n / 2]);
            }
        } else {
            std::map<std::string, std::size_t> counts;
            for (const auto& v : col.levels)
                if (!v.empty()) ++counts[v];
            std::size_t best = 0;
            for (const auto& [level, n] : counts) {
                e.levels.push_back(level);
                if (n > best) {
                    best = n;
                    e.impute_level = level;
                }
            }
        }
        spec.columns.push_back(std::move(e));
    }
    return spec;
}

LabeledData encode(const Dataset& data, const EncodingSpec& spec) {
    if (spec.columns.size() != data.features.size()) throw DomainError("encoding does not match dataset");
    LabeledData out;
    out.dim = spec.width();
    Vector row(out.dim);
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::fill(row.begin(), row.end(), 0.0);
        std::size_t k = 0;
        for (std::size_t c = 0; c < spec.columns.size(); ++c) {
            const auto& e = spec.columns[c];
            const auto& col = data.features[c];
            if (!e.categorical) {
                double v = col.numeric[i];
                row[k++] = std::isnan(v) ? e.impute_value : v;
            } else {
                const std::string& v = col.levels[i].empty() ? e.impute_level : col.levels[i];
                auto it = std::lower_bound(e.levels.begin(), e.levels.end(), v);
                if (it != e.levels.end() && *it == v) row[k + static_cast<std::size_t>(it - e.levels.begin())] = 1.0;
                k += e.levels.size();
            }
        }
        out.push_back(row, data.a[i], data.y[i]);
    }
    return out;
}

void write_encoded_csv(std::ostream& out, const LabeledData& data,
                       const std::vector<std::string>& feature_names) {
    if (feature_names.size() != data.dim) throw DomainError("feature name count mismatch");
    for (const auto& n : feature_names) out << io::csv_escape(n) << ',';
    out << "a,y\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (double v : data.row(i)) out << io::format_exact(v) << ',';
        out << data.a[i] << ',' << data.y[i] << '\n';
    }
}

LabeledData read_encoded_csv(std::istream& in) {
    io::CsvReader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) throw SchemaError("empty encoded dataset");
    if (fields.size() < 3 || io::trim(fields[fields.size() - 2]) != "a" || io::trim(fields.back()) != "y")
        throw SchemaError("encoded dataset header must end with a,y");
    LabeledData data;
    data.dim = fields.size() - 2;
    Vector row(data.dim);
    while (reader.next(fields)) {
        const std::string line = "line " + std::to_string(reader.line_number());
        if (fields.size() != data.dim + 2) throw RowError(line + ": wrong field count");
        for (std::size_t j = 0; j < data.dim; ++j) {
            auto v = io::parse_double(fields[j]);
            if (!v) throw RowError(line + ": bad feature value");
            row[j] = *v;
        }
        auto a = io::parse_int(fields[data.dim]);
        auto y = io::parse_int(fields[data.dim + 1]);
        if (!a || *a < 0 || !y || (*y != 0 && *y != 1)) throw RowError(line + ": bad a or y");
        data.push_back(row, static_cast<int>(*a), static_cast<int>(*y));
    }
    return data;
}

LabeledData load_encoded_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return read_encoded_csv(in);
}

LabeledData synthetic_tabular(const SyntheticTabularConfig& cfg, RngStream& rng) {
    if (cfg.n_rows == 0 || cfg.n_features == 0) throw DomainError("synthetic table needs rows and features");
    if (!(cfg.group1_prob > 0.0 && cfg.group1_prob < 1.0)) throw DomainError("group1_prob must be in (0, 1)");
    if (cfg.label_probs.size() != 2) throw DomainError("two label probabilities required");
    for (double q : cfg.label_probs)
        if (!(q > 0.0 && q < 1.0)) throw DomainError("label probabilities must be in (0, 1)");
    const std::size_t d = cfg.n_features;
    Vector w(d), v(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) w[j] = 1.0 / std::sqrt(static_cast<double>(d));
    v[0] = 1.0;
    LabeledData data;
    data.dim = d;
    data.x.reserve(cfg.n_rows * d);
    Vector row(d);
    for (std::size_t i = 0; i < cfg.n_rows; ++i) {
        const int a = rng.bernoulli(cfg.group1_prob) ? 1 : 0;
        const int y = rng.bernoulli(cfg.label_probs[static_cast<std::size_t>(a)]) ? 1 : 0;
        for (std::size_t j = 0; j < d; ++j)
            row[j] = cfg.signal * (2.0 * y - 1.0) * w[j] + cfg.group_shift * (2.0 * a - 1.0) * v[j] +
                     rng.normal();
        data.push_back(row, a, y);
    }
    return data;
}

namespace {

template <std::size_t N>
const char* pick(const char* const (&options)[N], RngStream& rng) {
    return options[rng.index(N)];
}

}  // namespace

void write_synthetic_adult(std::ostream& out, std::size_t n_rows, RngStream& rng) {
    static const char* const workclass[] = {"Private", "Self-emp-not-inc", "Local-gov", "State-gov", "?"};
    static const char* const education[] = {"HS-grad", "Some-college", "Bachelors", "Masters", "11th"};
    static const char* const marital[] = {"Married-civ-spouse", "Never-married", "Divorced", "Widowed"};
    static const char* const occupation[] = {"Craft-repair", "Exec-managerial", "Sales", "Tech-support", "?"};
    static const char* const relationship[] = {"Husband", "Not-in-family", "Own-child", "Wife", "Unmarried"};
    static const char* const race[] = {"White", "Black", "Asian-Pac-Islander", "Other"};
    static const char* const country[] = {"United-States", "Mexico", "India", "Germany"};
    out << "age,workclass,fnlwgt,education,educational-num,marital-status,occupation,relationship,"
           "race,gender,capital-gain,capital-loss,hours-per-week,native-country,income\n";
    for (std::size_t i = 0; i < n_rows; ++i) {
        const bool male = rng.bernoulli(0.67);
        const int edu = 1 + static_cast<int>(rng.index(16));
        const int age = 17 + static_cast<int>(rng.index(74));
        const int hours = 1 + static_cast<int>(rng.index(99));
        const double score = 0.25 * (edu - 9) + 0.03 * (age - 38) + 0.03 * (hours - 40) + (male ? 0.8 : -0.4);
        const bool rich = rng.uniform() < 1.0 / (1.0 + std::exp(-(score - 1.2)));
        const int gain = rng.bernoulli(0.1) ? static_cast<int>(rng.index(99999)) : 0;
        const int loss = rng.bernoulli(0.05) ? static_cast<int>(rng.index(4356)) : 0;
        out << age << ',' << pick(workclass, rng) << ',' << 13492 + rng.index(1476908) << ','
            << pick(education, rng) << ',' << edu << ',' << pick(marital, rng) << ','
            << pick(occupation, rng) << ',' << pick(relationship, rng) << ',' << pick(race, rng) << ','
            << (male ? "Male" : "Female") << ',' << gain << ',' << loss << ',' << hours << ','
            << pick(country, rng) << ',' << (rich ? ">50K" : "<=50K") << '\n';
    }
}

void write_synthetic_law(std::ostream& out, std::size_t n_rows, RngStream& rng) {
    static const char* const race[] = {"White", "Black", "Hispanic", "Asian", "Other"};
    out << "decile1b,decile3,lsat,ugpa,zfygpa,zgpa,fulltime,fam_inc,male,tier,racetxt,pass_bar\n";
    for (std::size_t i = 0; i < n_rows; ++i) {
        const bool male = rng.bernoulli(0.56);
        const double lsat = std::clamp(37.0 + 5.0 * rng.normal(), 11.0, 48.0);
        const double ugpa = std::clamp(3.2 + 0.4 * rng.normal(), 1.5, 4.0);
        const double zfy = std::clamp(rng.normal(), -3.35, 3.48);
        const double zg = std::clamp(0.8 * zfy + 0.6 * rng.normal(), -6.44, 4.01);
        const double score = 0.25 * (lsat - 37.0) + 1.2 * zg + (male ? 0.2 : 0.0) + 2.0;
        const bool pass = rng.uniform() < 1.0 / (1.0 + std::exp(-score));
        out << io::format_sig6(1.0 + static_cast<double>(rng.index(10))) << ','
            << (rng.bernoulli(0.05) ? std::string() : io::format_sig6(1.0 + static_cast<double>(rng.index(10))))
            << ',' << io::format_sig6(std::round(lsat * 10.0) / 10.0) << ','
            << io::format_sig6(std::round(ugpa * 10.0) / 10.0) << ','
            << io::format_sig6(std::round(zfy * 100.0) / 100.0) << ','
            << io::format_sig6(std::round(zg * 100.0) / 100.0) << ',' << (rng.bernoulli(0.9) ? 1 : 2) << ','
            << 1 + rng.index(5) << ',' << (male ? 1 : 0) << ',' << 1 + rng.index(6) << ','
            << pick(race, rng) << ',' << (pass ? 1 : 0) << '\n';
    }
}

}  // namespace auditlab
