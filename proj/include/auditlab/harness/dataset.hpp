#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "auditlab/instances/labeled_data.hpp"
#include "auditlab/rng.hpp"

namespace auditlab {

// Typed tabular data: numeric columns use NaN for missing values, categorical
// columns use the empty string.
struct FeatureColumn {
    std::string name;
    bool categorical = false;
    Vector numeric;
    std::vector<std::string> levels;
};

struct Dataset {
    std::string name;
    std::vector<FeatureColumn> features;
    std::vector<int> a;
    std::vector<int> y;

    std::size_t size() const { return a.size(); }
};

enum class ColumnRole { numeric, categorical, sensitive, label };

struct ColumnRule {
    std::string name;
    ColumnRole role = ColumnRole::numeric;
    std::optional<std::pair<double, double>> range;
    // For sensitive and label columns: raw values mapped to 1 and to 0.
    std::vector<std::string> positive;
    std::vector<std::string> negative;
};

struct DatasetSchema {
    std::string name;
    std::vector<ColumnRule> columns;
};

// Header names are matched after lowercasing and mapping ' ' to '_'.
std::string normalize_column_name(const std::string& name);

const DatasetSchema& adult_schema();
const DatasetSchema& law_schema();

// Throws SchemaError on missing or extra columns and RowError (with the line
// number) on unparsable or out-of-range values.
Dataset ingest(std::istream& in, const DatasetSchema& schema);
Dataset ingest_file(const std::string& path, const DatasetSchema& schema);
Dataset ingest_adult(const std::string& path);
Dataset ingest_law(const std::string& path);

// One-hot for categoricals (all levels, sorted), median imputation for
// numerics and mode imputation for categoricals.
struct EncodedColumn {
    std::string name;
    bool categorical = false;
    double impute_value = 0.0;
    std::vector<std::string> levels;
    std::string impute_level;
};

struct EncodingSpec {
    std::vector<EncodedColumn> columns;

    std::size_t width() const;
    std::vector<std::string> feature_names() const;
};

EncodingSpec fit_encoding(const Dataset& data);
LabeledData encode(const Dataset& data, const EncodingSpec& spec);

// Numeric CSV with columns <feature names...>, a, y.
void write_encoded_csv(std::ostream& out, const LabeledData& data,
                       const std::vector<std::string>& feature_names);
LabeledData read_encoded_csv(std::istream& in);
LabeledData load_encoded_csv(const std::string& path);

struct SyntheticTabularConfig {
    std::size_t n_rows = 5000;
    double group1_prob = 0.7;
    Vector label_probs{0.15, 0.35};  // P[Y=1 | A=a]
    std::size_t n_features = 4;
    double signal = 1.0;        // label shift of the feature means
    double group_shift = 0.5;   // group shift of the feature means
};

// x ~ N(signal (2y-1) w + group_shift (2a-1) v, I) with fixed unit directions w, v.
LabeledData synthetic_tabular(const SyntheticTabularConfig& config, RngStream& rng);

// Raw CSV text in the adult or law schema with plausible random values.
void write_synthetic_adult(std::ostream& out, std::size_t n_rows, RngStream& rng);
void write_synthetic_law(std::ostream& out, std::size_t n_rows, RngStream& rng);

}  // namespace auditlab
