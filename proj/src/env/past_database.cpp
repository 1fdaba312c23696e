#include "auditlab/env/past_database.hpp"

#include <fstream>
#include <ostream>

#include "auditlab/errors.hpp"
#include "auditlab/io/text.hpp"

namespace auditlab {

PastDatabase::PastDatabase(std::size_t dim) : dim_(dim) {}

void PastDatabase::reserve(std::size_t n) {
    x_.reserve(n * dim_);
    groups_.reserve(n);
    decisions_.reserve(n);
    labels_.reserve(n);
}

void PastDatabase::append(std::span<const double> x, int a, int f, std::optional<int> y) {
    if (x.size() != dim_) throw DomainError("record dimension mismatch");
    if (f != 0 && f != 1) throw DomainError("decision must be 0 or 1");
    if (f == 1 && !y) throw DomainError("positive records carry a label");
    x_.insert(x_.end(), x.begin(), x.end());
    groups_.push_back(a);
    decisions_.push_back(static_cast<std::int8_t>(f));
    labels_.push_back(f == 1 ? static_cast<std::int8_t>(*y != 0 ? 1 : 0) : std::int8_t{-1});
}

std::optional<int> PastDatabase::label(std::size_t i) const {
    if (labels_[i] < 0) return std::nullopt;
    return labels_[i];
}

std::size_t PastDatabase::n_positives() const {
    std::size_t n = 0;
    for (auto f : decisions_) n += f == 1 ? 1 : 0;
    return n;
}

Vector PastDatabase::positive_cell(int y, int a) const {
    Vector out;
    for (std::size_t i = 0; i < size(); ++i)
        if (decisions_[i] == 1 && labels_[i] == y && groups_[i] == a) {
            auto r = features(i);
            out.insert(out.end(), r.begin(), r.end());
        }
    return out;
}

void PastDatabase::write_csv(std::ostream& out) const {
    for (std::size_t j = 0; j < dim_; ++j) out << "x_" << j << ',';
    out << "a,f,y\n";
    for (std::size_t i = 0; i < size(); ++i) {
        auto r = features(i);
        for (double v : r) out << io::format_exact(v) << ',';
        out << groups_[i] << ',' << int(decisions_[i]) << ',';
        if (labels_[i] >= 0) out << int(labels_[i]);
        out << '\n';
    }
}

PastDatabase PastDatabase::read_csv(std::istream& in) {
    io::CsvReader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) throw SchemaError("empty past database file");
    if (fields.size() < 3 || io::trim(fields[fields.size() - 3]) != "a" ||
        io::trim(fields[fields.size() - 2]) != "f" || io::trim(fields.back()) != "y")
        throw SchemaError("past database header must end with a,f,y");
    const std::size_t dim = fields.size() - 3;
    for (std::size_t j = 0; j < dim; ++j)
        if (io::trim(fields[j]) != "x_" + std::to_string(j))
            throw SchemaError("expected column x_" + std::to_string(j));
    PastDatabase db(dim);
    Vector x(dim);
    while (reader.next(fields)) {
        const auto line = std::to_string(reader.line_number());
        if (fields.size() != dim + 3) throw RowError("line " + line + ": wrong field count");
        for (std::size_t j = 0; j < dim; ++j) {
            auto v = io::parse_double(fields[j]);
            if (!v) throw RowError("line " + line + ": bad feature value");
            x[j] = *v;
        }
        auto a = io::parse_int(fields[dim]);
        auto f = io::parse_int(fields[dim + 1]);
        if (!a || !f || (*f != 0 && *f != 1)) throw RowError("line " + line + ": bad a or f");
        std::optional<int> y;
        std::string ys = io::trim(fields[dim + 2]);
        if (!ys.empty()) {
            auto yv = io::parse_int(ys);
            if (!yv || (*yv != 0 && *yv != 1)) throw RowError("line " + line + ": bad y");
            y = static_cast<int>(*yv);
        }
        if (*f == 1 && !y) throw RowError("line " + line + ": positive record without label");
        if (*f == 0 && y) throw RowError("line " + line + ": negative record with label");
        db.append(x, static_cast<int>(*a), static_cast<int>(*f), y);
    }
    return db;
}

void PastDatabase::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path);
    write_csv(out);
    if (!out) throw IoError("write failed for " + path);
}

PastDatabase PastDatabase::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return read_csv(in);
}

PastDatabase generate_past_database(const AuditInstance& instance, const Classifier& classifier,
                                    std::size_t n, RngStream& rng) {
    if (n == 0) throw DomainError("past database needs n >= 1");
    PastDatabase db(instance.point_dim());
    db.reserve(n);
    Vector x(instance.point_dim());
    for (std::size_t i = 0; i < n; ++i) {
        DrawOutcome d = instance.sample_into(rng, x);
        int f = classifier.predict(x, d.a);
        db.append(x, d.a, f, f == 1 ? std::optional<int>(d.y) : std::nullopt);
    }
    return db;
}

}  // namespace auditlab
