#include "segpipe/domain.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "segpipe/io.hpp"

namespace seg {

const char* to_string(SegmentLabel s) {
    switch (s) {
        case SegmentLabel::Engaged: return "engaged";
        case SegmentLabel::Unengaged: return "unengaged";
        case SegmentLabel::Inactive: return "inactive";
    }
    return "?";
}

const char* to_string(LatentIntent v) {
    return v == LatentIntent::Prompted ? "prompted" : "organic";
}

const char* to_string(ChurnStatus c) {
    return c == ChurnStatus::Never ? "never" : "churned";
}

SegmentLabel parse_segment(const std::string& s) {
    if (s == "engaged") return SegmentLabel::Engaged;
    if (s == "unengaged") return SegmentLabel::Unengaged;
    if (s == "inactive") return SegmentLabel::Inactive;
    throw std::runtime_error("unknown segment: " + s);
}

std::optional<LatentIntent> parse_intent(const std::string& s) {
    if (s == "prompted") return LatentIntent::Prompted;
    if (s == "organic") return LatentIntent::Organic;
    if (s == "unknown") return std::nullopt;
    throw std::runtime_error("unknown latent_intent: " + s);
}

ChurnStatus parse_churn(const std::string& s) {
    if (s == "never") return ChurnStatus::Never;
    if (s == "churned") return ChurnStatus::Churned;
    throw std::runtime_error("unknown churn_status: " + s);
}

const CustomerRecord* Dataset::find(std::int64_t id) const {
    for (const auto& c : customers)
        if (c.id == id) return &c;
    return nullptr;
}

std::vector<std::string> validate_dataset(const Dataset& ds) {
    std::vector<std::string> out;
    std::unordered_set<std::int64_t> ids;
    for (const auto& c : ds.customers) {
        if (!ids.insert(c.id).second)
            out.push_back("duplicate customer id " + std::to_string(c.id));
        if (static_cast<int>(c.features.size()) != ds.feature_dim)
            out.push_back("customer " + std::to_string(c.id) + ": feature dimension " +
                          std::to_string(c.features.size()) + " != " +
                          std::to_string(ds.feature_dim));
        for (double f : c.features) {
            if (!std::isfinite(f)) {
                out.push_back("customer " + std::to_string(c.id) + ": non-finite feature");
                break;
            }
        }
        if (c.segment == SegmentLabel::Engaged && !c.exposed)
            out.push_back("customer " + std::to_string(c.id) +
                          ": engaged but not exposed");
    }
    for (const auto& t : ds.transactions) {
        if (!ids.count(t.customer_id))
            out.push_back("transaction references unknown customer id " +
                          std::to_string(t.customer_id));
        if (t.amount < 0)
            out.push_back("transaction for customer " + std::to_string(t.customer_id) +
                          ": negative amount");
        if (t.day < 0 || t.day > ds.horizon_days)
            out.push_back("transaction for customer " + std::to_string(t.customer_id) +
                          ": day " + std::to_string(t.day) + " outside [0," +
                          std::to_string(ds.horizon_days) + "]");
    }
    return out;
}

void write_customers_csv(const Dataset& ds, const std::string& path) {
    std::ostringstream out;
    out << "id,exposed,churn_status,segment,latent_intent";
    for (int j = 0; j < ds.feature_dim; ++j) out << ",f" << j;
    out << "\n";
    for (const auto& c : ds.customers) {
        out << c.id << ',' << (c.exposed ? 1 : 0) << ',' << to_string(c.churn_status)
            << ',' << to_string(c.segment) << ','
            << (c.latent_intent ? to_string(*c.latent_intent) : "unknown");
        for (double f : c.features) out << ',' << format_double(f);
        out << "\n";
    }
    write_file_atomic(path, out.str());
}

void write_transactions_csv(const Dataset& ds, const std::string& path) {
    std::ostringstream out;
    out << "customer_id,day,amount\n";
    for (const auto& t : ds.transactions)
        out << t.customer_id << ',' << t.day << ',' << format_double(t.amount) << "\n";
    write_file_atomic(path, out.str());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

Dataset read_dataset_csv(const std::string& customers_path,
                         const std::string& transactions_path, int horizon_days) {
    Dataset ds;
    ds.horizon_days = horizon_days;
    {
        std::ifstream in(customers_path);
        if (!in) throw std::runtime_error("cannot open file: " + customers_path);
        std::string line;
        if (!std::getline(in, line))
            throw std::runtime_error("empty customers file: " + customers_path);
        const auto header = split_csv_line(line);
        if (header.size() < 5 || header[0] != "id")
            throw std::runtime_error("bad customers header in " + customers_path);
        ds.feature_dim = static_cast<int>(header.size()) - 5;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto f = split_csv_line(line);
            if (f.size() != header.size())
                throw std::runtime_error("bad customers row in " + customers_path);
            CustomerRecord c;
            c.id = std::strtoll(f[0].c_str(), nullptr, 10);
            c.exposed = f[1] == "1" || f[1] == "true";
            c.churn_status = parse_churn(f[2]);
            c.segment = parse_segment(f[3]);
            c.latent_intent = parse_intent(f[4]);
            c.features.reserve(ds.feature_dim);
            for (size_t j = 5; j < f.size(); ++j)
                c.features.push_back(std::strtod(f[j].c_str(), nullptr));
            ds.customers.push_back(std::move(c));
        }
    }
    {
        std::ifstream in(transactions_path);
        if (!in) throw std::runtime_error("cannot open file: " + transactions_path);
        std::string line;
        std::getline(in, line);
        int max_day = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto f = split_csv_line(line);
            if (f.size() != 3)
                throw std::runtime_error("bad transactions row in " + transactions_path);
            Transaction t;
            t.customer_id = std::strtoll(f[0].c_str(), nullptr, 10);
            t.day = static_cast<int>(std::strtol(f[1].c_str(), nullptr, 10));
            t.amount = std::strtod(f[2].c_str(), nullptr);
            if (t.day > max_day) max_day = t.day;
            ds.transactions.push_back(t);
        }
        if (horizon_days == 0) ds.horizon_days = max_day;
    }
    return ds;
}

}  // namespace seg
