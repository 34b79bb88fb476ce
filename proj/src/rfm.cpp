#include "segpipe/rfm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "segpipe/io.hpp"

namespace seg {

const char* to_string(RfmSegmentName s) {
    switch (s) {
        case RfmSegmentName::Champions: return "champions";
        case RfmSegmentName::LoyalCustomers: return "loyal_customers";
        case RfmSegmentName::PotentialLoyalists: return "potential_loyalists";
        case RfmSegmentName::Others: return "others";
    }
    return "?";
}

RfmSegmentName parse_rfm_segment(const std::string& s) {
    if (s == "champions") return RfmSegmentName::Champions;
    if (s == "loyal_customers") return RfmSegmentName::LoyalCustomers;
    if (s == "potential_loyalists") return RfmSegmentName::PotentialLoyalists;
    if (s == "others") return RfmSegmentName::Others;
    throw std::runtime_error("unknown RFM segment name: " + s);
}

std::vector<RfmRule> default_rfm_rules() {
    return {
        {RfmSegmentName::Champions, 4, 4, 5, 4},
        {RfmSegmentName::LoyalCustomers, 3, 4, 5, 1},
        {RfmSegmentName::PotentialLoyalists, 4, 2, 3, 1},
    };
}

std::vector<RfmRule> rfm_rules_from_file(const std::string& path) {
    std::istringstream in(read_file(path));
    std::vector<RfmRule> rules;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        size_t colon = line.find(':');
        if (colon == std::string::npos)
            throw std::runtime_error("rules line " + std::to_string(lineno) +
                                     ": expected `name: r_min,f_min-f_max,m_min`");
        std::string name = line.substr(0, colon);
        name.erase(0, name.find_first_not_of(" \t"));
        name.erase(name.find_last_not_of(" \t") + 1);
        RfmRule rule;
        rule.name = parse_rfm_segment(name);
        int r_min, f_min, f_max, m_min;
        if (std::sscanf(line.c_str() + colon + 1, " %d , %d - %d , %d", &r_min, &f_min,
                        &f_max, &m_min) != 4)
            throw std::runtime_error("rules line " + std::to_string(lineno) +
                                     ": bad rule format");
        rule.r_min = r_min;
        rule.f_min = f_min;
        rule.f_max = f_max;
        rule.m_min = m_min;
        rules.push_back(rule);
    }
    return rules;
}

namespace {

// Nearest-rank 20/40/60/80 percentile boundaries; higher value = higher score,
// boundary values inclusive downward (ties take the lower score).
template <typename T>
int quintile_score(T value, std::vector<T> population) {
    const size_t n = population.size();
    if (n == 1) return 5;  // degenerate population: all quintiles collapse
    std::sort(population.begin(), population.end());
    int score = 1;
    for (double q : {0.2, 0.4, 0.6, 0.8}) {
        const size_t rank = static_cast<size_t>(std::ceil(q * n));
        if (population[rank - 1] < value) ++score;
    }
    return score;
}

}  // namespace

std::vector<RfmScore> rfm_scores(const Dataset& ds, int as_of_day) {
    if (ds.customers.empty()) throw std::invalid_argument("rfm_scores: empty population");
    for (const auto& t : ds.transactions)
        if (t.day > as_of_day)
            throw std::invalid_argument("rfm_scores: transaction after as_of_day");

    std::unordered_map<std::int64_t, std::pair<int, double>> agg;  // last day, total
    std::unordered_map<std::int64_t, int> counts;
    for (const auto& t : ds.transactions) {
        auto& a = agg[t.customer_id];
        a.first = std::max(a.first, t.day);
        a.second += t.amount;
        counts[t.customer_id]++;
    }

    std::vector<RfmScore> out;
    out.reserve(ds.customers.size());
    std::vector<int> neg_recency, freqs;
    std::vector<double> monies;
    for (const auto& c : ds.customers) {
        RfmScore s;
        s.customer_id = c.id;
        auto it = counts.find(c.id);
        if (it == counts.end()) {
            s.recency_days = as_of_day + 1;
        } else {
            s.frequency_count = it->second;
            s.recency_days = as_of_day - agg[c.id].first;
            s.monetary_total = agg[c.id].second;
        }
        neg_recency.push_back(-s.recency_days);
        freqs.push_back(s.frequency_count);
        monies.push_back(s.monetary_total);
        out.push_back(s);
    }
    for (auto& s : out) {
        s.r = quintile_score(-s.recency_days, neg_recency);
        s.f = quintile_score(s.frequency_count, freqs);
        s.m = quintile_score(s.monetary_total, monies);
    }
    return out;
}

RfmSegmentName rfm_segment(const RfmScore& s, const std::vector<RfmRule>& rules) {
    for (const auto& rule : rules)
        if (s.r >= rule.r_min && s.f >= rule.f_min && s.f <= rule.f_max &&
            s.m >= rule.m_min)
            return rule.name;
    return RfmSegmentName::Others;
}

std::vector<int> rfm_as_binary_predictor(const std::vector<RfmAssignment>& assignments,
                                         RfmSegmentName target) {
    std::vector<int> out;
    out.reserve(assignments.size());
    for (const auto& a : assignments) out.push_back(a.segment == target ? 1 : 0);
    return out;
}

void write_rfm_csv(const std::vector<RfmScore>& scores,
                   const std::vector<RfmAssignment>& assignments,
                   const std::string& path) {
    if (scores.size() != assignments.size())
        throw std::invalid_argument("write_rfm_csv: size mismatch");
    std::ostringstream out;
    out << "id,recency_days,frequency,monetary,r,f,m,segment\n";
    for (size_t i = 0; i < scores.size(); ++i) {
        const auto& s = scores[i];
        out << s.customer_id << ',' << s.recency_days << ',' << s.frequency_count << ','
            << format_double(s.monetary_total) << ',' << s.r << ',' << s.f << ',' << s.m
            << ',' << to_string(assignments[i].segment) << "\n";
    }
    write_file_atomic(path, out.str());
}

}  // namespace seg
