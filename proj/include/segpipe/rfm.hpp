#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "segpipe/domain.hpp"

namespace seg {

struct RfmScore {
    std::int64_t customer_id = 0;
    int r = 1, f = 1, m = 1;  // quintile scores, 5 = best
    int recency_days = 0;
    int frequency_count = 0;
    double monetary_total = 0.0;
};

enum class RfmSegmentName : int {
    Champions = 0,
    LoyalCustomers = 1,
    PotentialLoyalists = 2,
    Others = 3
};

const char* to_string(RfmSegmentName s);
RfmSegmentName parse_rfm_segment(const std::string& s);

// One rule per named segment, evaluated in order; first match wins, fallback
// is Others. f is a closed range so "f in {2,3}" style rules are expressible.
struct RfmRule {
    RfmSegmentName name = RfmSegmentName::Others;
    int r_min = 1;
    int f_min = 1, f_max = 5;
    int m_min = 1;
};

std::vector<RfmRule> default_rfm_rules();

// Rules file: one `name: r_min,f_min-f_max,m_min` per line, '#' comments.
std::vector<RfmRule> rfm_rules_from_file(const std::string& path);

// Quintile scores over the population as of as_of_day. Customers with no
// transactions get recency as_of_day+1, frequency 0, monetary 0. Boundaries
// at the empirical 20/40/60/80 percentiles (nearest-rank), boundary values
// inclusive downward.
std::vector<RfmScore> rfm_scores(const Dataset& ds, int as_of_day);

RfmSegmentName rfm_segment(const RfmScore& score,
                           const std::vector<RfmRule>& rules = default_rfm_rules());

struct RfmAssignment {
    std::int64_t customer_id;
    RfmSegmentName segment;
};

// Binary predictor: positive iff the customer's segment equals target.
std::vector<int> rfm_as_binary_predictor(const std::vector<RfmAssignment>& assignments,
                                         RfmSegmentName target);

// CSV `id,recency_days,frequency,monetary,r,f,m,segment`
void write_rfm_csv(const std::vector<RfmScore>& scores,
                   const std::vector<RfmAssignment>& assignments,
                   const std::string& path);

}  // namespace seg
