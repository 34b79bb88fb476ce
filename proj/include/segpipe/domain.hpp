#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace seg {

// Class indices are fixed: Engaged=0, Unengaged=1, Inactive=2.
enum class SegmentLabel : int { Engaged = 0, Unengaged = 1, Inactive = 2 };

enum class LatentIntent : int { Prompted = 0, Organic = 1 };

enum class ChurnStatus : int { Never = 0, Churned = 1 };

constexpr int kNumSegments = 3;

const char* to_string(SegmentLabel s);
const char* to_string(LatentIntent v);
const char* to_string(ChurnStatus c);

SegmentLabel parse_segment(const std::string& s);
std::optional<LatentIntent> parse_intent(const std::string& s);  // "unknown" -> nullopt
ChurnStatus parse_churn(const std::string& s);

struct CustomerRecord {
    std::int64_t id = 0;
    std::vector<double> features;
    bool exposed = false;
    SegmentLabel segment = SegmentLabel::Inactive;
    std::optional<LatentIntent> latent_intent;
    ChurnStatus churn_status = ChurnStatus::Never;
};

struct Transaction {
    std::int64_t customer_id = 0;
    int day = 0;
    double amount = 0.0;
};

struct Dataset {
    std::vector<CustomerRecord> customers;
    std::vector<Transaction> transactions;
    int feature_dim = 0;
    int horizon_days = 0;

    const CustomerRecord* find(std::int64_t id) const;
};

// Returns one human-readable entry per invariant violation; empty means valid.
std::vector<std::string> validate_dataset(const Dataset& ds);

// CSV formats:
//   customers:    id,exposed,churn_status,segment,latent_intent,f0,...,f{d-1}
//   transactions: customer_id,day,amount
void write_customers_csv(const Dataset& ds, const std::string& path);
void write_transactions_csv(const Dataset& ds, const std::string& path);
Dataset read_dataset_csv(const std::string& customers_path,
                         const std::string& transactions_path,
                         int horizon_days = 0);

}  // namespace seg
