#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "segpipe/config.hpp"
#include "segpipe/datagen.hpp"
#include "segpipe/domain.hpp"
#include "segpipe/stage1.hpp"
#include "segpipe/stage2.hpp"

namespace seg {

struct ScoreRow {
    std::int64_t id = 0;
    std::array<double, kNumSegments> stage1_probs = {0, 0, 0};
    bool active = false;
    std::optional<double> score;  // stage-2, present iff active
    bool corrected = false;
    std::string scored_at;
};

struct ScoreStore {
    std::vector<ScoreRow> rows;  // ascending id
};

// CSV `id,p_engaged,p_unengaged,p_inactive,active,score,corrected,scored_at`;
// score empty for filtered-out customers.
void write_score_store(const ScoreStore& store, const std::string& path);
ScoreStore read_score_store(const std::string& path);

// Fills in every default so a run is reproducible from the echoed config alone.
KeyValueConfig resolve_run_config(const KeyValueConfig& cfg);

GenConfig gen_config_from(const KeyValueConfig& cfg);
Stage1TrainConfig stage1_config_from(const KeyValueConfig& cfg);
SplcConfig splc_config_from(const KeyValueConfig& cfg);

// Scores everyone through stage 1, applies the active filter, scores the
// survivors through stage 2, and writes the store atomically. Rerunning with
// identical inputs produces a byte-identical file.
ScoreStore run_batch_scoring(const KeyValueConfig& cfg);

// Top-k by stage-2 score (ties by ascending id), or everyone above cut.
// Returns the exported ids; k larger than the scored population truncates
// with a warning on the log stream.
std::vector<std::int64_t> export_target_list(const ScoreStore& store,
                                             const std::string& path,
                                             std::optional<int> top_k,
                                             std::optional<double> score_cut);

}  // namespace seg
