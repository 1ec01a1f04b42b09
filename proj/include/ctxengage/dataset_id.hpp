#pragma once

#include <string>
#include <vector>

namespace ctxengage {

// (source, technique, percent, stage prefix). Renders to the artifact name
// "identifyingPrefix_source_technique_sampleSize", e.g.
// "Final_train_EWU_sample_10pct"; full datasets render without the
// technique/size suffix ("Final_train").
struct DatasetId {
    std::string source;     // train | val | test | val+test
    std::string technique;  // full | random | EU | EWU | inter_EWU+EU | tweet
    int percent = 100;      // 1 | 2 | 5 | 10 | 100
    std::string stage_prefix;

    std::string render() const;
    DatasetId with_prefix(const std::string& prefix) const;
    bool is_full() const { return technique == "full"; }

    bool operator==(const DatasetId&) const = default;
};

inline const std::vector<std::string> kSources = {"train", "val", "test", "val+test"};
inline const std::vector<std::string> kTechniques = {"random", "EU", "EWU", "inter_EWU+EU", "tweet"};
inline const std::vector<int> kPercents = {1, 2, 5, 10};

void validate_dataset_id(const DatasetId& id);

}  // namespace ctxengage
