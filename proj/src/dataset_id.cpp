#include "ctxengage/dataset_id.hpp"

#include <algorithm>
#include <stdexcept>

namespace ctxengage {

std::string DatasetId::render() const {
    if (is_full()) return stage_prefix + source;
    return stage_prefix + source + "_" + technique + "_sample_" + std::to_string(percent) + "pct";
}

DatasetId DatasetId::with_prefix(const std::string& prefix) const {
    DatasetId out = *this;
    out.stage_prefix = prefix;
    return out;
}

void validate_dataset_id(const DatasetId& id) {
    if (std::find(kSources.begin(), kSources.end(), id.source) == kSources.end())
        throw std::runtime_error("bad dataset source: " + id.source);
    if (id.technique == "full") {
        if (id.percent != 100) throw std::runtime_error("full dataset must be 100pct");
        return;
    }
    if (std::find(kTechniques.begin(), kTechniques.end(), id.technique) == kTechniques.end())
        throw std::runtime_error("bad sampling technique: " + id.technique);
    if (std::find(kPercents.begin(), kPercents.end(), id.percent) == kPercents.end())
        throw std::runtime_error("bad sample percent: " + std::to_string(id.percent));
}

}  // namespace ctxengage
