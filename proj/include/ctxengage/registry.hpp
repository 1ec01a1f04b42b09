#pragma once

#include <string>
#include <vector>

namespace ctxengage {

// Column-name registry for the modelling features. The 185 relevant
// features feed selection and classification; the 8 oracle features join
// them in the oracle_scaled feature sets.

inline const std::vector<std::string> kEngagements = {"like", "reply", "retweet", "quote", "react"};
inline const std::vector<std::string> kWindowSuffixes = {"05h", "1h", "2h", "12h", "24h", "48h"};
inline const std::vector<std::int64_t> kWindowSeconds = {1800, 3600, 7200, 43200, 86400, 172800};
inline const std::vector<std::string> kElements = {"hashtags", "links", "domains"};

// The 185 relevant feature names, in registry order.
const std::vector<std::string>& relevant_features();

// The 8 whole-corpus frequency ("oracle") features.
const std::vector<std::string>& oracle_features();

// Label columns.
const std::vector<std::string>& label_columns();

// Identifier/timestamp columns carried through every stage.
const std::vector<std::string>& key_columns();

// Position of a feature in (relevant ++ oracle); used for deterministic
// tie-breaking. Throws on unknown names.
std::size_t registry_index(const std::string& feature);

}  // namespace ctxengage
